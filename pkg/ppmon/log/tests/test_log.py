from datetime import datetime, timedelta, timezone

import pytest

from ppmon.log import (
    MISSING,
    AttributeType,
    Event,
    EventLog,
    Trace,
    parse_log,
    read_log,
    serialize_csv,
    snapshot_at,
    temporal_split,
)
from ppmon.log._schema import format_value, infer_type, parse_timestamp, parse_value
from ppmon.log.exceptions import LogParseError, SchemaError
from ppmon.log.tests._utils import (
    T0,
    make_log,
    make_trace,
    recovery_log,
    recovery_trace,
)

XES_TEMPLATE = """<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0" xmlns="http://www.xes-standard.org/">
{body}
</log>
"""


def xes(body):
    return XES_TEMPLATE.format(body=body).encode("utf-8")


def xes_event(activity, minute, *attrs):
    children = "".join(attrs)
    return (
        f'<event><string key="concept:name" value="{activity}"/>'
        f'<date key="time:timestamp" value="2011-01-01T00:{minute:02d}:00.000+01:00"/>'
        f"{children}</event>"
    )


class TestMissing:
    def test_missing_is_a_falsy_singleton(self):
        from ppmon.log import MissingType

        assert MissingType() is MISSING
        assert not MISSING
        assert repr(MISSING) == "?"

    def test_missing_is_not_empty_text(self):
        assert MISSING != ""
        assert parse_value("", AttributeType.TEXT) is MISSING

    def test_missing_survives_pickling(self):
        import pickle

        assert pickle.loads(pickle.dumps(MISSING)) is MISSING


class TestParseCsv:
    def test_one_case_two_events(self):
        data = (
            b"case_id,activity,timestamp,sym\n"
            b"c1,M,2011-01-01T10:00:00Z,painA\n"
            b"c1,A,2011-01-01T11:00:00Z,\n"
        )
        log = parse_log(data, "csv")
        assert len(log) == 1
        trace = log.traces[0]
        assert trace.case_id == "c1"
        assert trace.activities == ("M", "A")
        assert trace.events[0].attributes == {"sym": "painA"}
        assert trace.events[1].attributes == {"sym": MISSING}
        assert log.attribute_schema == {"sym": AttributeType.TEXT}

    @pytest.mark.parametrize("data", [b"", b"\n\n"], ids=["empty", "blank"])
    def test_empty_file_gives_empty_log(self, data):
        log = parse_log(data, "csv")
        assert len(log) == 0
        assert log.attribute_schema == {}

    def test_events_sorted_by_timestamp_ties_keep_order(self):
        data = (
            b"case_id,activity,timestamp\n"
            b"c1,B,2011-01-01T11:00:00Z\n"
            b"c1,A,2011-01-01T10:00:00Z\n"
            b"c1,C,2011-01-01T11:00:00Z\n"
        )
        trace = parse_log(data, "csv").traces[0]
        assert trace.activities == ("A", "B", "C")

    def test_types_inferred(self):
        data = (
            b"case_id,activity,timestamp,flag,count,amount,due,name\n"
            b"c1,A,2011-01-01T10:00:00Z,true,1,1.5,2011-02-01T00:00:00Z,x\n"
            b"c1,B,2011-01-01T11:00:00Z,False,2,2,2011-03-01T00:00:00+02:00,1\n"
        )
        log = parse_log(data, "csv")
        assert log.attribute_schema == {
            "flag": AttributeType.BOOLEAN,
            "count": AttributeType.INTEGER,
            "amount": AttributeType.REAL,
            "due": AttributeType.TIMESTAMP,
            "name": AttributeType.TEXT,
        }
        second = log.traces[0].events[1].attributes
        assert second["flag"] is False
        assert second["count"] == 2
        assert second["amount"] == 2.0 and isinstance(second["amount"], float)
        assert second["name"] == "1"

    def test_malformed_row_reports_line(self):
        data = (
            b"case_id,activity,timestamp\n"
            b"c1,A,2011-01-01T10:00:00Z\n"
            b"c1,B,2011-01-01T11:00:00Z,extra,cells\n"
        )
        with pytest.raises(LogParseError) as exc:
            parse_log(data, "csv")
        assert exc.value.line == 3

    def test_bad_timestamp_reports_line(self):
        data = b"case_id,activity,timestamp\nc1,A,yesterday\n"
        with pytest.raises(LogParseError, match="line 2"):
            parse_log(data, "csv")

    def test_bad_header(self):
        data = b"case,activity,timestamp\nc1,A,2011-01-01T10:00:00Z\n"
        with pytest.raises(LogParseError, match="header"):
            parse_log(data, "csv")

    def test_round_trip(self):
        data = (
            b"case_id,activity,timestamp,flag,count,amount,name\n"
            b"c1,A,2011-01-01T10:00:00+00:00,true,1,1.5,x\n"
            b"c1,B,2011-01-01T11:00:00+00:00,,2,,y\n"
            b"c2,A,2011-01-02T10:00:00.250000+01:00,false,,0.1,\n"
        )
        log = parse_log(data, "csv")
        text = serialize_csv(log)
        assert text.encode("utf-8") == data
        assert parse_log(text.encode("utf-8"), "csv") == log


class TestParseXes:
    def test_trace_with_diagnosis(self):
        body = (
            '<trace><string key="concept:name" value="t1"/>'
            + xes_event("M", 0, '<string key="sym" value="painA"/>')
            + xes_event("A", 1)
            + xes_event("C", 2)
            + xes_event("D", 3, '<string key="dia" value="d1"/>')
            + "</trace>"
        )
        log = parse_log(xes(body), "xes")
        trace = log.traces[0]
        assert trace.case_id == "t1"
        assert trace.activities == ("M", "A", "C", "D")
        assert trace.events[3].attributes["dia"] == "d1"
        assert snapshot_at(trace, 4)["dia"] == "d1"

    def test_typed_attributes_and_trace_level(self):
        body = (
            '<trace><string key="concept:name" value="c"/><int key="age" value="50"/>'
            + xes_event(
                "A",
                0,
                '<float key="cost" value="1.5"/>',
                '<boolean key="urgent" value="true"/>',
            )
            + xes_event("B", 1, '<int key="cost" value="2"/>')
            + "</trace>"
        )
        log = parse_log(xes(body), "xes")
        assert log.attribute_schema == {
            "age": AttributeType.INTEGER,
            "cost": AttributeType.REAL,
            "urgent": AttributeType.BOOLEAN,
        }
        trace = log.traces[0]
        assert trace.attributes == {"age": 50}
        assert snapshot_at(trace, 1).values == {"age": 50, "cost": 1.5, "urgent": True}

    def test_conflicting_declared_types(self):
        body = (
            '<trace><string key="concept:name" value="c"/>'
            + xes_event("A", 0, '<string key="x" value="a"/>')
            + xes_event("B", 1, '<date key="x" value="2011-01-01T00:00:00Z"/>')
            + "</trace>"
        )
        with pytest.raises(SchemaError, match="'x'"):
            parse_log(xes(body), "xes")

    def test_value_failing_declared_type_demotes_to_text(self):
        body = (
            '<trace><string key="concept:name" value="c"/>'
            + xes_event("A", 0, '<int key="x" value="1"/>')
            + xes_event("B", 1, '<int key="x" value="many"/>')
            + "</trace>"
        )
        log = parse_log(xes(body), "xes")
        assert log.attribute_schema == {"x": AttributeType.TEXT}
        assert log.traces[0].events[0].attributes["x"] == "1"

    def test_malformed_xml_reports_line(self):
        with pytest.raises(LogParseError) as exc:
            parse_log(b"<log>\n<trace>\n</log>", "xes")
        assert exc.value.line == 3

    def test_event_without_activity_reports_element(self):
        body = (
            '<trace><string key="concept:name" value="c"/>'
            '<event><date key="time:timestamp" value="2011-01-01T00:00:00Z"/></event>'
            "</trace>"
        )
        with pytest.raises(LogParseError) as exc:
            parse_log(xes(body), "xes")
        assert exc.value.element == "trace[1]/event[1]"

    def test_empty_file(self):
        assert len(parse_log(b"", "xes")) == 0


def test_read_log_uses_extension(tmp_path):
    path = tmp_path / "log.csv"
    path.write_bytes(b"case_id,activity,timestamp\nc1,A,2011-01-01T10:00:00Z\n")
    assert len(read_log(path)) == 1

    with pytest.raises(ValueError, match="extension"):
        read_log(tmp_path / "log.txt")


class TestSnapshot:
    def test_recovery_example(self):
        snapshot = snapshot_at(recovery_trace("t1"), 4)
        assert snapshot.values == {
            "sym": "painA",
            "dia": "d1",
            "pre": "p1",
            "treat": MISSING,
        }

    def test_first_event_without_attributes(self):
        trace = make_trace("c", "A B", {2: {"x": 1}})
        assert snapshot_at(trace, 1).values == {"x": MISSING}

    def test_last_write_wins(self):
        trace = make_trace("c", "A B C", {2: {"x": 1}, 3: {"x": 2}})
        assert snapshot_at(trace, 3)["x"] == 2
        assert snapshot_at(trace, 2)["x"] == 1

    def test_schema_restricts_universe(self):
        trace = make_trace("c", "A", {1: {"x": 1, "y": 2}})
        assert snapshot_at(trace, 1, schema=["x", "z"]).values == {"x": 1, "z": MISSING}

    def test_trace_attributes_apply_first(self):
        trace = Trace("c", make_trace("c", "A B", {2: {"x": 2}}).events, {"x": 0})
        assert snapshot_at(trace, 1)["x"] == 0
        assert snapshot_at(trace, 2)["x"] == 2

    @pytest.mark.parametrize("position", [0, 5])
    def test_out_of_range(self, position):
        with pytest.raises(IndexError):
            snapshot_at(make_trace("c", "A B C D"), position)

    def test_empty_cell_does_not_unset(self):
        data = (
            b"case_id,activity,timestamp,sym\n"
            b"c1,M,2011-01-01T10:00:00Z,painA\n"
            b"c1,A,2011-01-01T11:00:00Z,\n"
        )
        trace = parse_log(data, "csv").traces[0]
        assert snapshot_at(trace, 2)["sym"] == "painA"

    def test_monotone(self):
        trace = recovery_trace("t1")
        previous = snapshot_at(trace, 1)
        for position in range(2, len(trace) + 1):
            current = snapshot_at(trace, position)
            for name, value in previous.values.items():
                if value is not MISSING:
                    assert current[name] is not MISSING
            previous = current


class TestTemporalSplit:
    def test_ten_traces(self):
        traces = [
            make_trace(f"c{i}", "A B", start=T0 + timedelta(days=(7 * i) % 10))
            for i in range(10)
        ]
        training, testing = temporal_split(make_log(traces), 0.8)
        assert (len(training), len(testing)) == (8, 2)
        latest_training = max(t.events[0].timestamp for t in training)
        assert all(t.events[0].timestamp >= latest_training for t in testing)

    def test_single_trace_goes_to_training(self):
        training, testing = temporal_split(make_log([make_trace("c", "A")]), 0.8)
        assert (len(training), len(testing)) == (1, 0)

    def test_ties_keep_log_order(self):
        traces = [make_trace(f"c{i}", "A") for i in range(5)]
        training, testing = temporal_split(make_log(traces), 0.6)
        assert [t.case_id for t in training] == ["c0", "c1", "c2"]
        assert [t.case_id for t in testing] == ["c3", "c4"]

    def test_partition(self):
        log = recovery_log()
        training, testing = temporal_split(log, 0.5)
        ids = [t.case_id for t in training] + [t.case_id for t in testing]
        assert sorted(ids) == sorted(t.case_id for t in log)
        assert training.attribute_schema == log.attribute_schema

    def test_fraction_with_rounding_noise(self):
        traces = [
            make_trace(f"c{i}", "A", start=T0 + timedelta(days=i)) for i in range(10)
        ]
        training, _ = temporal_split(make_log(traces), 0.7)
        assert len(training) == 7

    @pytest.mark.parametrize("fraction", [0, 1, 1.5])
    def test_invalid_fraction(self, fraction):
        with pytest.raises(ValueError, match="training_fraction"):
            temporal_split(recovery_log(), fraction)

    def test_empty_log(self):
        with pytest.raises(ValueError, match="empty"):
            temporal_split(EventLog(), 0.8)


class TestValues:
    def test_parse_timestamp_offsets(self):
        ts = parse_timestamp("2011-01-01T10:00:00-02:30")
        assert ts.utcoffset() == -timedelta(hours=2, minutes=30)
        assert ts == datetime(2011, 1, 1, 12, 30, tzinfo=timezone.utc)

    def test_naive_timestamp_is_utc(self):
        assert parse_timestamp("2011-01-01 10:00:00").tzinfo == timezone.utc

    @pytest.mark.parametrize(
        "text, expected",
        [
            (
                "2011-01-01t10:00:00.123456789z",
                datetime(2011, 1, 1, 10, 0, 0, 123456, tzinfo=timezone.utc),
            ),
            (
                " 2011-01-01T10:00:00.5+01:00 ",
                datetime(2011, 1, 1, 9, 0, 0, 500000, tzinfo=timezone.utc),
            ),
        ],
        ids=["nanoseconds-lowercase", "padded-fraction"],
    )
    def test_parse_timestamp_fractions(self, text, expected):
        assert parse_timestamp(text) == expected

    @pytest.mark.parametrize(
        "text",
        [
            "2011-02-30T00:00:00Z",
            "2011-01-01T25:00:00Z",
            "2011-01-01T10:00:00+25:00",
            "2011-01-01",
            "March",
            "today",
        ],
    )
    def test_parse_timestamp_rejects(self, text):
        with pytest.raises(ValueError, match="not an RFC-3339 timestamp"):
            parse_timestamp(text)

    @pytest.mark.parametrize(
        "texts, expected",
        [
            (["true", "FALSE"], AttributeType.BOOLEAN),
            (["1", "-2"], AttributeType.INTEGER),
            (["1", "1e3"], AttributeType.REAL),
            (["2011-01-01T00:00:00Z"], AttributeType.TIMESTAMP),
            (["1", "2011-01-01T00:00:00Z"], AttributeType.TEXT),
            (["nan"], AttributeType.TEXT),
            ([""], AttributeType.TEXT),
        ],
    )
    def test_infer_type(self, texts, expected):
        assert infer_type(texts) is expected

    @pytest.mark.parametrize(
        "value, text", [(True, "true"), (MISSING, ""), (1.25, "1.25"), ("x", "x")]
    )
    def test_format_value(self, value, text):
        assert format_value(value) == text

    def test_event_needs_activity(self):
        with pytest.raises(ValueError, match="activity"):
            Event("", T0)

    def test_duplicate_case_ids(self):
        with pytest.raises(ValueError, match="more than once"):
            EventLog((make_trace("c", "A"), make_trace("c", "B")))
