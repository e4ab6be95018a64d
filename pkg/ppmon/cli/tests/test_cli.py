import argparse
import io
import json
import logging
from unittest import mock

import pandas as pd
import pytest

from ppmon.cli import _evaluate, _inspect, _label, _serve, _train
from ppmon.cli._utils import (
    EXIT_DATA,
    EXIT_OK,
    EXIT_TRAINING,
    EXIT_USAGE,
    get_log_level,
    run,
)
from ppmon.cli.entrypoint import main_cli
from ppmon.evaluation import REPORT_COLUMNS
from ppmon.io.exceptions import CorruptModelError
from ppmon.log import serialize_csv
from ppmon.log.exceptions import LogParseError
from ppmon.log.tests._utils import outcome_log, recovery_log
from ppmon.ltl.exceptions import FormulaSyntaxError
from ppmon.pipeline import TrainingConfig, load_model, save_model
from ppmon.pipeline.exceptions import ConfigurationError, TrainingError
from ppmon.tree.exceptions import TrainingDataError

FORMULA = 'F("ok")'
# a single cluster keeps the command line tests fast
ONE_CLUSTER = ["--k-min", "1", "--k-max", "1"]


@pytest.fixture(autouse=True)
def clear_argv(monkeypatch):
    # Otherwise, clogs parser.parse_known_args() in argparse when pytest is
    # called with arguments of its own
    monkeypatch.setattr("sys.argv", [""])


@pytest.fixture(scope="module")
def log_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("logs") / "outcome.csv"
    path.write_text(serialize_csv(outcome_log(n_traces=60, seed=5)), encoding="utf-8")
    return path


@pytest.fixture
def recovery_path(tmp_path):
    path = tmp_path / "recovery.csv"
    path.write_text(serialize_csv(recovery_log()), encoding="utf-8")
    return path


@pytest.fixture
def model_path(tmp_path, outcome_model):
    path = tmp_path / "model.ppmon"
    save_model(outcome_model, path)
    return path


class TestLogLevel:
    @pytest.mark.parametrize(
        "verbosity, expected_level",
        [
            (0, logging.WARNING),
            (1, logging.INFO),
            (2, logging.DEBUG),
            (5, logging.DEBUG),
            (-1, logging.WARNING),
        ],
    )
    def test_get_log_level(self, verbosity, expected_level):
        assert get_log_level(verbosity) == expected_level

    @pytest.mark.parametrize(
        "verbosity, expected_count",
        [("", 0), ("-v", 1), ("--verbose", 1), ("-vv", 2), ("-v -v", 2)],
    )
    def test_verbose_flag_is_counted(self, recovery_path, verbosity, expected_count):
        args = ["--log", str(recovery_path), "--formula", 'F("R")']
        namespace, _ = _label.format_parser().parse_known_args(
            args + verbosity.split()
        )
        assert namespace.loglevel == expected_count


class TestRun:
    @pytest.mark.parametrize(
        "exception, expected_code",
        [
            (ConfigurationError("bad pairing"), EXIT_USAGE),
            (LogParseError("bad row", line=3), EXIT_DATA),
            (FormulaSyntaxError("unexpected end", "F(", 2), EXIT_DATA),
            (CorruptModelError("not a zip"), EXIT_DATA),
            (FileNotFoundError("log.csv"), EXIT_DATA),
            (ValueError("bad value"), EXIT_DATA),
            (TrainingError("no clusters"), EXIT_TRAINING),
            (TrainingDataError("no rows"), EXIT_TRAINING),
        ],
    )
    def test_exceptions_map_to_exit_codes(self, exception, expected_code, caplog):
        def method(parsed_args):
            raise exception

        assert run(method, argparse.Namespace()) == expected_code
        assert type(exception).__name__ in caplog.text

    def test_success(self):
        assert run(lambda parsed_args: None, argparse.Namespace()) == EXIT_OK

    def test_unexpected_exceptions_propagate(self):
        def method(parsed_args):
            raise KeyError("bug")

        with pytest.raises(KeyError):
            run(method, argparse.Namespace())


class TestLabel:
    def test_label_log(self):
        sink = io.StringIO()
        _label._label_log(recovery_log(), 'F("R")', sink)

        sink.seek(0)
        labels = pd.read_csv(sink)
        assert list(labels.columns) == ["case_id", "label"]
        assert dict(zip(labels["case_id"], labels["label"])) == {
            "t1": "compliant",
            "t2": "non_compliant",
            "t3": "compliant",
            "t4": "non_compliant",
            "t5": "compliant",
            "t6": "non_compliant",
        }

    def test_labels_go_to_stdout(self, recovery_path, capsys):
        code = main_cli(["label", "--log", str(recovery_path), "--formula", 'F("R")'])

        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "case_id,label"
        assert lines[1] == "t1,compliant"
        assert len(lines) == 7

    def test_labels_go_to_output_file(self, recovery_path, tmp_path, capsys):
        output = tmp_path / "labels.csv"
        args = ["--log", str(recovery_path), "--formula", 'G(!"R")', "-o", str(output)]

        assert main_cli(["label"] + args) == EXIT_OK
        assert capsys.readouterr().out == ""
        labels = pd.read_csv(output)
        assert (labels["label"] == "compliant").sum() == 3

    def test_missing_formula_is_a_usage_error(self, recovery_path, capsys):
        code = main_cli(["label", "--log", str(recovery_path)])

        assert code == EXIT_USAGE
        assert "--formula" in capsys.readouterr().err

    def test_bad_formula_is_a_data_error(self, recovery_path):
        code = main_cli(["label", "--log", str(recovery_path), "--formula", 'F("R"'])
        assert code == EXIT_DATA

    def test_missing_log_is_a_data_error(self, tmp_path):
        args = ["label", "--log", str(tmp_path / "nope.csv"), "--formula", 'F("R")']
        assert main_cli(args) == EXIT_DATA


class TestTrain:
    def args(self, log_path, out, *extra):
        return [
            "train",
            "--log",
            str(log_path),
            "--formula",
            FORMULA,
            "--out",
            str(out),
            *extra,
        ]

    def test_model_is_written(self, log_path, tmp_path):
        out = tmp_path / "model.ppmon"
        code = main_cli(self.args(log_path, out, "--gap", "3", *ONE_CLUSTER))

        assert code == EXIT_OK
        model = load_model(out)
        assert model.instance == "mbased_dt"
        assert model.config.gap == 3
        assert model.formula == FORMULA
        assert model.n_clusters == 1

    def test_seed_reproduces_the_model(self, log_path, tmp_path):
        first, second = tmp_path / "first.ppmon", tmp_path / "second.ppmon"
        extra = ["--instance", "dbscan_rf", "--trees", "5", "--seed", "7"]
        assert main_cli(self.args(log_path, first, *extra)) == EXIT_OK
        assert main_cli(self.args(log_path, second, *extra)) == EXIT_OK

        model_1, model_2 = load_model(first), load_model(second)
        assert model_1.stats == model_2.stats
        for cluster_id, forest in model_1.classifiers.items():
            assert len(forest.trees_) == 5
            other = model_2.classifiers[cluster_id]
            assert forest.trees_[0].root_ == other.trees_[0].root_

    def test_matrix_is_written(self, log_path, tmp_path):
        out, matrix = tmp_path / "model.ppmon", tmp_path / "matrix.csv"
        code = main_cli(
            self.args(log_path, out, "--matrix", str(matrix), *ONE_CLUSTER)
        )

        assert code == EXIT_OK
        rows = pd.read_csv(matrix)
        assert list(rows.columns) == [
            "case_id",
            "prefix_length",
            "cluster",
            "risk",
            "label",
        ]
        assert set(rows["cluster"]) == {0}
        assert set(rows["prefix_length"]) <= {1, 6, 11, 16, 21}
        assert load_model(out).n_prefixes == len(rows)

    def test_unknown_instance_prints_usage(self, log_path, tmp_path, capsys):
        out = tmp_path / "model.ppmon"
        code = main_cli(self.args(log_path, out, "--instance", "kmeans_dt"))

        assert code == EXIT_USAGE
        assert "usage" in capsys.readouterr().err
        assert not out.exists()

    def test_foreign_parameter_is_a_usage_error(self, log_path, tmp_path, caplog):
        out = tmp_path / "model.ppmon"
        code = main_cli(self.args(log_path, out, "--eps", "0.2"))

        assert code == EXIT_USAGE
        assert "eps" in caplog.text
        assert not out.exists()

    def test_no_clusters_is_a_training_error(self, log_path, tmp_path, caplog):
        out = tmp_path / "model.ppmon"
        extra = ["--instance", "dbscan_dt", "--min-points", "100000"]
        code = main_cli(self.args(log_path, out, *extra))

        assert code == EXIT_TRAINING
        assert "no clusters" in caplog.text
        assert not out.exists()

    @mock.patch("ppmon.cli._train._train_file")
    def test_main_builds_the_config(self, train_file_mock, log_path):
        args = ["--log", str(log_path), "--formula", FORMULA, "--out", "m.ppmon"]
        args += ["--instance", "mbased_rf", "--trees", "7", "--max-prefix", "11"]
        namespace, _ = _train.format_parser().parse_known_args(args)

        _train.main(namespace)

        train_file_mock.assert_called_once()
        config = train_file_mock.call_args.args[1]
        assert config == TrainingConfig.from_instance(
            "mbased_rf", formula=FORMULA, trees_count=7, max_length=11
        )
        assert train_file_mock.call_args.kwargs["matrix_file"] is None


class TestEvaluate:
    def test_report_file(self, log_path, tmp_path):
        report = tmp_path / "report.csv"
        args = ["evaluate", "--log", str(log_path), "--formula", FORMULA]
        args += ONE_CLUSTER + ["--min-prob", "0.6", "0.9", "--report", str(report)]

        assert main_cli(args) == EXIT_OK
        rows = pd.read_csv(report)
        assert list(rows.columns) == REPORT_COLUMNS
        assert list(rows["instance"]) == ["mbased_dt", "mbased_dt"]
        assert list(rows["min_prob"]) == [0.6, 0.9]
        assert (rows["tp"] + rows["fp"] + rows["tn"] + rows["fn"] <= 12).all()
        assert rows["failure_rate"].between(0, 1).all()

    def test_table_goes_to_stdout(self, log_path, capsys):
        args = ["evaluate", "--log", str(log_path), "--formula", FORMULA]
        args += ONE_CLUSTER + ["--baseline"]

        assert main_cli(args) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("| instance")
        assert "mbased_dt" in out
        assert "on_the_fly" in out

    @pytest.mark.parametrize(
        "extra",
        [
            ["--eps", "0.2"],
            ["--min-prob", "1.5"],
            ["--interval", "0"],
            ["--split", "1.0"],
            ["--instance", "kmeans_dt"],
        ],
        ids=["foreign parameter", "probability", "interval", "split", "instance"],
    )
    def test_invalid_options(self, log_path, extra):
        args = ["evaluate", "--log", str(log_path), "--formula", FORMULA] + extra
        assert main_cli(args) == EXIT_USAGE

    def test_foreign_parameter_of_some_instances_is_accepted(self):
        params = {"eps": 0.2, "k_min": None}
        _evaluate.check_params(["mbased_dt", "dbscan_dt"], params)

        with pytest.raises(ConfigurationError, match="eps"):
            _evaluate.check_params(["mbased_dt", "mbased_rf"], params)

    def test_sweep_defaults(self, log_path):
        args = ["--log", str(log_path), "--formula", FORMULA]
        namespace, _ = _evaluate.format_sweep_parser().parse_known_args(args)

        assert namespace.instance == [
            "mbased_dt",
            "dbscan_dt",
            "mbased_rf",
            "dbscan_rf",
        ]
        assert namespace.gap == [3, 5, 10]
        assert namespace.min_prob == [0.6, 0.7, 0.8, 0.9]
        assert namespace.split == 0.8
        assert namespace.similarity == 0.8

    @mock.patch("ppmon.cli._evaluate.sweep")
    def test_sweep_covers_the_grid(self, sweep_mock, log_path, capsys):
        sweep_mock.return_value = pd.DataFrame(columns=REPORT_COLUMNS)
        args = ["--log", str(log_path), "--formula", FORMULA, "--eps", "0.2"]
        namespace, _ = _evaluate.format_sweep_parser().parse_known_args(args)

        _evaluate.main(namespace)

        sweep_mock.assert_called_once()
        training, testing, configs, min_probs = sweep_mock.call_args.args
        assert len(training) == 48
        assert len(testing) == 12
        assert [(c.instance, c.gap) for c in configs[:3]] == [
            ("mbased_dt", 3),
            ("mbased_dt", 5),
            ("mbased_dt", 10),
        ]
        assert len(configs) == 12
        assert {c.eps for c in configs if c.clustering == "dbscan"} == {0.2}
        assert min_probs == [0.6, 0.7, 0.8, 0.9]
        assert "| instance" in capsys.readouterr().out


class TestServe:
    def test_parse_address(self):
        assert _serve.parse_address("localhost:7000") == ("localhost", 7000)
        assert _serve.parse_address(":80") == ("127.0.0.1", 80)

    @pytest.mark.parametrize("text", ["7000", "host:", "host:port", "h:70000"])
    def test_bad_address(self, text):
        with pytest.raises(argparse.ArgumentTypeError, match="HOST:PORT"):
            _serve.parse_address(text)

    def test_stdin(self, model_path, monkeypatch, capsys):
        lines = [
            {
                "type": "event",
                "case": "c1",
                "activity": "start",
                "timestamp": "2011-01-01T00:00:00Z",
                "attrs": {"risk": "low"},
            },
            {"type": "event", "case": "c1", "activity": "a"},
            {"type": "end", "case": "c1"},
        ]
        source = "".join(json.dumps(line) + "\n" for line in lines)
        monkeypatch.setattr("sys.stdin", io.StringIO(source))

        code = main_cli(
            ["serve", "--model", str(model_path), "--min-support", "1", "--stdin"]
        )

        assert code == EXIT_OK
        answers = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert [answer.get("verdict") for answer in answers] == [
            "predicted",
            None,
            "predicted",
        ]
        assert answers[0]["label"] == "compliant"
        assert "timestamp" in answers[1]["error"]

    @mock.patch("ppmon.cli._serve.serve_tcp")
    def test_listen(self, serve_tcp_mock, model_path):
        args = ["serve", "--model", str(model_path), "--listen", "0.0.0.0:7070"]
        args += ["--min-prob", "0.9", "--interval", "2"]

        assert main_cli(args) == EXIT_OK
        serve_tcp_mock.assert_called_once()
        monitor, host, port = serve_tcp_mock.call_args.args
        assert (host, port) == ("0.0.0.0", 7070)
        assert monitor.config.min_probability == 0.9
        assert monitor.config.evaluation_interval == 2

    def test_listen_and_stdin_exclude_each_other(self, model_path):
        args = ["serve", "--model", str(model_path), "--listen", ":7070", "--stdin"]
        assert main_cli(args) == EXIT_USAGE

    def test_corrupt_model(self, tmp_path):
        path = tmp_path / "model.ppmon"
        path.write_bytes(b"not a model")
        assert main_cli(["serve", "--model", str(path)]) == EXIT_DATA


class TestInspect:
    def test_clusters(self, model_path, capsys):
        assert main_cli(["inspect", "--model", str(model_path)]) == EXIT_OK

        out = capsys.readouterr().out
        assert "instance: mbased_dt" in out
        assert f"formula: {FORMULA}" in out
        assert "| cluster" in out
        assert "DecisionTree" in out
        assert "untrusted" not in out

    def test_cluster_table(self, outcome_model):
        table = _inspect.cluster_table(outcome_model)
        lines = table.splitlines()

        # header, separator and one row per cluster
        assert len(lines) == 2 + outcome_model.n_clusters
        stats = outcome_model.stats[0]
        assert str(stats.rows) in lines[2]

    def test_trees(self, model_path, capsys):
        args = ["inspect", "--model", str(model_path), "--trees", "--no-colors"]
        assert main_cli(args) == EXIT_OK

        out = capsys.readouterr().out
        assert "cluster 0" in out
        assert "risk" in out
        assert "[green]" not in out

    def test_trees_without_rich(self, model_path, capsys, rich_not_installed):
        args = ["inspect", "--model", str(model_path), "--trees"]
        assert main_cli(args) == EXIT_OK

        out = capsys.readouterr().out
        assert "risk" in out
        assert "[green]" not in out
        assert "[red]" not in out
