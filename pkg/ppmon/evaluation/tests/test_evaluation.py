import io
import math
from datetime import timedelta

import pandas as pd
import pytest
from flaky import flaky

from ppmon.evaluation import (
    BASELINE_INSTANCE,
    REPORT_COLUMNS,
    OnTheFlyPredictor,
    ReplayResult,
    compute_metrics,
    gold_standard,
    on_the_fly_predict,
    replay,
    replay_baseline,
    similar_prefixes,
    sweep,
    sweep_grid,
    write_report,
)
from ppmon.log import AttributeType, EventLog, temporal_split
from ppmon.log.tests._utils import T0, make_log, make_trace, outcome_log
from ppmon.ltl import OutcomeLabel, label_trace, parse_formula
from ppmon.monitor import MonitorVerdict, RuntimeConfig, VerdictKind
from ppmon.pipeline import INSTANCES, TrainingConfig, train
from ppmon.tree import Prediction

C = OutcomeLabel.COMPLIANT
N = OutcomeLabel.NON_COMPLIANT
OK = 'F("ok")'


def result(case_id, gold, label=None, at=None, length=20, latencies=(0.5,)):
    if label is None:
        verdict = MonitorVerdict.maybe(case_id, length)
    else:
        verdict = MonitorVerdict.predicted(case_id, Prediction(label, 0.9, 10), 0, at)
    return ReplayResult(case_id, gold, verdict, length, tuple(latencies), 1.0)


def noisy_labeler(trace):
    # risk decides the outcome except for every fifth case
    low = trace.events[0].attributes["risk"] == "low"
    flipped = int(trace.case_id.split("-")[1]) % 5 == 0
    return low != flipped


def fast_config(instance, **overrides):
    params = {"formula": OK}
    if instance.startswith("mbased"):
        params.update(k_min=1, k_max=3)
    if instance.endswith("rf"):
        params["trees_count"] = 10
    params.update(overrides)
    return TrainingConfig.from_instance(instance, **params)


class TestGoldStandard:
    def test_counts(self):
        traces = [
            make_trace("c1", "a b"),
            make_trace("c2", "b a"),
            make_trace("c3", "a"),
            make_trace("c4", "b"),
            make_trace("c5", "c d"),
        ]
        gold = gold_standard(make_log(traces), 'F("a")')
        assert list(gold.values()).count(C) == 3
        assert list(gold.values()).count(N) == 2

    def test_empty(self):
        assert gold_standard(EventLog(), 'F("a")') == {}

    def test_agrees_with_label_trace(self, small_outcome_log):
        formula = parse_formula('G(!"fail") && F("ok")')
        gold = gold_standard(small_outcome_log, formula)
        for trace in small_outcome_log:
            assert gold[trace.case_id] is label_trace(formula, trace)

    def test_labeler(self, small_outcome_log):
        gold = gold_standard(small_outcome_log, labeler=noisy_labeler)
        first = small_outcome_log.traces[0]
        # the outcome of case-0 is flipped
        expected = N if first.events[0].attributes["risk"] == "low" else C
        assert gold["case-0"] is expected
        assert set(gold.values()) == {C, N}


class TestComputeMetrics:
    def scripted(self):
        # TP=3, TN=2, FP=1, FN=0 and 4 maybes
        return (
            [result(f"tp{i}", C, C, at=6) for i in range(3)]
            + [result(f"tn{i}", N, N, at=1) for i in range(2)]
            + [result("fp", N, C, at=11)]
            + [result(f"m{i}", C) for i in range(4)]
        )

    def test_scripted_scenario(self):
        metrics = compute_metrics(self.scripted(), init_time_ms=12.5)
        assert (metrics.tp, metrics.fp, metrics.tn, metrics.fn) == (3, 1, 2, 0)
        assert metrics.accuracy == pytest.approx(5 / 6, abs=1e-9)
        assert metrics.failure_rate == 0.4
        assert metrics.n_predicted + metrics.n_maybe == metrics.n_traces == 10
        assert metrics.init_time_ms == 12.5
        assert metrics.processing_time_ms == 10.0
        assert metrics.avg_prediction_time_ms == 0.5

    def test_earliness(self):
        results = [result("p", C, C, at=6, length=20)] + [
            result(f"m{i}", C) for i in range(3)
        ]
        assert compute_metrics(results).earliness == pytest.approx(0.3)

    def test_nothing_predicted(self):
        metrics = compute_metrics([result("m", C), result("n", N)])
        assert math.isnan(metrics.accuracy)
        assert math.isnan(metrics.earliness)
        assert metrics.failure_rate == 1.0

    def test_empty(self):
        metrics = compute_metrics([])
        assert metrics.n_traces == 0
        assert metrics.failure_rate == 1.0
        assert math.isnan(metrics.avg_prediction_time_ms)

    def test_gold_override(self):
        results = [result("a", C, C, at=1)]
        assert compute_metrics(results, gold={"a": N}).fp == 1
        with pytest.raises(ValueError, match="No gold label for case 'a'"):
            compute_metrics(results, gold={})


class TestReplay:
    def test_prediction_at_first_event(self, small_outcome_log, outcome_model):
        results = replay(small_outcome_log, outcome_model)
        assert len(results) == len(small_outcome_log)
        for res in results:
            assert res.verdict.is_predicted
            assert res.prediction_event_index == 1
            assert res.verdict.label is res.gold
            assert len(res.latencies_ms) == 1

    def test_maybe_has_no_index(self, small_outcome_log, outcome_model):
        strict = RuntimeConfig(min_support=10**6)
        results = replay(small_outcome_log, outcome_model, strict)
        assert all(res.verdict.kind is VerdictKind.MAYBE for res in results)
        assert all(res.prediction_event_index is None for res in results)
        # every evaluation point was tried
        res = results[0]
        assert len(res.latencies_ms) == len(range(1, res.trace_length + 1, 5))

    def test_deterministic(self, small_outcome_log, outcome_model):
        config = RuntimeConfig(min_probability=0.9)
        first = replay(small_outcome_log, outcome_model, config)
        second = replay(small_outcome_log, outcome_model, config, mode="parallel")
        assert [r.verdict for r in first] == [r.verdict for r in second]
        assert [r.case_id for r in first] == [t.case_id for t in small_outcome_log]

    def test_invalid_mode(self, small_outcome_log, outcome_model):
        with pytest.raises(ValueError, match="mode"):
            replay(small_outcome_log, outcome_model, mode="batch")

    @pytest.mark.parametrize("instance", sorted(INSTANCES))
    def test_outcome_decided_at_first_event(self, instance):
        training, testing = temporal_split(outcome_log(n_traces=300, seed=11), 0.8)
        model = train(training, fast_config(instance))
        metrics = compute_metrics(replay(testing, model, RuntimeConfig()))

        assert metrics.accuracy == 1.0
        assert metrics.failure_rate == 0.0
        expected = sum(1 / len(trace) for trace in testing) / len(testing)
        assert metrics.earliness == pytest.approx(expected)

    @pytest.mark.parametrize("seed", range(50))
    def test_gate_monotonicity(self, seed):
        log = outcome_log(n_traces=60, seed=seed)
        training, testing = temporal_split(log, 0.7)
        instance = "mbased_rf" if seed % 2 else "mbased_dt"
        config = fast_config(instance, formula=None, min_leaf=1, seed=seed)
        model = train(training, config, labeler=noisy_labeler)

        def outcomes(runtime):
            results = replay(testing, model, runtime, labeler=noisy_labeler)
            return {r.case_id: r.prediction_event_index for r in results}

        loose = outcomes(RuntimeConfig(min_support=2, min_probability=0.6))
        strict = outcomes(RuntimeConfig(min_support=6, min_probability=0.9))
        for case_id, index in strict.items():
            if index is not None:
                assert loose[case_id] is not None
                assert loose[case_id] <= index


def diagnosis_history():
    # one control flow, the data of ten patients; the patients with painB, d1
    # and p1 recover 2 times out of 3
    rows = (
        [("painA", "d1", "p1", True)] * 2
        + [("painB", "d1", "p1", True)] * 2
        + [("painB", "d1", "p1", False)]
        + [("painB", "d2", "p1", False)] * 3
        + [("painB", "d1", "p2", False)] * 2
    )
    traces = []
    for i, (sym, dia, pre, recovered) in enumerate(rows):
        attributes = {1: {"sym": sym}, 2: {"dia": dia}, 3: {"pre": pre}}
        activities = "M D P R" if recovered else "M D P S"
        start = T0 + timedelta(days=i)
        traces.append(make_trace(f"h{i}", activities, attributes, start))
    schema = {name: AttributeType.TEXT for name in ("sym", "dia", "pre")}
    return EventLog(tuple(traces), schema)


class TestOnTheFly:
    def running(self, sym="painB", dia="d1", pre="p1", activities="M D P"):
        attributes = {1: {"sym": sym}, 2: {"dia": dia}, 3: {"pre": pre}}
        return make_trace("run", activities, attributes)

    def test_leaf_of_the_similar_history(self):
        gate = RuntimeConfig(min_support=6, min_probability=0.6)
        verdict = on_the_fly_predict(
            diagnosis_history(), self.running(), 'F("R")', 1.0, gate
        )
        assert verdict.kind is VerdictKind.DEFERRED
        assert verdict.probability == pytest.approx(0.66, abs=0.01)
        assert verdict.support == 2
        assert verdict.reason == "support 2 < 6"

    def test_uniform_history(self):
        history = make_log(
            [make_trace(f"h{i}", "a b c", {1: {"x": "v"}}) for i in range(10)]
        )
        verdict = on_the_fly_predict(history, history.traces[0].prefix(2), 'F("c")')
        assert verdict.is_predicted
        assert verdict.label is C
        assert verdict.probability == 1.0
        assert verdict.cluster is None

    def test_no_similar_prefix(self):
        verdict = on_the_fly_predict(
            diagnosis_history(), self.running(activities="X Y Z"), 'F("R")'
        )
        assert verdict.kind is VerdictKind.DEFERRED
        assert verdict.reason == "no similar historical prefixes"

    def test_running_prefix_longer_than_history(self):
        running = self.running(activities="M D P R S")
        verdict = on_the_fly_predict(diagnosis_history(), running, 'F("R")')
        assert verdict.reason == "no similar historical prefixes"

    def test_training_set_grows_as_threshold_drops(self, small_outcome_log):
        running = small_outcome_log.traces[0].prefix(6)
        thresholds = [1.0, 0.9, 0.8, 0.6, 0.4, 0.2, 0.0]
        sizes = [
            len(similar_prefixes(small_outcome_log, running, t)) for t in thresholds
        ]
        assert sizes == sorted(sizes)
        assert sizes[0] >= 1
        long_enough = [t for t in small_outcome_log if len(t) >= 6]
        assert sizes[-1] == len(long_enough)

    def test_predictor_agrees_with_function(self, small_outcome_log):
        predictor = OnTheFlyPredictor(small_outcome_log, OK, 0.5)
        for trace in small_outcome_log.traces[:5]:
            running = trace.prefix(6)
            assert predictor.predict(running) == on_the_fly_predict(
                small_outcome_log, running, OK, 0.5
            )
            assert len(predictor.similar_traces(running)) == len(
                similar_prefixes(small_outcome_log, running, 0.5)
            )

    @pytest.mark.parametrize("threshold", [-0.1, 1.5])
    def test_invalid_threshold(self, threshold):
        with pytest.raises(ValueError, match="similarity_threshold"):
            on_the_fly_predict(diagnosis_history(), self.running(), 'F("R")', threshold)

    def test_empty_history(self):
        with pytest.raises(ValueError, match="non-empty history"):
            on_the_fly_predict(EventLog(), self.running(), 'F("R")')

    def test_replay_baseline(self):
        training, testing = temporal_split(outcome_log(n_traces=100, seed=8), 0.8)
        results = replay_baseline(training, testing, OK, 0.0, RuntimeConfig())
        metrics = compute_metrics(results)
        # with the whole history similar the data decides at the first event
        assert metrics.accuracy == 1.0
        assert metrics.failure_rate == 0.0
        assert all(r.prediction_event_index == 1 for r in results)

    @flaky(max_runs=3)
    def test_offline_model_answers_faster(self):
        training, testing = temporal_split(outcome_log(n_traces=400, seed=9), 0.8)
        model = train(training, fast_config("mbased_dt"))
        # a gate nothing passes forces every evaluation point
        gate = RuntimeConfig(min_support=10**6)
        framework = compute_metrics(replay(testing, model, gate))
        baseline = compute_metrics(replay_baseline(training, testing, OK, 0.0, gate))
        assert framework.avg_prediction_time_ms * 10 < baseline.avg_prediction_time_ms
        assert framework.avg_prediction_time_ms <= 50


class TestSweep:
    def logs(self):
        return temporal_split(outcome_log(n_traces=100, seed=10), 0.8)

    def test_grid(self):
        instances = ["mbased_dt", "dbscan_dt"]
        configs = sweep_grid(instances, [3, 5], eps=0.2, k_min=1, k_max=4)
        assert [(c.instance, c.gap) for c in configs] == [
            ("mbased_dt", 3),
            ("mbased_dt", 5),
            ("dbscan_dt", 3),
            ("dbscan_dt", 5),
        ]
        assert configs[0].k_max == 4 and configs[2].eps == 0.2

    def test_cardinality_and_columns(self):
        training, testing = self.logs()
        configs = sweep_grid(["mbased_dt"], [3, 5, 10], formula=OK, k_min=1, k_max=2)
        report = sweep(training, testing, configs, [0.6, 0.7, 0.8, 0.9])
        assert list(report.columns) == REPORT_COLUMNS
        assert len(report) == 12
        assert sorted(set(report["gap"])) == [3, 5, 10]
        assert (report["accuracy"] == 1.0).all()
        assert (report["init_ms"] > 0).all()

    def test_rerun_is_identical(self):
        training, testing = self.logs()
        model = train(training, fast_config("dbscan_dt"))
        first = sweep(training, testing, [model], [0.7, 0.9])
        second = sweep(training, testing, [model], [0.7, 0.9])
        timing = ["init_ms", "processing_ms", "avg_prediction_ms"]
        pd.testing.assert_frame_equal(
            first.drop(columns=timing), second.drop(columns=timing)
        )

    def test_baseline_rows(self):
        training, testing = self.logs()
        model = train(training, fast_config("mbased_dt"))
        report = sweep(
            training,
            testing,
            [model],
            [0.8],
            baseline=True,
            similarity_threshold=0.0,
        )
        assert list(report["instance"]) == ["mbased_dt", BASELINE_INSTANCE]
        baseline = report.iloc[1]
        assert baseline["gap"] == ""
        assert baseline["init_ms"] == 0.0
        assert baseline["accuracy"] == 1.0

    def test_write_report(self):
        training, testing = self.logs()
        model = train(training, fast_config("mbased_dt"))
        buffer = io.StringIO()
        write_report(sweep(training, testing, [model], [0.7]), buffer)
        header, row = buffer.getvalue().splitlines()
        assert header == ",".join(REPORT_COLUMNS)
        assert row.startswith("mbased_dt,5,0.7,")
