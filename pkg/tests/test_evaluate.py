from __future__ import annotations

import numpy as np
import pytest

from famsplit.errors import MatrixFormatError, PredictionError
from famsplit.evaluate import (
    PredictionSet,
    evaluate_predictions,
    load_predictions,
    surrogate_recall,
    validate_benchmark,
)
from famsplit.manifest import MaterializedSplit, SampleRecord
from famsplit.search import SearchConfig, generate_benchmark

from conftest import constant_matrix, make_matrix


def test_surrogate_singleton_is_the_matrix_entry() -> None:
    m = make_matrix([[1.0, 0.3], [0.8, 1.0]])
    for agg in ("mean", "max", "min"):
        assert surrogate_recall(m, ["fam00"], "fam01", agg) == pytest.approx(0.3)


def test_surrogate_constant_matrix() -> None:
    m = constant_matrix(5, 0.45, diag=0.45)
    assert surrogate_recall(m, list(m.families[:3]), "fam04") == pytest.approx(0.45)


def test_surrogate_two_element_aggregations() -> None:
    grid = [
        [1.0, 0.0, 0.2],
        [0.0, 1.0, 0.8],
        [0.0, 0.0, 1.0],
    ]
    m = make_matrix(grid, families=("a", "b", "c"))
    assert surrogate_recall(m, ["a", "b"], "c", "mean") == pytest.approx(0.5)
    assert surrogate_recall(m, ["a", "b"], "c", "max") == pytest.approx(0.8)
    assert surrogate_recall(m, ["a", "b"], "c", "min") == pytest.approx(0.2)


def test_surrogate_rejects_bad_inputs() -> None:
    m = constant_matrix(3, 0.5)
    with pytest.raises(MatrixFormatError):
        surrogate_recall(m, [], "fam00")
    with pytest.raises(MatrixFormatError):
        surrogate_recall(m, ["fam00"], "ghost")
    with pytest.raises(MatrixFormatError):
        surrogate_recall(m, ["fam00"], "fam01", "median")


def test_aggregation_ordering_property() -> None:
    rng = np.random.default_rng(17)
    grid = rng.uniform(0.0, 1.0, (8, 8))
    m = make_matrix(grid)
    trained = list(m.families[:4])
    for target in m.families[4:]:
        lo = surrogate_recall(m, trained, target, "min")
        mid = surrogate_recall(m, trained, target, "mean")
        hi = surrogate_recall(m, trained, target, "max")
        assert lo <= mid <= hi


def test_validate_constant_matrix_benchmark_is_flag_free() -> None:
    m = constant_matrix(20, 0.5)
    bench = generate_benchmark(m, SearchConfig(tau=0.5, seed=1), n_splits=5)
    for agg in ("mean", "max", "min"):
        validation = validate_benchmark(m, bench, agg)
        assert validation.total_flags == 0
        for split in validation.splits:
            assert all(v == pytest.approx(0.5) for v in split.per_family_recall.values())


def test_validate_any_valid_benchmark_is_flag_free(paper_matrix) -> None:
    # Band closure: each cross entry sits in the band, and mean/max/min of
    # in-band values stay in band.
    for tau in (0.9, 0.25):
        bench = generate_benchmark(paper_matrix, SearchConfig(tau=tau, seed=13), n_splits=5)
        for agg in ("mean", "max", "min"):
            validation = validate_benchmark(paper_matrix, bench, agg)
            assert validation.total_flags == 0
            lo = tau - max(s.epsilon_final for s in bench.splits)
            hi = tau + max(s.epsilon_final for s in bench.splits)
            for split in validation.splits:
                assert lo <= split.mean_recall <= hi


def test_difficulty_tiers_are_strictly_ordered(paper_matrix) -> None:
    means = {}
    eps = {}
    for tau in (0.9, 0.5, 0.25):
        bench = generate_benchmark(paper_matrix, SearchConfig(tau=tau, seed=7), n_splits=10)
        validation = validate_benchmark(paper_matrix, bench, "mean")
        means[tau] = validation.mean_recall
        eps[tau] = max(s.epsilon_final for s in bench.splits)
    assert means[0.9] > means[0.5] > means[0.25]
    assert means[0.9] - means[0.5] >= 0.4 - eps[0.9] - eps[0.5]
    assert means[0.5] - means[0.25] >= 0.25 - eps[0.5] - eps[0.25]


def toy_split():
    train = [
        SampleRecord("m1", "malicious", "alpha"),
        SampleRecord("m2", "malicious", "alpha"),
        SampleRecord("b1", "benign", None),
        SampleRecord("b2", "benign", None),
    ]
    test = [
        SampleRecord("t1", "malicious", "beta"),
        SampleRecord("t2", "malicious", "beta"),
        SampleRecord("t3", "malicious", "gamma"),
        SampleRecord("t4", "malicious", "gamma"),
        SampleRecord("u1", "benign", None),
        SampleRecord("u2", "benign", None),
        SampleRecord("u3", "benign", None),
        SampleRecord("u4", "benign", None),
    ]
    counts = {"train_total": 4, "test_total": 8}
    return MaterializedSplit("toy", tuple(train), tuple(test), counts)


def test_perfect_predictor_scores_one_everywhere() -> None:
    ms = toy_split()
    scores = {r.sample_id: (1.0 if r.label == "malicious" else 0.0) for r in ms.test}
    result = evaluate_predictions(ms, PredictionSet(scores))
    assert result.overall_accuracy == 1.0
    assert result.benign_accuracy == 1.0
    assert result.malware_recall_mean == 1.0
    assert result.per_family_recall == {"beta": 1.0, "gamma": 1.0}


def test_constant_alarm_predictor_hits_the_failure_mode() -> None:
    ms = toy_split()
    result = evaluate_predictions(ms, PredictionSet({r.sample_id: 1.0 for r in ms.test}))
    assert result.malware_recall_mean == 1.0
    assert result.benign_accuracy == 0.0
    assert result.overall_accuracy == 0.5


def test_toy_split_with_two_errors_matches_hand_confusion() -> None:
    ms = toy_split()
    # Hand confusion over the 8 test records: t2 and u3 are wrong, so
    # 6 correct / 8 = 0.75; beta recall 1/2, gamma 2/2; benign 3/4.
    scores = {
        "t1": 1.0,
        "t2": 0.2,
        "t3": 0.9,
        "t4": 0.6,
        "u1": 0.1,
        "u2": 0.4,
        "u3": 0.7,
        "u4": 0.0,
    }
    result = evaluate_predictions(ms, PredictionSet(scores))
    assert result.overall_accuracy == pytest.approx(0.75)
    assert result.per_family_recall == {"beta": 0.5, "gamma": 1.0}
    assert result.benign_accuracy == pytest.approx(0.75)
    assert result.malware_recall_mean == pytest.approx(0.75)


def test_overall_accuracy_matches_independent_recount() -> None:
    import random

    ms = toy_split()
    rng = random.Random(13)
    scores = {r.sample_id: rng.random() for r in ms.test}
    preds = PredictionSet(scores, threshold=0.5)
    result = evaluate_predictions(ms, preds)
    correct = 0
    for r in ms.test:
        predicted_malicious = scores[r.sample_id] >= 0.5
        actually_malicious = r.label == "malicious"
        if predicted_malicious == actually_malicious:
            correct += 1
    assert result.overall_accuracy == correct / len(ms.test)


def test_missing_predictions_are_reported_by_id() -> None:
    ms = toy_split()
    scores = {r.sample_id: 1.0 for r in ms.test if r.sample_id != "t3"}
    with pytest.raises(PredictionError) as err:
        evaluate_predictions(ms, PredictionSet(scores))
    assert "t3" in str(err.value)


def test_scores_outside_unit_interval_are_rejected() -> None:
    with pytest.raises(PredictionError):
        PredictionSet({"x": 1.5})
    with pytest.raises(PredictionError):
        PredictionSet({"x": -0.1})


def test_prediction_file_round_trip(tmp_path) -> None:
    path = tmp_path / "preds.tsv"
    path.write_text("a\t0.25\nb\t1.0\n")
    preds = load_predictions(path, threshold=0.4)
    assert preds.scores == {"a": 0.25, "b": 1.0}
    assert preds.threshold == 0.4
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tnot-a-number\n")
    with pytest.raises(PredictionError):
        load_predictions(bad)
