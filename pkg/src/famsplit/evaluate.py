"""Scoring: surrogate recall from the matrix, and real prediction evaluation.

The surrogate treats a model trained on a set of families as an aggregate
(mean, max, or min) of the single-family matrix rows; it is what lets a
benchmark's difficulty be validated without training anything.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

from famsplit.errors import MatrixFormatError, PredictionError
from famsplit.manifest import MaterializedSplit
from famsplit.matrix import CrossErrorMatrix
from famsplit.search import BenchmarkSet, SplitSpec

Aggregation = Literal["mean", "max", "min"]

_AGGREGATORS = {"mean": statistics.fmean, "max": max, "min": min}


@dataclass(frozen=True)
class PredictionSet:
    """Maliciousness scores per sample id; hard labels are 0/1 scores."""

    scores: dict[str, float]
    threshold: float = 0.5

    def __post_init__(self) -> None:
        for sample_id, score in self.scores.items():
            if not 0.0 <= score <= 1.0:
                raise PredictionError(f"score {score} for {sample_id!r} outside [0, 1]")
        if not 0.0 <= self.threshold <= 1.0:
            raise PredictionError(f"threshold {self.threshold} outside [0, 1]")


@dataclass(frozen=True)
class EvalResult:
    per_family_recall: dict[str, float]
    benign_accuracy: float
    overall_accuracy: float
    malware_recall_mean: float


def surrogate_recall(
    m: CrossErrorMatrix,
    trained: Iterable[str],
    target: str,
    agg: Aggregation = "mean",
) -> float:
    """Aggregate of M[t][target] over the trained families."""
    if agg not in _AGGREGATORS:
        raise MatrixFormatError(f"unknown aggregation {agg!r}")
    col = m.index_of(target)
    rows = [m.index_of(t) for t in trained]
    if not rows:
        raise MatrixFormatError("trained set must not be empty")
    return float(_AGGREGATORS[agg](m.values[t, col] for t in rows))


@dataclass(frozen=True)
class SplitValidation:
    """Per-test-family surrogate recall of one split, with band violations."""

    split_index: int
    tau: float
    epsilon_final: float
    per_family_recall: dict[str, float]
    mean_recall: float
    flagged_families: tuple[str, ...]


@dataclass(frozen=True)
class BenchmarkValidation:
    difficulty_label: str
    agg: Aggregation
    splits: tuple[SplitValidation, ...]
    mean_recall: float

    @property
    def total_flags(self) -> int:
        return sum(len(s.flagged_families) for s in self.splits)


def validate_split(
    m: CrossErrorMatrix, spec: SplitSpec, split_index: int, agg: Aggregation = "mean"
) -> SplitValidation:
    per_family = {
        v: surrogate_recall(m, spec.train_families, v, agg) for v in spec.test_families
    }
    lo = spec.tau - spec.epsilon_final
    hi = spec.tau + spec.epsilon_final
    flagged = tuple(v for v, r in per_family.items() if not lo <= r <= hi)
    return SplitValidation(
        split_index=split_index,
        tau=spec.tau,
        epsilon_final=spec.epsilon_final,
        per_family_recall=per_family,
        mean_recall=statistics.fmean(per_family.values()),
        flagged_families=flagged,
    )


def validate_benchmark(
    m: CrossErrorMatrix, bench: BenchmarkSet, agg: Aggregation = "mean"
) -> BenchmarkValidation:
    """Surrogate-recall report per split; flags recalls outside the band."""
    splits = tuple(
        validate_split(m, spec, i, agg) for i, spec in enumerate(bench.splits)
    )
    return BenchmarkValidation(
        difficulty_label=bench.difficulty_label,
        agg=agg,
        splits=splits,
        mean_recall=statistics.fmean(s.mean_recall for s in splits),
    )


def evaluate_predictions(ms: MaterializedSplit, preds: PredictionSet) -> EvalResult:
    """Score a materialized split's test records against a prediction set.

    A record counts as flagged malicious when its score is >= the threshold.
    Accuracy is raw accuracy; on these splits the classes are exactly
    balanced, so it coincides with balanced accuracy.
    """
    missing = [r.sample_id for r in ms.test if r.sample_id not in preds.scores]
    if missing:
        shown = ", ".join(missing[:10])
        more = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        raise PredictionError(f"missing predictions for {len(missing)} ids: {shown}{more}")
    family_total: dict[str, int] = {}
    family_hit: dict[str, int] = {}
    benign_total = 0
    benign_correct = 0
    correct = 0
    for record in ms.test:
        flagged = preds.scores[record.sample_id] >= preds.threshold
        if record.label == "malicious":
            family = record.family or ""
            family_total[family] = family_total.get(family, 0) + 1
            if flagged:
                family_hit[family] = family_hit.get(family, 0) + 1
                correct += 1
        else:
            benign_total += 1
            if not flagged:
                benign_correct += 1
                correct += 1
    per_family = {
        family: family_hit.get(family, 0) / total for family, total in family_total.items()
    }
    return EvalResult(
        per_family_recall=per_family,
        benign_accuracy=benign_correct / benign_total if benign_total else 0.0,
        overall_accuracy=correct / len(ms.test) if ms.test else 0.0,
        malware_recall_mean=statistics.fmean(per_family.values()) if per_family else 0.0,
    )


def load_predictions(path: str | Path, threshold: float = 0.5) -> PredictionSet:
    """Read a tab-separated "sample_id<TAB>score" file."""
    scores: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise PredictionError(f"{path}: line {lineno}: expected 2 fields, got {len(parts)}")
        try:
            scores[parts[0]] = float(parts[1])
        except ValueError:
            raise PredictionError(f"{path}: line {lineno}: bad score {parts[1]!r}") from None
    return PredictionSet(scores=scores, threshold=threshold)
