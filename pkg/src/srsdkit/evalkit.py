"""Scoring: R-squared accuracy, symbolic solution detection, relative-error
model selection, normalized edit distance aggregation, and report assembly.

R-squared here is the standard coefficient of determination
``1 - SSE/SST``; a prediction that faults anywhere on the test rows scores
``-inf`` rather than having its failures masked. Symbolic solution detection
is syntactic: the prediction counts as a solution when the canonicalized
difference reduces to a constant or the canonicalized ratio reduces to a
nonzero constant, so the verdict is deterministic and independent of any
fitted tolerance (with the usual caveat that detection is only as strong as
the canonicalizer's rewrite rules; an undecided case reports False).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import BUILTIN_SETS, ProblemSpec
from .datagen import Dataset
from .expr import (
    Expression,
    canonicalize,
    div,
    evaluate_many,
    neg,
    op_node,
    skeletonize,
)
from .treedist import distance_result

TINY_TARGET = 1e-300  # rows with |y| below this are skipped by Eq-style relative error
DEFAULT_TAU = 0.999


class ZeroVarianceError(ValueError):
    """R-squared is undefined when the targets are all identical."""


class NoViableCandidateError(ValueError):
    """Every candidate scored infinitely badly on the validation rows."""


@dataclass
class EvalReport:
    problem_id: str
    set_name: str
    r_squared: float
    accuracy_hit: bool
    symbolic_solution: bool
    edit_distance: float
    normalized_edit_distance: float
    selection_score: float | None = None


@dataclass(frozen=True)
class SetSummary:
    count: int
    accuracy_rate: float
    solution_rate: float
    mean_normalized_edit_distance: float


@dataclass(frozen=True)
class BenchmarkSummary:
    per_set: dict[str, SetSummary]


def r_squared(predictions, targets) -> float:
    """Standard coefficient of determination, 1 - SSE/SST."""
    preds = np.asarray(predictions, dtype=np.float64)
    ys = np.asarray(targets, dtype=np.float64)
    if preds.shape != ys.shape or preds.ndim != 1 or preds.size == 0:
        raise ValueError("predictions and targets must be equal-length nonempty vectors")
    sst = float(np.sum((ys - ys.mean()) ** 2))
    if sst == 0.0:
        raise ZeroVarianceError("targets are all identical; R^2 is undefined")
    sse = float(np.sum((preds - ys) ** 2))
    return 1.0 - sse / sst


def accuracy_rate(reports: list[EvalReport], tau: float = DEFAULT_TAU) -> float:
    if not reports:
        raise ValueError("no reports to aggregate")
    return sum(r.r_squared > tau for r in reports) / len(reports)


def solution_rate(reports: list[EvalReport]) -> float:
    if not reports:
        raise ValueError("no reports to aggregate")
    return sum(r.symbolic_solution for r in reports) / len(reports)


def is_symbolic_solution(pred: Expression, truth: Expression) -> bool:
    """True when pred differs from truth by an additive constant or a nonzero
    multiplicative scalar, as decided by the canonical rewrite rules."""
    difference = canonicalize(op_node("add", pred, neg(truth)))
    if difference.is_constant:
        return True
    ratio = canonicalize(div(pred, truth))
    return ratio.is_constant and ratio.value != 0.0


def relative_error_score(expr: Expression, X: np.ndarray, y: np.ndarray) -> float:
    """Mean squared relative error, skipping near-zero targets and faulting
    rows; infinity when over half the rows fault or nothing is scorable."""
    values, faulted = evaluate_many(expr, X)
    if faulted.mean() > 0.5:
        return math.inf
    usable = (~faulted) & (np.abs(y) >= TINY_TARGET)
    if not usable.any():
        return math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = (values[usable] - y[usable]) / y[usable]
        score = float(np.mean(np.abs(ratio) ** 2))
    return math.inf if math.isnan(score) else score


def select_best(candidates: list[Expression], validation: Dataset) -> Expression:
    """Pick the candidate minimizing the relative-error score on validation
    rows; ties break by smaller skeleton, then by input order."""
    if not candidates:
        raise ValueError("no candidates to select from")
    if validation.n_rows == 0:
        raise ValueError("validation dataset is empty")
    best = None
    for position, candidate in enumerate(candidates):
        score = relative_error_score(candidate, validation.X, validation.y)
        size = skeletonize(canonicalize(candidate)).node_count()
        key = (score, size, position)
        if best is None or key < best[0]:
            best = (key, candidate)
    if math.isinf(best[0][0]):
        raise NoViableCandidateError("all candidates scored +inf on the validation rows")
    return best[1]


def evaluate_against(
    pred: Expression,
    truth: Expression,
    test: Dataset,
    problem_id: str,
    set_name: str = "unknown",
    tau: float = DEFAULT_TAU,
    validation: Dataset | None = None,
) -> EvalReport:
    """Score a prediction against an explicit truth expression."""
    pred_canonical = canonicalize(pred)
    truth_canonical = canonicalize(truth)
    dist = distance_result(skeletonize(pred_canonical), skeletonize(truth_canonical))
    values, faulted = evaluate_many(pred_canonical, test.X)
    if faulted.any():
        score = -math.inf  # faults on test rows are not masked
    else:
        score = r_squared(values, test.y)
    return EvalReport(
        problem_id=problem_id,
        set_name=set_name,
        r_squared=score,
        accuracy_hit=score > tau,
        symbolic_solution=is_symbolic_solution(pred, truth_canonical),
        edit_distance=dist.raw,
        normalized_edit_distance=dist.normalized,
        selection_score=(
            relative_error_score(pred_canonical, validation.X, validation.y)
            if validation is not None
            else None
        ),
    )


def evaluate_problem(
    pred: Expression,
    spec: ProblemSpec,
    test: Dataset,
    tau: float = DEFAULT_TAU,
    validation: Dataset | None = None,
) -> EvalReport:
    return evaluate_against(
        pred,
        spec.canonical_expression,
        test,
        problem_id=spec.id,
        set_name=spec.set_name,
        tau=tau,
        validation=validation,
    )


def summarize(reports: list[EvalReport]) -> BenchmarkSummary:
    if not reports:
        raise ValueError("cannot summarize an empty report list")
    per_set: dict[str, SetSummary] = {}
    names = [s for s in BUILTIN_SETS if any(r.set_name == s for r in reports)]
    names += sorted({r.set_name for r in reports} - set(BUILTIN_SETS))
    for name in names:
        group = [r for r in reports if r.set_name == name]
        per_set[name] = SetSummary(
            count=len(group),
            accuracy_rate=accuracy_rate(group),
            solution_rate=solution_rate(group),
            mean_normalized_edit_distance=(
                sum(r.normalized_edit_distance for r in group) / len(group)
            ),
        )
    return BenchmarkSummary(per_set=per_set)


def _json_float(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return x


def report_payload(reports: list[EvalReport], summary: BenchmarkSummary | None = None) -> dict:
    """JSON-ready document with a stable ordering for diffability."""
    problems = [
        {
            "id": r.problem_id,
            "set": r.set_name,
            "r_squared": _json_float(r.r_squared),
            "accuracy_hit": r.accuracy_hit,
            "symbolic_solution": r.symbolic_solution,
            "edit_distance": r.edit_distance,
            "normalized_edit_distance": r.normalized_edit_distance,
            "selection_score": _json_float(r.selection_score),
        }
        for r in sorted(reports, key=lambda r: r.problem_id)
    ]
    payload: dict = {"problems": problems}
    if summary is not None:
        payload["summary"] = {
            name: {
                "count": s.count,
                "accuracy_rate": s.accuracy_rate,
                "solution_rate": s.solution_rate,
                "mean_normalized_edit_distance": s.mean_normalized_edit_distance,
            }
            for name, s in summary.per_set.items()
        }
    return payload
