"""Deterministic tabular dataset generation from problem specs.

Sampling follows each variable's declared distribution: log-uniform draws a
magnitude whose base-10 logarithm is uniform, then applies the sign
constraint (an unconstrained variable gets a random sign, so physically
signed quantities are not silently positive-only); uniform draws directly;
integer classes round to the nearest integer. Rows that violate a constraint
after rounding or make the true formula fault (division by zero, log of a
non-positive, overflow) are rejected and redrawn, so emitted datasets are
fault-free. Everything is deterministic given (spec, n, seed).

On-disk format: one row per line, whitespace-separated doubles in shortest
round-trip form, sampled variables in spec order with the target last. A
problem directory holds train.txt / val.txt / test.txt plus true_eq.txt
(line 1: the true skeleton in preorder tokens; line 2: its constant values
in display order, possibly empty).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .catalog import ProblemSpec
from .expr import (
    Expression,
    constant_values,
    evaluate_many,
    from_preorder,
    skeleton_with_constants,
    to_preorder,
)
from .expr.skeleton import SkeletonTree

DEFAULT_ROWS = 10_000
DEFAULT_RATIOS = (0.8, 0.1, 0.1)

# Rejection sampling gives up when acceptance stays below 1% after this many
# multiples of the requested row count.
_INFEASIBLE_FACTOR = 50
_MIN_PROBE = 20_000


class DataError(ValueError):
    """Malformed dataset file or invalid generation request."""


class SamplingInfeasibleError(DataError):
    """Rejection rate exceeded 99% over the probe window."""


@dataclass
class Dataset:
    problem_id: str
    column_names: list[str]
    values: np.ndarray  # (n, k+1); last column is the target
    split: str = "all"
    seed: int | None = None
    noise_level: float = 0.0

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def X(self) -> np.ndarray:
        return self.values[:, :-1]

    @property
    def y(self) -> np.ndarray:
        return self.values[:, -1]


def derive_seed(master_seed: int, problem_id: str) -> np.random.SeedSequence:
    """Independent per-problem stream: parallel generation over problems can
    never change any problem's bytes."""
    return np.random.SeedSequence([int(master_seed), zlib.crc32(problem_id.encode("utf-8"))])


def _rng_from(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _draw_columns(spec: ProblemSpec, rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
    """One batch of candidate rows plus a per-row constraint-violation mask."""
    columns = []
    violated = np.zeros(count, dtype=bool)
    for var in spec.sampled_variables:
        dist = var.dist
        if dist.kind == "loguniform":
            exponents = rng.uniform(np.log10(dist.lo), np.log10(dist.hi), count)
            values = np.power(10.0, exponents)
            if var.sign == "negative":
                values = -values
            elif var.sign == "any":
                values = values * (rng.integers(0, 2, count) * 2.0 - 1.0)
        else:
            values = rng.uniform(dist.lo, dist.hi, count)
        if var.value_class in ("integer", "wide_integer"):
            values = np.rint(values)
        if var.sign == "positive":
            violated |= values <= 0.0
        elif var.sign == "negative":
            violated |= values >= 0.0
        elif var.sign == "nonnegative":
            violated |= values < 0.0
        columns.append(values)
    X = np.column_stack(columns) if columns else np.empty((count, 0))
    return X, violated


def sample(spec: ProblemSpec, n: int, seed) -> Dataset:
    """Draw ``n`` fault-free rows and their targets from the spec."""
    if n < 1:
        raise DataError(f"row count must be >= 1, got {n}")
    rng = _rng_from(seed)
    expr = spec.canonical_expression
    chunks: list[np.ndarray] = []
    accepted = 0
    drawn = 0
    while accepted < n:
        batch = max(2 * (n - accepted), 1024)
        X, violated = _draw_columns(spec, rng, batch)
        y, faulted = evaluate_many(expr, X)
        keep = ~(violated | faulted)
        good = np.column_stack([X[keep], y[keep]])
        chunks.append(good)
        accepted += good.shape[0]
        drawn += batch
        if drawn >= max(_MIN_PROBE, _INFEASIBLE_FACTOR * n) and accepted < 0.01 * drawn:
            raise SamplingInfeasibleError(
                f"{spec.id}: rejection rate above 99% ({accepted}/{drawn} accepted)"
            )
    values = np.concatenate(chunks, axis=0)[:n]
    seed_tag = seed if isinstance(seed, int) else None
    return Dataset(
        problem_id=spec.id,
        column_names=list(spec.column_names),
        values=values,
        split="all",
        seed=seed_tag,
    )


def split(ds: Dataset, ratios=DEFAULT_RATIOS) -> tuple[Dataset, Dataset, Dataset]:
    """Disjoint, covering, order-preserving train/val/test partition."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise DataError(f"need three positive ratios, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"ratios must sum to 1, got {sum(ratios)!r}")
    n = ds.n_rows
    n_train = int(n * ratios[0])
    n_val = int(n * ratios[1])
    bounds = (0, n_train, n_train + n_val, n)
    parts = []
    for tag, lo, hi in zip(("train", "val", "test"), bounds, bounds[1:]):
        parts.append(replace(ds, values=ds.values[lo:hi].copy(), split=tag))
    return tuple(parts)


def inject_noise(ds: Dataset, gamma: float, seed, mode: str = "mean") -> Dataset:
    """Add Gaussian noise to the target column.

    The noise scale is ``gamma * sqrt(|mean(y)|)``. Targets are signed, so
    the mean is run through ``abs`` before the square root; ``mode="rms"``
    switches the inner statistic to the mean square. ``gamma=0`` returns
    bit-identical targets.
    """
    if gamma < 0:
        raise DataError(f"noise level must be >= 0, got {gamma}")
    values = ds.values.copy()
    if gamma > 0:
        if mode == "mean":
            scale = gamma * np.sqrt(np.abs(values[:, -1].mean()))
        elif mode == "rms":
            scale = gamma * np.sqrt(np.mean(values[:, -1] ** 2))
        else:
            raise DataError(f"unknown noise mode {mode!r}")
        rng = _rng_from(seed)
        values[:, -1] = values[:, -1] + rng.normal(0.0, scale, values.shape[0])
    return replace(ds, values=values, noise_level=gamma)


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def write(ds: Dataset, path) -> None:
    lines = []
    for row in ds.values:
        lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read(path, problem_id: str | None = None, column_names: list[str] | None = None,
         split: str = "all") -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise DataError(f"{path}: non-numeric value on line {lineno}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(
                f"{path}: expected {width} columns, found {len(row)} on line {lineno}"
            )
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    if column_names is None:
        column_names = [f"x{i + 1}" for i in range(width - 1)] + ["target"]
    return Dataset(
        problem_id=problem_id or Path(path).parent.name,
        column_names=column_names,
        values=np.array(rows, dtype=np.float64),
        split=split,
    )


def write_true_equation(spec: ProblemSpec, path) -> None:
    tokens = to_preorder(spec.skeleton)
    consts = constant_values(spec.canonical_expression)
    text = " ".join(tokens) + "\n" + " ".join(repr(float(c)) for c in consts) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def read_true_equation(path) -> tuple[SkeletonTree, list[float], Expression]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError(f"{path}: empty true-equation file")
    tree = from_preorder(lines[0].split())
    consts = [float(tok) for tok in lines[1].split()] if len(lines) > 1 else []
    return tree, consts, skeleton_with_constants(tree, consts)


def write_problem_dir(
    spec: ProblemSpec,
    root,
    rows: int = DEFAULT_ROWS,
    seed=0,
    noise_level: float = 0.0,
    ratios=DEFAULT_RATIOS,
    noise_mode: str = "mean",
) -> dict:
    """Generate and write one problem directory; returns a manifest entry."""
    problem_seed = derive_seed(seed, spec.id) if isinstance(seed, int) else seed
    ds = sample(spec, rows, problem_seed)
    if noise_level > 0:
        noise_seed = np.random.SeedSequence(
            [int(seed) if isinstance(seed, int) else 0,
             zlib.crc32(spec.id.encode("utf-8")), 0x5E],
        )
        ds = inject_noise(ds, noise_level, noise_seed, mode=noise_mode)
    train, val, test = split(ds, ratios)
    out = Path(root) / spec.id
    out.mkdir(parents=True, exist_ok=True)
    for part, name in ((train, "train.txt"), (val, "val.txt"), (test, "test.txt")):
        write(part, out / name)
    write_true_equation(spec, out / "true_eq.txt")
    return {
        "id": spec.id,
        "set": spec.set_name,
        "rows": rows,
        "noise_level": noise_level,
        "columns": spec.column_names,
        "splits": {"train": train.n_rows, "val": val.n_rows, "test": test.n_rows},
    }
