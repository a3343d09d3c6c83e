"""IEEE-754 double evaluation of expression trees.

Two evaluators with the same fault semantics:

* :func:`evaluate` - scalar, raises :class:`DomainFault` carrying the path of
  the offending subexpression.
* :func:`evaluate_many` - numpy row-batch evaluation; faulting rows are
  reported in a boolean mask instead of raising. A row faults if any node in
  the tree produces a non-finite value for it.

Faults cover log of a non-positive, 0 raised to a negative power, a negative
base with a fractional exponent, division by zero, and overflow to infinity:
evaluation never returns NaN or infinity silently.
"""

from __future__ import annotations

import math

import numpy as np

from .nodes import Expression


class DomainFault(ArithmeticError):
    """Evaluation left the operator's domain at ``path`` (child-index route)."""

    def __init__(self, message: str, path: tuple[int, ...]):
        super().__init__(f"{message} at path {path}")
        self.path = path


def evaluate(expr: Expression, row) -> float:
    """Evaluate at one point; ``row[i]`` supplies variable ``i``."""
    return _eval(expr, row, ())


def _eval(expr: Expression, row, path) -> float:
    if expr.is_constant:
        return expr.value
    if expr.is_variable:
        if expr.index >= len(row):
            raise DomainFault(f"row too short for variable index {expr.index}", path)
        return float(row[expr.index])

    args = [_eval(c, row, path + (i,)) for i, c in enumerate(expr.children)]
    op = expr.op
    try:
        if op == "add":
            out = 0.0
            for a in args:
                out += a
        elif op == "mul":
            out = 1.0
            for a in args:
                out *= a
        elif op == "pow":
            base, exponent = args
            if base == 0.0 and exponent < 0.0:
                raise DomainFault("zero raised to a negative power", path)
            out = math.pow(base, exponent)
        elif op == "div":
            if args[1] == 0.0:
                raise DomainFault("division by zero", path)
            out = args[0] / args[1]
        elif op == "neg":
            out = -args[0]
        elif op == "log":
            if args[0] <= 0.0:
                raise DomainFault("log of a non-positive value", path)
            out = math.log(args[0])
        elif op == "sqrt":
            if args[0] < 0.0:
                raise DomainFault("sqrt of a negative value", path)
            out = math.sqrt(args[0])
        elif op == "exp":
            out = math.exp(args[0])
        elif op == "sin":
            out = math.sin(args[0])
        elif op == "cos":
            out = math.cos(args[0])
        elif op == "tan":
            out = math.tan(args[0])
        elif op == "tanh":
            out = math.tanh(args[0])
        elif op == "abs":
            out = abs(args[0])
        else:  # pragma: no cover - nodes.py rejects unknown operators
            raise AssertionError(op)
    except OverflowError:
        raise DomainFault("overflow", path) from None
    except ValueError:
        raise DomainFault("argument outside operator domain", path) from None

    if not math.isfinite(out):
        raise DomainFault("non-finite result", path)
    return out


def evaluate_many(expr: Expression, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate over all rows of ``X`` (shape (n, k)).

    Returns ``(values, fault_mask)``. ``values`` is meaningful only where
    ``fault_mask`` is False.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-dimensional")
    bad = np.zeros(X.shape[0], dtype=bool)
    with np.errstate(all="ignore"):
        values = _eval_many(expr, X, bad)
    bad |= ~np.isfinite(values)
    return values, bad


def _eval_many(expr: Expression, X: np.ndarray, bad: np.ndarray) -> np.ndarray:
    if expr.is_constant:
        return np.full(X.shape[0], expr.value)
    if expr.is_variable:
        if expr.index >= X.shape[1]:
            raise ValueError(f"matrix too narrow for variable index {expr.index}")
        return X[:, expr.index].copy()

    args = [_eval_many(c, X, bad) for c in expr.children]
    op = expr.op
    if op == "add":
        out = args[0]
        for a in args[1:]:
            out = out + a
    elif op == "mul":
        out = args[0]
        for a in args[1:]:
            out = out * a
    elif op == "pow":
        out = np.power(args[0], args[1])
    elif op == "div":
        out = args[0] / args[1]
    elif op == "neg":
        out = -args[0]
    elif op == "log":
        out = np.log(args[0])
    elif op == "sqrt":
        out = np.sqrt(args[0])
    elif op == "exp":
        out = np.exp(args[0])
    elif op == "sin":
        out = np.sin(args[0])
    elif op == "cos":
        out = np.cos(args[0])
    elif op == "tan":
        out = np.tan(args[0])
    elif op == "tanh":
        out = np.tanh(args[0])
    elif op == "abs":
        out = np.abs(args[0])
    else:  # pragma: no cover
        raise AssertionError(op)

    # Flag intermediate blow-ups too, so a later operation cannot launder an
    # overflow back into a finite value (e.g. 1/exp(1000)).
    bad |= ~np.isfinite(out)
    return out
