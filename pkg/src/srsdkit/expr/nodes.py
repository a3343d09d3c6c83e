"""Expression trees: n-ary operator nodes over numeric constants and indexed variables.

Trees are immutable. ``add`` and ``mul`` are n-ary, ``pow`` is binary, the
function operators are unary. ``div``, ``neg`` and ``sqrt`` may appear in raw
(parsed or evolved) trees but are rewritten away by canonicalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


# Operators allowed in canonical trees, in canonical rank order. The order is
# load-bearing: commutative operands are sorted by it.
CANONICAL_OPERATORS = ("add", "mul", "pow", "sin", "cos", "tan", "tanh", "exp", "log", "abs")

# Rewritten away by canonicalization; legal only in raw trees.
INTERNAL_OPERATORS = ("div", "neg", "sqrt")

ALL_OPERATORS = CANONICAL_OPERATORS + INTERNAL_OPERATORS

UNARY_OPERATORS = ("sin", "cos", "tan", "tanh", "exp", "log", "abs", "sqrt", "neg")

_OP_RANK = {name: i for i, name in enumerate(ALL_OPERATORS)}

# Relative tolerance for treating two stored constants as the same value
# (absorbs decimal-literal round-trip noise).
CONST_REL_TOL = 1e-12


class ExpressionError(ValueError):
    """Malformed expression tree."""


@dataclass(frozen=True)
class Expression:
    """One node of an expression tree.

    Exactly one of the three kinds:
      * operator: ``op`` set, ``children`` nonempty
      * constant: ``value`` set (finite)
      * variable: ``index`` set (zero-based column index)
    """

    op: str | None = None
    value: float | None = None
    index: int | None = None
    children: tuple["Expression", ...] = field(default=())

    def __post_init__(self):
        kinds = sum(x is not None for x in (self.op, self.value, self.index))
        if kinds != 1:
            raise ExpressionError("node must be exactly one of operator/constant/variable")
        if self.op is not None:
            if self.op not in ALL_OPERATORS:
                raise ExpressionError(f"unknown operator {self.op!r}")
            n = len(self.children)
            if self.op in UNARY_OPERATORS and n != 1:
                raise ExpressionError(f"{self.op} takes 1 argument, got {n}")
            if self.op in ("pow", "div") and n != 2:
                raise ExpressionError(f"{self.op} takes 2 arguments, got {n}")
            if self.op in ("add", "mul") and n < 2:
                raise ExpressionError(f"{self.op} needs at least 2 operands, got {n}")
        elif self.value is not None:
            if not math.isfinite(self.value):
                raise ExpressionError(f"non-finite constant {self.value!r}")
            if self.children:
                raise ExpressionError("constant cannot have children")
        else:
            if self.index < 0:
                raise ExpressionError(f"negative variable index {self.index}")
            if self.children:
                raise ExpressionError("variable cannot have children")

    @property
    def is_operator(self) -> bool:
        return self.op is not None

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    @property
    def is_variable(self) -> bool:
        return self.index is not None

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def depth(self) -> int:
        """Number of levels; a leaf has depth 1."""
        if not self.children:
            return 1
        return 1 + max(c.depth() for c in self.children)

    def variables(self) -> set[int]:
        """Set of variable indices occurring in the tree."""
        if self.is_variable:
            return {self.index}
        out: set[int] = set()
        for c in self.children:
            out |= c.variables()
        return out

    def subtree(self, path: tuple[int, ...]) -> "Expression":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def __repr__(self):
        if self.is_constant:
            return f"const({self.value!r})"
        if self.is_variable:
            return f"var({self.index})"
        return f"{self.op}({', '.join(repr(c) for c in self.children)})"


def const(value: float) -> Expression:
    return Expression(value=float(value))


def var(index: int) -> Expression:
    return Expression(index=index)


def op_node(name: str, *children: Expression) -> Expression:
    return Expression(op=name, children=tuple(children))


def add(*children: Expression) -> Expression:
    return op_node("add", *children)


def mul(*children: Expression) -> Expression:
    return op_node("mul", *children)


def pow_(base: Expression, exponent: Expression) -> Expression:
    return op_node("pow", base, exponent)


def div(num: Expression, den: Expression) -> Expression:
    return op_node("div", num, den)


def neg(x: Expression) -> Expression:
    return op_node("neg", x)


def same_constant(a: float, b: float, rel_tol: float = CONST_REL_TOL) -> bool:
    """Constant equality used during folding and grouping."""
    return a == b or math.isclose(a, b, rel_tol=rel_tol, abs_tol=0.0)


def structurally_equal(a: Expression, b: Expression) -> bool:
    """Structural equality with constants compared by ``same_constant``."""
    if a.is_constant:
        return b.is_constant and same_constant(a.value, b.value)
    if a.is_variable:
        return b.is_variable and a.index == b.index
    if not b.is_operator or a.op != b.op or len(a.children) != len(b.children):
        return False
    return all(structurally_equal(x, y) for x, y in zip(a.children, b.children))


def compare(a: Expression, b: Expression) -> int:
    """Total order on trees: operators < constants < variables, then by
    operator rank / value / index, then recursively on children.

    Constants order by exact value so that sorting never depends on the
    input order; the folding tolerance applies only to equality grouping.
    """
    ka = 0 if a.is_operator else (1 if a.is_constant else 2)
    kb = 0 if b.is_operator else (1 if b.is_constant else 2)
    if ka != kb:
        return -1 if ka < kb else 1
    if ka == 1:
        if a.value == b.value:
            return 0
        return -1 if a.value < b.value else 1
    if ka == 2:
        return (a.index > b.index) - (a.index < b.index)
    ra, rb = _OP_RANK[a.op], _OP_RANK[b.op]
    if ra != rb:
        return -1 if ra < rb else 1
    if len(a.children) != len(b.children):
        return -1 if len(a.children) < len(b.children) else 1
    for x, y in zip(a.children, b.children):
        c = compare(x, y)
        if c != 0:
            return c
    return 0
