"""Skeleton trees and preorder token serialization.

A skeleton is an ordered labeled tree in which every numeric constant has
been collapsed to a ``C`` node and variable ``i`` to ``X{i+1}``. Constants
carry a display index (C1, C2, ... in preorder encounter order) that is
cosmetic only: all ``C`` nodes share the label ``"C"``.

Preorder token text format (whitespace separated, one expression per line):
``add``/``mul`` carry an explicit arity suffix (``add3``, ``mul2``) so that
sequences decode unambiguously by arity counting; all other operators have
fixed arity. Constants serialize as ``C`` in skeletons, or as a decimal
literal when a valued expression is written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .nodes import CANONICAL_OPERATORS, Expression, UNARY_OPERATORS, const, op_node, var


class DecodeError(ValueError):
    """Token sequence does not decode to exactly one tree."""


@dataclass(frozen=True)
class SkeletonTree:
    label: str
    children: tuple["SkeletonTree", ...] = field(default=())
    display_index: int | None = None

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def __repr__(self):
        name = f"{self.label}{self.display_index}" if self.label == "C" else self.label
        if not self.children:
            return name
        return f"{name}({', '.join(repr(c) for c in self.children)})"


def skeletonize(expr: Expression) -> SkeletonTree:
    """Collapse constants to C-nodes and variables to X-nodes.

    The input is expected to be canonical; the structure is left untouched.
    """
    counter = [0]

    def walk(node: Expression) -> SkeletonTree:
        if node.is_constant:
            counter[0] += 1
            return SkeletonTree("C", display_index=counter[0])
        if node.is_variable:
            return SkeletonTree(f"X{node.index + 1}")
        return SkeletonTree(node.op, tuple(walk(c) for c in node.children))

    return walk(expr)


def count_ops(expr: Expression) -> int:
    """Number of operator (internal) nodes."""
    if not expr.is_operator:
        return 0
    return 1 + sum(count_ops(c) for c in expr.children)


def constant_values(expr: Expression) -> list[float]:
    """Constants of ``expr`` in preorder (the skeleton's display order)."""
    if expr.is_constant:
        return [expr.value]
    out: list[float] = []
    for c in expr.children:
        out.extend(constant_values(c))
    return out


# ---------------------------------------------------------------------------
# Preorder tokens
# ---------------------------------------------------------------------------

_VAR_TOKEN = re.compile(r"^X([1-9][0-9]*)$")
_NARY_TOKEN = re.compile(r"^(add|mul)([0-9]+)$")
_NUMBER_TOKEN = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

_FIXED_ARITY = {"pow": 2}
_FIXED_ARITY.update({name: 1 for name in UNARY_OPERATORS if name in CANONICAL_OPERATORS})


def to_preorder(tree: SkeletonTree) -> list[str]:
    out: list[str] = []

    def walk(node: SkeletonTree):
        if node.label in ("add", "mul"):
            out.append(f"{node.label}{len(node.children)}")
        else:
            out.append(node.label)
        for c in node.children:
            walk(c)

    walk(tree)
    return out


def _token_arity(token: str, position: int) -> tuple[str, int]:
    """Resolve a token to (label, arity); raises DecodeError on bad tokens."""
    m = _NARY_TOKEN.match(token)
    if m:
        arity = int(m.group(2))
        if arity < 2:
            raise DecodeError(f"{token!r} at token {position}: arity must be >= 2")
        return m.group(1), arity
    if token in _FIXED_ARITY:
        return token, _FIXED_ARITY[token]
    if token == "C" or _VAR_TOKEN.match(token) or _NUMBER_TOKEN.match(token):
        return token, 0
    raise DecodeError(f"unknown token {token!r} at token {position}")


def token_arity(token: str) -> int:
    """Arity a token consumes during preorder decoding (0 for leaves)."""
    return _token_arity(token, 0)[1]


def from_preorder(tokens: list[str]) -> SkeletonTree:
    """Decode a preorder token sequence back into a skeleton tree.

    Numeric literal tokens are accepted and treated as C-nodes, so valued
    expression files can be read as skeletons directly.
    """
    counter = [0]
    pos = [0]

    def walk() -> SkeletonTree:
        if pos[0] >= len(tokens):
            raise DecodeError(f"truncated sequence: expected a token at {pos[0]}")
        token = tokens[pos[0]]
        pos[0] += 1
        label, arity = _token_arity(token, pos[0] - 1)
        if arity == 0:
            if label == "C" or _NUMBER_TOKEN.match(label):
                counter[0] += 1
                return SkeletonTree("C", display_index=counter[0])
            return SkeletonTree(label)
        return SkeletonTree(label, tuple(walk() for _ in range(arity)))

    if not tokens:
        raise DecodeError("empty token sequence")
    tree = walk()
    if pos[0] != len(tokens):
        raise DecodeError(f"{len(tokens) - pos[0]} trailing token(s) after a complete tree")
    return tree


# ---------------------------------------------------------------------------
# Valued expressions in the same token format
# ---------------------------------------------------------------------------

def expression_to_prefix(expr: Expression) -> list[str]:
    """Serialize a valued expression; constants become decimal literals."""
    out: list[str] = []

    def walk(node: Expression):
        if node.is_constant:
            out.append(repr(float(node.value)))
        elif node.is_variable:
            out.append(f"X{node.index + 1}")
        else:
            if node.op in ("add", "mul"):
                out.append(f"{node.op}{len(node.children)}")
            else:
                out.append(node.op)
            for c in node.children:
                walk(c)

    walk(expr)
    return out


def prefix_to_expression(tokens: list[str]) -> Expression:
    """Decode a valued prefix sequence; bare ``C`` tokens are rejected."""
    pos = [0]

    def walk() -> Expression:
        if pos[0] >= len(tokens):
            raise DecodeError(f"truncated sequence: expected a token at {pos[0]}")
        token = tokens[pos[0]]
        pos[0] += 1
        if token == "C":
            raise DecodeError(f"valueless constant token at {pos[0] - 1}; a numeric literal is required")
        label, arity = _token_arity(token, pos[0] - 1)
        if arity == 0:
            m = _VAR_TOKEN.match(label)
            if m:
                return var(int(m.group(1)) - 1)
            return const(float(label))
        return op_node(label, *(walk() for _ in range(arity)))

    if not tokens:
        raise DecodeError("empty token sequence")
    tree = walk()
    if pos[0] != len(tokens):
        raise DecodeError(f"{len(tokens) - pos[0]} trailing token(s) after a complete tree")
    return tree


def skeleton_with_constants(tree: SkeletonTree, values: list[float]) -> Expression:
    """Rebuild a valued expression from a skeleton and its constant table."""
    used = [0]

    def walk(node: SkeletonTree) -> Expression:
        if node.label == "C":
            if used[0] >= len(values):
                raise DecodeError("constant table shorter than the number of C nodes")
            value = values[used[0]]
            used[0] += 1
            return const(value)
        m = _VAR_TOKEN.match(node.label)
        if m:
            return var(int(m.group(1)) - 1)
        return op_node(node.label, *(walk(c) for c in node.children))

    expr = walk(tree)
    if used[0] != len(values):
        raise DecodeError("constant table longer than the number of C nodes")
    return expr
