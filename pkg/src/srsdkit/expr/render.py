"""Infix rendering of expression trees (inverse of ``parse`` up to spacing)."""

from __future__ import annotations

from typing import Sequence

from .nodes import Expression

_ADD, _MUL, _POW, _ATOM = 1, 2, 3, 4


def to_infix(expr: Expression, variable_names: Sequence[str] | None = None) -> str:
    """Render as an infix formula that reparses to the same tree.

    Variables print as ``variable_names[i]`` when given, else ``x{i+1}``.
    """

    def name(i: int) -> str:
        if variable_names is not None:
            return variable_names[i]
        return f"x{i + 1}"

    def render(node: Expression, context: int) -> str:
        if node.is_constant:
            text = repr(float(node.value))
            return f"({text})" if node.value < 0 and context >= _POW else text
        if node.is_variable:
            return name(node.index)
        op = node.op
        if op == "add":
            text = " + ".join(render(c, _ADD + 1) for c in node.children)
            level = _ADD
        elif op == "mul":
            text = " * ".join(render(c, _MUL + 1) for c in node.children)
            level = _MUL
        elif op == "div":
            text = f"{render(node.children[0], _MUL + 1)} / {render(node.children[1], _POW)}"
            level = _MUL
        elif op == "pow":
            text = f"{render(node.children[0], _ATOM)}^{render(node.children[1], _POW)}"
            level = _POW
        elif op == "neg":
            text = f"-{render(node.children[0], _POW)}"
            level = _MUL
        else:
            return f"{op}({render(node.children[0], _ADD)})"
        return f"({text})" if level < context else text

    return render(expr, _ADD)
