"""Expression core: parsing, evaluation, canonicalization, skeletons."""

from .nodes import (
    ALL_OPERATORS,
    CANONICAL_OPERATORS,
    CONST_REL_TOL,
    Expression,
    ExpressionError,
    INTERNAL_OPERATORS,
    UNARY_OPERATORS,
    add,
    compare,
    const,
    div,
    mul,
    neg,
    op_node,
    pow_,
    same_constant,
    structurally_equal,
    var,
)
from .parse import FUNCTIONS, ParseError, parse
from .evaluate import DomainFault, evaluate, evaluate_many
from .canon import canonicalize
from .render import to_infix
from .skeleton import (
    DecodeError,
    SkeletonTree,
    constant_values,
    count_ops,
    expression_to_prefix,
    from_preorder,
    prefix_to_expression,
    skeleton_with_constants,
    skeletonize,
    to_preorder,
    token_arity,
)

__all__ = [
    "ALL_OPERATORS",
    "CANONICAL_OPERATORS",
    "CONST_REL_TOL",
    "DecodeError",
    "DomainFault",
    "Expression",
    "ExpressionError",
    "FUNCTIONS",
    "INTERNAL_OPERATORS",
    "ParseError",
    "SkeletonTree",
    "UNARY_OPERATORS",
    "add",
    "canonicalize",
    "compare",
    "const",
    "constant_values",
    "count_ops",
    "div",
    "evaluate",
    "evaluate_many",
    "expression_to_prefix",
    "from_preorder",
    "mul",
    "neg",
    "op_node",
    "parse",
    "pow_",
    "prefix_to_expression",
    "same_constant",
    "skeleton_with_constants",
    "skeletonize",
    "structurally_equal",
    "to_infix",
    "to_preorder",
    "token_arity",
    "var",
]
