"""Restricted arithmetic expressions in one variable.

User-supplied thermal stress functions are written as Python
expressions in `r`, e.g. `0.5 * sign(r) * abs(r) ** 0.6`.  The
expression is parsed with `ast`, checked against a whitelist of
node types and functions, and evaluated elementwise with numpy.

"""
import ast
from functools import lru_cache
from typing import (  # noqa: F401
    Callable,
    Dict,
)

import numpy as np


FUNCTIONS = {
    'abs': np.abs,
    'sign': np.sign,
    'sqrt': np.sqrt,
    'exp': np.exp,
    'log1p': np.log1p,
    'tanh': np.tanh,
    'sin': np.sin,
    'cos': np.cos,
    'minimum': np.minimum,
    'maximum': np.maximum,
    'where': np.where,
}  # type: Dict[str, Callable]

_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Compare,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
    ast.Lt,
    ast.LtE,
    ast.Gt,
    ast.GtE,
)


class ExpressionValidator(ast.NodeVisitor):
    """Collects the reasons an expression tree is not allowed."""

    def __init__(self, variable):
        # type: (str) -> None
        self.variable = variable
        self.problems = list()

    def generic_visit(self, node):
        if not isinstance(node, _ALLOWED_NODES):
            self.problems.append(
                'unsupported syntax {}'.format(node.__class__.__name__)
            )
        super(ExpressionValidator, self).generic_visit(node)

    def visit_Name(self, node):
        # type: (ast.Name) -> None
        if node.id != self.variable and node.id not in FUNCTIONS:
            self.problems.append('unknown name {}'.format(node.id))

    def visit_Call(self, node):
        # type: (ast.Call) -> None
        if not (isinstance(node.func, ast.Name)
                and node.func.id in FUNCTIONS):
            self.problems.append('only {} may be called'.format(
                ', '.join(sorted(FUNCTIONS))
            ))
        if node.keywords:
            self.problems.append('keyword arguments are not supported')
        self.generic_visit(node)

    def visit_Constant(self, node):
        # type: (ast.Constant) -> None
        if not isinstance(node.value, (int, float)) \
                or isinstance(node.value, bool):
            self.problems.append('only numeric constants are allowed')


@lru_cache(maxsize=64)
def compile_expression(source, variable='r'):
    # type: (str, str) -> Callable[[np.ndarray], np.ndarray]
    """Compile an expression into a vectorized function.

    Args:
        source: The expression text.
        variable: The name of the free variable.

    Raises:
        ValueError: If the expression does not parse, or uses
            anything outside of the whitelist.

    Returns:
        A function of one array argument.

    """
    try:
        tree = ast.parse(source.strip(), mode='eval')
    except SyntaxError as exc:
        raise ValueError('cannot parse {!r}: {}'.format(source, exc.msg))
    validator = ExpressionValidator(variable)
    validator.visit(tree)
    if validator.problems:
        raise ValueError('; '.join(validator.problems))
    code = compile(tree, '<expression>', 'eval')

    def _evaluate(values):
        namespace = dict(FUNCTIONS)
        namespace[variable] = np.asarray(values, dtype=float)
        result = eval(code, {'__builtins__': {}}, namespace)
        return np.asarray(result, dtype=float) * np.ones_like(
            namespace[variable]
        )

    return _evaluate
