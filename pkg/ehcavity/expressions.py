"""Functions to safely evaluate arithmetic expressions given on the command line."""
import ast
import math
from typing import Any, Callable, Dict, Tuple

from ehcavity.logging import get_logger

logger = get_logger(__file__)

_ALLOWED_FUNCTIONS: Dict[str, Callable[..., float]] = {
    "abs": abs,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "sqrt": math.sqrt,
    "tan": math.tan,
}
_CONSTANTS = {"pi": math.pi, "e": math.e}
_ALLOWED_NODES = (
    ast.Add,
    ast.BinOp,
    ast.Call,
    ast.Constant,
    ast.Div,
    ast.expr_context,
    ast.Expression,
    ast.Load,
    ast.Mult,
    ast.Name,
    ast.operator,
    ast.Pow,
    ast.Sub,
    ast.UAdd,
    ast.UnaryOp,
    ast.unaryop,
    ast.USub,
)


class ExpressionError(ValueError):
    """Expression is malformed or uses disallowed names/operations."""


class ExpressionParser(ast.NodeVisitor):
    """AST parser that allows plain arithmetic on numbers, constants and variables."""

    def __init__(self, **variables: float) -> None:
        """Instantiate with variables in scope (on top of `pi` and `e`)."""
        self.names = {**_CONSTANTS, **variables}
        self.scope: Dict[str, Any] = {
            **self.names,
            **_ALLOWED_FUNCTIONS,
            "__builtins__": {},
        }

    def generic_visit(self, node: ast.AST) -> None:
        """Raise errors for nodes that are not arithmetic."""
        if not isinstance(node, _ALLOWED_NODES):
            raise ExpressionError(f"Invalid node `{type(node).__name__}`.")
        super().generic_visit(node)

    def visit_Constant(self, node: ast.Constant) -> None:
        """Only allow numeric literals (evaluated as floats)."""
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"Expected a number, got `{node.value!r}`.")
        node.value = float(node.value)

    def visit_Name(self, node: ast.Name) -> None:
        """Only allow names from scope."""
        if node.id not in self.names:
            raise ExpressionError(
                f"Expected `name` to be one of `{sorted(self.names)}`, got `{node.id}`."
            )

    def visit_Call(self, node: ast.Call) -> None:
        """Only allow whitelisted functions called with positional arguments."""
        func = node.func
        if not isinstance(func, ast.Name) or func.id not in _ALLOWED_FUNCTIONS:
            name = func.id if isinstance(func, ast.Name) else "<expression>"
            raise ExpressionError(
                f"Expected function to be one of `{sorted(_ALLOWED_FUNCTIONS)}`, got"
                f" `{name}`."
            )
        if node.keywords:
            raise ExpressionError("Keyword arguments are not allowed in expressions.")
        for arg in node.args:
            self.visit(arg)

    def safe_eval_ast(self, ast_tree: ast.Expression) -> float:
        """Evaluate safe AST trees only (raise errors otherwise)."""
        self.visit(ast_tree)
        exe = compile(ast_tree, filename="", mode="eval")
        try:
            return float(eval(exe, self.scope))
        except (ArithmeticError, ValueError, TypeError) as err:
            raise ExpressionError(f"Cannot evaluate expression: {err}") from err

    def safe_eval(self, src: str) -> Tuple[float, ...]:
        """
        Evaluate strings that are safe only (raise errors otherwise).

        `^` is read as power, so that `F0^3` and `F0**3` are equivalent. Top-level
         commas separate several values (`pi,10,10`), so a tuple is always returned.
        """
        try:
            tree = ast.parse(src.replace("^", "**").strip(), mode="eval")
        except SyntaxError as err:
            raise ExpressionError(f"Malformed expression `{src}`.") from err
        parts = tree.body.elts if isinstance(tree.body, ast.Tuple) else [tree.body]
        return tuple(self.safe_eval_ast(ast.Expression(body=part)) for part in parts)


def evaluate(src: str, **variables: float) -> float:
    """
    Evaluate arithmetic expression to a finite float.

    :param src: Expression such as `sqrt(sqrt(5)-2)` or `8*k*F0^3*w^2`
    :param variables: Extra names in scope
    :return: Numeric value
    """
    (value,) = evaluate_many(src, size=1, **variables)
    logger.debug(f"Evaluated `{src}` to {value}")
    return value


def evaluate_many(src: str, size: int, **variables: float) -> Tuple[float, ...]:
    """
    Evaluate comma-separated expressions (such as `pi,10,10`).

    :param src: Comma-separated expressions
    :param size: Expected number of values
    :param variables: Extra names in scope
    :return: Tuple of values
    """
    values = ExpressionParser(**variables).safe_eval(src)
    if len(values) != size:
        raise ExpressionError(
            f"Expected {size} comma-separated value(s), got {len(values)} in `{src}`."
        )
    if not all(math.isfinite(v) for v in values):
        raise ExpressionError(f"Expression `{src}` is not finite.")
    return values
