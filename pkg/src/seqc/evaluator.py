"""Expression and condition evaluation against the current store.

Evaluation is total in a weak sense: any failure raises an EvalError
subclass, and the engines treat that as the guard of a rule not holding
rather than as a crash.  Constants unfold by name with a depth guard, so a
cyclic definition like `a == b; b == a` surfaces as ConstantCycleError.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ConstantCycleError,
    DivisionByZeroError,
    TypeMismatchError,
    UnboundVariableError,
    UnknownConstantError,
)
from .syntax import (
    BinOp,
    BoolV,
    Cond,
    ConstDecl,
    ConstRef,
    Expr,
    IntLit,
    IntV,
    ProgramD,
    StrLit,
    StrV,
    Subst,
    SymLit,
    SymV,
    Value,
    Var,
    active_view,
)

CONST_DEPTH = 64


@dataclass
class EvalEnv:
    """Constants visible in the active view plus the variable store."""

    constants: dict[str, Expr] = field(default_factory=dict)
    theta: Subst = field(default_factory=Subst)

    @classmethod
    def from_program(cls, p: ProgramD, theta: Subst) -> "EvalEnv":
        constants: dict[str, Expr] = {}
        for d in active_view(p):
            if isinstance(d, ConstDecl):
                # the leftmost declaration of a name wins
                constants.setdefault(d.name, d.expr)
        return cls(constants, theta)


def _trunc_div(a: int, b: int) -> int:
    # truncate toward zero, like C
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


def eval_expr(env: EvalEnv, e: Expr, depth: int = CONST_DEPTH) -> Value:
    if isinstance(e, IntLit):
        return IntV(e.value)
    if isinstance(e, StrLit):
        return StrV(e.value)
    if isinstance(e, SymLit):
        return SymV(e.name)
    if isinstance(e, Var):
        v = env.theta.get(e.name)
        if v is None:
            raise UnboundVariableError(e.name)
        return v
    if isinstance(e, ConstRef):
        body = env.constants.get(e.name)
        if body is None:
            raise UnknownConstantError(e.name)
        if depth <= 0:
            raise ConstantCycleError(e.name)
        return eval_expr(env, body, depth - 1)
    if isinstance(e, BinOp):
        left = eval_expr(env, e.left, depth)
        right = eval_expr(env, e.right, depth)
        if not isinstance(left, IntV) or not isinstance(right, IntV):
            raise TypeMismatchError(f"arithmetic {e.op!r} needs integers")
        if e.op == "+":
            return IntV(left.value + right.value)
        if e.op == "-":
            return IntV(left.value - right.value)
        if e.op == "*":
            return IntV(left.value * right.value)
        if e.op == "/":
            if right.value == 0:
                raise DivisionByZeroError()
            return IntV(_trunc_div(left.value, right.value))
        raise TypeMismatchError(f"unknown operator {e.op!r}")
    raise TypeError(f"not an expression: {e!r}")


def _same_kind(a: Value, b: Value) -> bool:
    return type(a) is type(b)


def _eq(a: Value, b: Value) -> bool:
    if not _same_kind(a, b):
        return False  # cross-kind values are simply unequal
    if isinstance(a, IntV):
        return a.value == b.value
    if isinstance(a, StrV):
        return a.value == b.value
    if isinstance(a, SymV):
        return a.name == b.name
    if isinstance(a, BoolV):
        return a.value == b.value
    raise TypeError(f"not a value: {a!r}")


def eval_cond(env: EvalEnv, c: Cond, depth: int = CONST_DEPTH) -> bool:
    left = eval_expr(env, c.left, depth)
    right = eval_expr(env, c.right, depth)
    if c.op == "==":
        return _eq(left, right)
    if c.op == "!=":
        return not _eq(left, right)
    if not isinstance(left, IntV) or not isinstance(right, IntV):
        raise TypeMismatchError(f"ordering {c.op!r} needs integers")
    if c.op == "<":
        return left.value < right.value
    if c.op == "<=":
        return left.value <= right.value
    if c.op == ">":
        return left.value > right.value
    if c.op == ">=":
        return left.value >= right.value
    raise TypeError(f"not a comparison: {c.op!r}")
