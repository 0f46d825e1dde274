"""The machine's single-step move engine.

ex_m_step attempts exactly one machine move on a goal and reports one of
three shapes:

    MoveOutcome(moved=True, ...)   a move was made: one assignment, one
                                   print, one choice switch, or one of
                                   those reached through a call body
    MoveOutcome(moved=False, ...)  the goal needs no move (true conditions,
                                   skip, a call whose body needs no move);
                                   goal and store are returned untouched
    None                           no rule applies: a false or failing
                                   condition, a call nothing answers, or an
                                   exhausted choice

The walk is leftmost-first: sequencing tries its first part, then its
second; a goal choice works inside its first alternative and only switches
to the remaining alternatives when the first one fails outright.  A call is
answered by the first active declaration with the right name and arity;
arguments are evaluated once and pasted into the body as literals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DepthExceededError, EvalError, RunFatalError
from .evaluator import EvalEnv, eval_cond, eval_expr
from .syntax import (
    And,
    Assign,
    Call,
    CondG,
    Goal,
    Leaf,
    Print,
    ProcDecl,
    ProgramD,
    Seq,
    SeqChoiceG,
    Subst,
    Top,
    TOP,
    format_value,
    subst_goal,
    value_to_expr,
)

UNFOLD_LIMIT = 64

# rule tags emitted on trace lines; assignment, print, and switch carry
# their engine rule numbers, composite walks carry a word
RULE_ASSIGN = "8"
RULE_PRINT = "9"
RULE_SWITCH = "11"
RULE_CALL = "call"
RULE_ADVANCE = "advance"


@dataclass(frozen=True)
class MoveOutcome:
    moved: bool
    new_goal: Goal
    new_theta: Subst
    output: tuple[str, ...]  # at most one line per move
    rule: str | None = None
    move_path: tuple[int, ...] | None = None


def _no_move(g: Goal, theta: Subst) -> MoveOutcome:
    return MoveOutcome(False, g, theta, ())


def ex_m_step(p: ProgramD, g: Goal, theta: Subst, *, max_unfold: int = UNFOLD_LIMIT) -> MoveOutcome | None:
    """One machine move against declarations p, or None when stuck."""
    env = EvalEnv.from_program(p, theta)

    def step(goal: Goal, depth: int) -> MoveOutcome | None:
        if isinstance(goal, Top):
            return _no_move(goal, theta)
        if isinstance(goal, CondG):
            try:
                ok = eval_cond(env, goal.cond)
            except EvalError:
                return None
            return _no_move(goal, theta) if ok else None
        if isinstance(goal, Assign):
            try:
                value = eval_expr(env, goal.expr)
            except EvalError:
                return None
            return MoveOutcome(True, TOP, theta.bind(goal.var, value), (), RULE_ASSIGN, ())
        if isinstance(goal, Print):
            value = theta.get(goal.var)
            if value is None:
                raise RunFatalError(f"print({goal.var}): variable is unbound")
            return MoveOutcome(True, TOP, theta, (format_value(value),), RULE_PRINT, ())
        if isinstance(goal, Call):
            return bch(goal, depth)
        if isinstance(goal, Seq):
            first = step(goal.first, depth)
            if first is None:
                return None
            if first.moved:
                return MoveOutcome(
                    True,
                    Seq(first.new_goal, goal.second),
                    first.new_theta,
                    first.output,
                    first.rule,
                    (0,) + first.move_path,
                )
            second = step(goal.second, depth)
            if second is None:
                return None
            if second.moved:
                return MoveOutcome(
                    True,
                    Seq(goal.first, second.new_goal),
                    second.new_theta,
                    second.output,
                    second.rule,
                    (1,) + second.move_path,
                )
            return _no_move(goal, theta)
        if isinstance(goal, SeqChoiceG):
            head = step(goal.alternatives[0], depth)
            if head is not None:
                if not head.moved:
                    return _no_move(goal, theta)
                return MoveOutcome(
                    True,
                    SeqChoiceG((head.new_goal,) + goal.alternatives[1:]),
                    head.new_theta,
                    head.output,
                    RULE_ADVANCE,
                    (0,) + head.move_path,
                )
            if len(goal.alternatives) >= 2:
                # the open alternative failed for good; fall through to the next
                return MoveOutcome(True, SeqChoiceG(goal.alternatives[1:]), theta, (), RULE_SWITCH, ())
            return None
        raise TypeError(f"not a goal: {goal!r}")

    def bch(call: Call, depth: int) -> MoveOutcome | None:
        def search(node: ProgramD) -> MoveOutcome | None:
            if isinstance(node, Leaf):
                d = node.decl
                if not isinstance(d, ProcDecl) or d.name != call.name or d.arity != len(call.args):
                    return None
                try:
                    values = [eval_expr(env, a) for a in call.args]
                except EvalError:
                    return None
                if depth <= 0:
                    raise DepthExceededError(max_unfold)
                mapping = {param: value_to_expr(v) for param, v in zip(d.params, values)}
                body = subst_goal(d.body, mapping)
                inner = step(body, depth - 1)
                if inner is None:
                    return None
                if not inner.moved:
                    return _no_move(call, theta)
                return MoveOutcome(
                    True, inner.new_goal, inner.new_theta, inner.output, RULE_CALL, inner.move_path
                )
            if isinstance(node, And):
                found = search(node.left)
                if found is not None:
                    return found
                return search(node.right)
            return search(node.alternatives[0])

        return search(p)

    return step(g, max_unfold)
