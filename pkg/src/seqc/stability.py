"""The stability check that drives the run loop.

A position is judged by flattening away everything interactive: in the goal,
every choice collapses to its first alternative, assignments and prints
count as false, and sequencing becomes conjunction.  In the declarations,
constants count as true and a procedure becomes "body implies head".  The
position is stable when this flattened reading of the declarations implies
the flattened reading of the goal.

Truth of the flattened formulas is decided by direct evaluation: conditions
run against the current store (an evaluation failure counts as false), and
a call atom unfolds through the first matching procedure of the active
declaration view, with a depth bound so ungrounded recursion fails loudly
instead of spinning.  An atom whose name matches no active procedure is
false.

The four-way verdict:

    not stable, machine has a move      -> MACHINE_MOVE   (0)
    not stable, machine has no move     -> MACHINE_STUCK  (-1)
    stable, a declaration choice open   -> USER_MOVE      (1)
    stable, nothing left to switch      -> TERMINAL       (2)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import DepthExceededError, EvalError
from .evaluator import EvalEnv, eval_cond
from .machine import ex_m_step
from .parser import pretty_cond, pretty_goal
from .syntax import (
    And,
    Assign,
    Call,
    Cond,
    CondG,
    ConstDecl,
    Goal,
    Leaf,
    Print,
    ProcDecl,
    ProgramD,
    Seq,
    SeqChoiceD,
    SeqChoiceG,
    Status,
    Subst,
    Top,
    active_view,
    subst_goal,
)
from .user import user_move_available

UNFOLD_LIMIT = 64


@dataclass(frozen=True)
class TrueE:
    pass


@dataclass(frozen=True)
class FalseE:
    pass


@dataclass(frozen=True)
class CondE:
    cond: Cond


@dataclass(frozen=True)
class AtomE:
    call: Call


@dataclass(frozen=True)
class AndE:
    items: tuple["ElemFormula", ...]


@dataclass(frozen=True)
class ImplE:
    body: "ElemFormula"
    head: AtomE


ElemFormula = Union[TrueE, FalseE, CondE, AtomE, AndE, ImplE]

TRUE_E = TrueE()
FALSE_E = FalseE()


def _conj(parts: list[ElemFormula]) -> ElemFormula:
    flat: list[ElemFormula] = []
    for part in parts:
        if isinstance(part, AndE):
            flat.extend(part.items)
        else:
            flat.append(part)
    if len(flat) == 1:
        return flat[0]
    return AndE(tuple(flat))


def elementarize_goal(g: Goal) -> ElemFormula:
    if isinstance(g, Top):
        return TRUE_E
    if isinstance(g, (Assign, Print)):
        return FALSE_E
    if isinstance(g, CondG):
        return CondE(g.cond)
    if isinstance(g, Call):
        return AtomE(g)
    if isinstance(g, Seq):
        return _conj([elementarize_goal(g.first), elementarize_goal(g.second)])
    if isinstance(g, SeqChoiceG):
        return elementarize_goal(g.alternatives[0])
    raise TypeError(f"not a goal: {g!r}")


def elementarize_program(p: ProgramD) -> ElemFormula:
    if isinstance(p, Leaf):
        d = p.decl
        if isinstance(d, ConstDecl):
            return TRUE_E
        return ImplE(elementarize_goal(d.body), AtomE(d.head))
    if isinstance(p, And):
        return _conj([elementarize_program(p.left), elementarize_program(p.right)])
    if isinstance(p, SeqChoiceD):
        return elementarize_program(p.alternatives[0])
    raise TypeError(f"not a declaration tree: {p!r}")


def elem_truth(
    env: EvalEnv,
    procs: list[ProcDecl],
    f: ElemFormula,
    depth: int = UNFOLD_LIMIT,
    limit: int = UNFOLD_LIMIT,
) -> bool:
    if isinstance(f, TrueE):
        return True
    if isinstance(f, FalseE):
        return False
    if isinstance(f, CondE):
        try:
            return eval_cond(env, f.cond)
        except EvalError:
            return False
    if isinstance(f, AndE):
        # in-order short circuit; a false guard stops recursive atoms after it
        return all(elem_truth(env, procs, item, depth, limit) for item in f.items)
    if isinstance(f, ImplE):
        if not elem_truth(env, procs, f.body, depth, limit):
            return True
        return elem_truth(env, procs, f.head, depth, limit)
    if isinstance(f, AtomE):
        call = f.call
        for d in procs:
            if d.name == call.name and d.arity == len(call.args):
                if depth <= 0:
                    raise DepthExceededError(limit)
                mapping = dict(zip(d.params, call.args))
                unfolded = elementarize_goal(subst_goal(d.body, mapping))
                return elem_truth(env, procs, unfolded, depth - 1, limit)
        return False  # no active procedure answers this atom
    raise TypeError(f"not a flattened formula: {f!r}")


def _active_procs(p: ProgramD) -> list[ProcDecl]:
    return [d for d in active_view(p) if isinstance(d, ProcDecl)]


def stable(p: ProgramD, g: Goal, theta: Subst, max_unfold: int = UNFOLD_LIMIT) -> bool:
    env = EvalEnv.from_program(p, theta)
    procs = _active_procs(p)
    if not elem_truth(env, procs, elementarize_program(p), max_unfold, max_unfold):
        return True
    return elem_truth(env, procs, elementarize_goal(g), max_unfold, max_unfold)


def machine_can_move(p: ProgramD, g: Goal, theta: Subst, max_unfold: int = UNFOLD_LIMIT) -> bool:
    outcome = ex_m_step(p, g, theta, max_unfold=max_unfold)
    return outcome is not None and outcome.moved


def stable_status(p: ProgramD, g: Goal, theta: Subst, max_unfold: int = UNFOLD_LIMIT) -> Status:
    if not stable(p, g, theta, max_unfold):
        if machine_can_move(p, g, theta, max_unfold):
            return Status.MACHINE_MOVE
        return Status.MACHINE_STUCK
    if user_move_available(p):
        return Status.USER_MOVE
    return Status.TERMINAL


# ---------------------------------------------------------------------------
# Human-readable dump for --explain-stability

def render_elem(f: ElemFormula) -> str:
    if isinstance(f, TrueE):
        return "true"
    if isinstance(f, FalseE):
        return "false"
    if isinstance(f, CondE):
        return pretty_cond(f.cond)
    if isinstance(f, AtomE):
        return pretty_goal(f.call)
    if isinstance(f, AndE):
        return " and ".join(
            f"({render_elem(item)})" if isinstance(item, (AndE, ImplE)) else render_elem(item)
            for item in f.items
        )
    if isinstance(f, ImplE):
        return f"({render_elem(f.body)} implies {render_elem(f.head)})"
    raise TypeError(f"not a flattened formula: {f!r}")


def explain_stability(p: ProgramD, g: Goal, theta: Subst, max_unfold: int = UNFOLD_LIMIT) -> str:
    env = EvalEnv.from_program(p, theta)
    procs = _active_procs(p)
    ep = elementarize_program(p)
    eg = elementarize_goal(g)
    try:
        pt = elem_truth(env, procs, ep, max_unfold, max_unfold)
        gt = elem_truth(env, procs, eg, max_unfold, max_unfold)
        verdict = "stable" if (not pt or gt) else "instable"
        truths = f"declarations are {str(pt).lower()}, goal reading is {str(gt).lower()}"
    except DepthExceededError as exc:
        verdict = "undecided"
        truths = str(exc)
    lines = [
        f"flattened declarations: {render_elem(ep)}",
        f"flattened goal:         {render_elem(eg)}",
        f"truth:                  {truths}",
        f"verdict:                {verdict}",
    ]
    if verdict == "instable":
        lines.append(f"machine move available: {str(machine_can_move(p, g, theta, max_unfold)).lower()}")
    elif verdict == "stable":
        lines.append(f"user switch available:  {str(user_move_available(p)).lower()}")
    return "\n".join(lines)
