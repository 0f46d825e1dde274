"""Abstract syntax shared by every other module.

Three tree families: goals (the main statement), declarations, and the
declaration tree itself.  A `choice(...)` node may appear in goals
(SeqChoiceG, reduced by the machine) and in declaration trees (SeqChoiceD,
switched by the user).  All nodes are immutable; every rewrite builds a new
tree, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Union

from .errors import InvalidAddressError

# ---------------------------------------------------------------------------
# Expressions and conditions

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class SymLit:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ConstRef:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, StrLit, SymLit, Var, ConstRef, BinOp]

COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Cond:
    op: str  # one of COMPARATORS
    left: Expr
    right: Expr


# ---------------------------------------------------------------------------
# Goals (the main statement)

@dataclass(frozen=True)
class Top:
    pass


TOP = Top()


@dataclass(frozen=True)
class Print:
    var: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class CondG:
    cond: Cond


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Goal"
    second: "Goal"


@dataclass(frozen=True)
class SeqChoiceG:
    # never empty; the parser only creates it with >= 2 alternatives, the
    # machine shortens it one alternative at a time
    alternatives: tuple["Goal", ...]

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError("SeqChoiceG needs at least one alternative")


Goal = Union[Top, Print, Call, CondG, Assign, Seq, SeqChoiceG]


# ---------------------------------------------------------------------------
# Declarations and the declaration tree

@dataclass(frozen=True)
class ConstDecl:
    name: str
    expr: Expr  # closed over other constants only: contains no Var


@dataclass(frozen=True)
class ProcDecl:
    params: tuple[str, ...]
    head: Call  # head.args are exactly the params, as Var nodes
    body: "Goal"

    @property
    def name(self) -> str:
        return self.head.name

    @property
    def arity(self) -> int:
        return len(self.params)


Decl = Union[ConstDecl, ProcDecl]


@dataclass(frozen=True)
class Leaf:
    decl: Decl


@dataclass(frozen=True)
class And:
    left: "ProgramD"
    right: "ProgramD"


@dataclass(frozen=True)
class SeqChoiceD:
    alternatives: tuple["ProgramD", ...]

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError("SeqChoiceD needs at least one alternative")


ProgramD = Union[Leaf, And, SeqChoiceD]


# ---------------------------------------------------------------------------
# Values and the substitution state

@dataclass(frozen=True)
class IntV:
    value: int


@dataclass(frozen=True)
class StrV:
    value: str


@dataclass(frozen=True)
class SymV:
    name: str


@dataclass(frozen=True)
class BoolV:
    value: bool


Value = Union[IntV, StrV, SymV, BoolV]


def format_value(v: Value) -> str:
    """Render a value the way print(x) emits it: text verbatim, no quotes."""
    if isinstance(v, IntV):
        return str(v.value)
    if isinstance(v, StrV):
        return v.value
    if isinstance(v, SymV):
        return v.name
    if isinstance(v, BoolV):
        return "true" if v.value else "false"
    raise TypeError(f"not a value: {v!r}")


class Subst:
    """The variable-value store.  Immutable: bind() returns a new store.

    Rebinding replaces the old value for that name and never touches any
    other binding; bindings are never dropped during a run.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, Value] | None = None):
        self._bindings: dict[str, Value] = dict(bindings) if bindings else {}

    def bind(self, name: str, value: Value) -> "Subst":
        updated = dict(self._bindings)
        updated[name] = value
        return Subst(updated)

    def get(self, name: str) -> Value | None:
        return self._bindings.get(name)

    def items(self):
        return self._bindings.items()

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subst):
            return NotImplemented
        return self._bindings == other._bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self._bindings.items())
        return f"Subst({{{inner}}})"


# ---------------------------------------------------------------------------
# Addresses, events, status

@dataclass(frozen=True)
class Address:
    """Root-relative child-index path into a declaration tree.

    And children are 0 (left) and 1 (right); SeqChoiceD alternative i is
    child i.  The empty path addresses the root.
    """

    path: tuple[int, ...] = ()

    @classmethod
    def parse(cls, dotted: str) -> "Address":
        dotted = dotted.strip()
        if not dotted:
            return cls(())
        try:
            return cls(tuple(int(part) for part in dotted.split(".")))
        except ValueError:
            raise InvalidAddressError([dotted]) from None

    def dotted(self) -> str:
        return ".".join(str(i) for i in self.path)

    def child(self, index: int) -> "Address":
        return Address(self.path + (index,))


ESC = "esc"


@dataclass(frozen=True)
class Event:
    address: Address
    kind: str = ESC


class Status(Enum):
    """The four-way classification of a position.

    Codes follow the stable relation: 0 the machine has a move, -1 the
    machine is stuck, 1 only the user can move, 2 nothing left to do.
    """

    MACHINE_MOVE = 0
    MACHINE_STUCK = -1
    USER_MOVE = 1
    TERMINAL = 2

    @property
    def code(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return {
            Status.MACHINE_MOVE: "MachineMove",
            Status.MACHINE_STUCK: "MachineStuck",
            Status.USER_MOVE: "UserMove",
            Status.TERMINAL: "Terminal",
        }[self]


# ---------------------------------------------------------------------------
# Tree operations

def address_resolve(p: ProgramD, a: Address) -> ProgramD:
    """Return the subtree of p at path a, or raise InvalidAddressError."""
    node = p
    for depth, index in enumerate(a.path):
        if isinstance(node, And):
            children = (node.left, node.right)
        elif isinstance(node, SeqChoiceD):
            children = node.alternatives
        else:  # Leaf has no children
            raise InvalidAddressError(a.path[: depth + 1])
        if not 0 <= index < len(children):
            raise InvalidAddressError(a.path[: depth + 1])
        node = children[index]
    return node


def replace_at(p: ProgramD, a: Address, replacement: ProgramD) -> ProgramD:
    """Rebuild p with the subtree at a swapped for replacement."""
    if not a.path:
        return replacement
    head, rest = a.path[0], Address(a.path[1:])
    if isinstance(p, And):
        if head == 0:
            return And(replace_at(p.left, rest, replacement), p.right)
        if head == 1:
            return And(p.left, replace_at(p.right, rest, replacement))
        raise InvalidAddressError(a.path[:1])
    if isinstance(p, SeqChoiceD):
        if not 0 <= head < len(p.alternatives):
            raise InvalidAddressError(a.path[:1])
        alts = list(p.alternatives)
        alts[head] = replace_at(alts[head], rest, replacement)
        return SeqChoiceD(tuple(alts))
    raise InvalidAddressError(a.path[:1])


def active_view(p: ProgramD) -> list[Decl]:
    """All declaration leaves, left to right, with every choice replaced by
    its first alternative."""
    if isinstance(p, Leaf):
        return [p.decl]
    if isinstance(p, And):
        return active_view(p.left) + active_view(p.right)
    if isinstance(p, SeqChoiceD):
        return active_view(p.alternatives[0])
    raise TypeError(f"not a declaration tree: {p!r}")


def iter_choices(p: ProgramD, _prefix: tuple[int, ...] = ()) -> Iterator[tuple[Address, SeqChoiceD]]:
    """Yield (address, node) for every SeqChoiceD in pre-order."""
    if isinstance(p, SeqChoiceD):
        yield Address(_prefix), p
        for i, alt in enumerate(p.alternatives):
            yield from iter_choices(alt, _prefix + (i,))
    elif isinstance(p, And):
        yield from iter_choices(p.left, _prefix + (0,))
        yield from iter_choices(p.right, _prefix + (1,))


def total_alternatives(p: ProgramD) -> int:
    return sum(len(node.alternatives) for _, node in iter_choices(p))


def goal_choice_alternatives(g: Goal) -> int:
    """Total alternative count over every SeqChoiceG in a goal."""
    if isinstance(g, SeqChoiceG):
        return len(g.alternatives) + sum(goal_choice_alternatives(a) for a in g.alternatives)
    if isinstance(g, Seq):
        return goal_choice_alternatives(g.first) + goal_choice_alternatives(g.second)
    return 0


# ---------------------------------------------------------------------------
# Substitution of expressions for variables (argument passing)

def subst_expr(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Var) and e.name in mapping:
        return mapping[e.name]
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_expr(e.left, mapping), subst_expr(e.right, mapping))
    return e


def subst_cond(c: Cond, mapping: Mapping[str, Expr]) -> Cond:
    return Cond(c.op, subst_expr(c.left, mapping), subst_expr(c.right, mapping))


def subst_goal(g: Goal, mapping: Mapping[str, Expr]) -> Goal:
    """Substitute expressions for variables throughout a goal.

    Print targets and assignment targets are names, not expressions, so they
    are left alone; the parser rejects bodies that assign to a parameter.
    """
    if isinstance(g, (Top, Print)):
        return g
    if isinstance(g, Call):
        return Call(g.name, tuple(subst_expr(a, mapping) for a in g.args))
    if isinstance(g, CondG):
        return CondG(subst_cond(g.cond, mapping))
    if isinstance(g, Assign):
        return Assign(g.var, subst_expr(g.expr, mapping))
    if isinstance(g, Seq):
        return Seq(subst_goal(g.first, mapping), subst_goal(g.second, mapping))
    if isinstance(g, SeqChoiceG):
        return SeqChoiceG(tuple(subst_goal(a, mapping) for a in g.alternatives))
    raise TypeError(f"not a goal: {g!r}")


def value_to_expr(v: Value) -> Expr:
    """Embed an evaluated value back into expression position (call-by-value
    argument passing)."""
    if isinstance(v, IntV):
        return IntLit(v.value)
    if isinstance(v, StrV):
        return StrLit(v.value)
    if isinstance(v, SymV):
        return SymLit(v.name)
    raise TypeError(f"cannot embed {v!r} in an expression")
