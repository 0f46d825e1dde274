"""Interpreter and playground for a small C-like language whose programs
carry switchable alternatives: declarations may offer a list of versions,
the goal may try strategies in order, and a run is a dialogue of machine
moves (assign, print, advance, switch) and user moves (Esc)."""

from .errors import (
    ArityError,
    DepthExceededError,
    EmptyChoiceError,
    EvalError,
    InvalidAddressError,
    ParseError,
    RunFatalError,
    SeqcError,
)
from .machine import MoveOutcome, ex_m_step
from .parser import format_program, parse_program, pretty_goal, pretty_program
from .runtime import (
    Limits,
    RunResult,
    RunState,
    ScriptedSource,
    Verdict,
    new_state,
    run,
    run_loop,
    snapshot,
)
from .session import Session
from .stability import explain_stability, stable, stable_status
from .syntax import Address, Event, Status, Subst
from .user import SwitchResult, exs_apply, user_move_available

__version__ = "0.1.0"

__all__ = [
    "Address",
    "ArityError",
    "DepthExceededError",
    "EmptyChoiceError",
    "EvalError",
    "Event",
    "InvalidAddressError",
    "Limits",
    "MoveOutcome",
    "ParseError",
    "RunFatalError",
    "RunResult",
    "RunState",
    "ScriptedSource",
    "SeqcError",
    "Session",
    "Status",
    "Subst",
    "SwitchResult",
    "Verdict",
    "__version__",
    "ex_m_step",
    "explain_stability",
    "exs_apply",
    "format_program",
    "new_state",
    "parse_program",
    "pretty_goal",
    "pretty_program",
    "run",
    "run_loop",
    "snapshot",
    "stable",
    "stable_status",
    "user_move_available",
]
