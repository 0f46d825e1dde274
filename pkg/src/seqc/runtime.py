"""The run loop that alternates machine moves and user switches.

Each pass around the loop classifies the position first and then acts:

    MACHINE_MOVE   apply one engine step, collect any printed line
    USER_MOVE      ask the event source for an Esc; none left ends the
                   run as StableWaiting
    TERMINAL       Succeeded
    MACHINE_STUCK  Failed

The loop is re-entrant: run_loop mutates a RunState and can be called
again on the same state after more events become available, which is how
the session protocol resumes a paused run.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Protocol

from .errors import DepthExceededError, InvalidAddressError, RunFatalError
from .machine import MoveOutcome, ex_m_step
from .parser import pretty_goal, pretty_program
from .stability import stable_status
from .syntax import (
    BoolV,
    Event,
    Goal,
    IntV,
    ProgramD,
    Status,
    StrV,
    Subst,
    SymV,
    iter_choices,
)
from .user import exs_apply

DEFAULT_MAX_MOVES = 10000
DEFAULT_MAX_UNFOLD = 64


class Verdict(Enum):
    SUCCEEDED = 0
    FAILED = 1
    STABLE_WAITING = 2

    @property
    def label(self) -> str:
        return {
            Verdict.SUCCEEDED: "Succeeded",
            Verdict.FAILED: "Failed",
            Verdict.STABLE_WAITING: "StableWaiting",
        }[self]

    @property
    def exit_code(self) -> int:
        return self.value


@dataclass(frozen=True)
class Limits:
    max_moves: int = DEFAULT_MAX_MOVES
    max_unfold: int = DEFAULT_MAX_UNFOLD


@dataclass
class RunState:
    program: ProgramD
    goal: Goal
    theta: Subst = field(default_factory=Subst)
    outputs: list[str] = field(default_factory=list)
    move_count: int = 0
    status: Status | None = None


@dataclass(frozen=True)
class RunResult:
    verdict: Verdict
    state: RunState
    diagnostic: str | None = None


class EventSource(Protocol):
    def next(self) -> Event | None: ...


class ScriptedSource:
    def __init__(self, events: Iterable[Event]):
        self._queue = deque(events)

    def next(self) -> Event | None:
        return self._queue.popleft() if self._queue else None


class QueueSource:
    """Events pushed from outside, drained by the loop."""

    def __init__(self):
        self._queue: deque[Event] = deque()

    def push(self, event: Event) -> None:
        self._queue.append(event)

    def next(self) -> Event | None:
        return self._queue.popleft() if self._queue else None


StatusHook = Callable[[RunState], None]
MoveHook = Callable[[RunState, MoveOutcome], None]


def new_state(program: ProgramD, goal: Goal) -> RunState:
    return RunState(program, goal)


def run_loop(
    state: RunState,
    source: EventSource,
    limits: Limits = Limits(),
    on_status: StatusHook | None = None,
    on_move: MoveHook | None = None,
) -> RunResult:
    try:
        while True:
            status = stable_status(state.program, state.goal, state.theta, limits.max_unfold)
            state.status = status
            if on_status:
                on_status(state)
            if status is Status.MACHINE_MOVE:
                if state.move_count >= limits.max_moves:
                    return RunResult(
                        Verdict.FAILED, state, f"move limit reached ({limits.max_moves})"
                    )
                outcome = ex_m_step(
                    state.program, state.goal, state.theta, max_unfold=limits.max_unfold
                )
                # stable_status only reports MACHINE_MOVE after a successful trial
                assert outcome is not None and outcome.moved
                state.goal = outcome.new_goal
                state.theta = outcome.new_theta
                state.outputs.extend(outcome.output)
                state.move_count += 1
                if on_move:
                    on_move(state, outcome)
            elif status is Status.USER_MOVE:
                event = source.next()
                if event is None:
                    return RunResult(Verdict.STABLE_WAITING, state)
                state.program = exs_apply(state.program, event).new_program
            elif status is Status.TERMINAL:
                return RunResult(Verdict.SUCCEEDED, state)
            else:
                return RunResult(
                    Verdict.FAILED,
                    state,
                    "stuck: the position needs a machine move but no rule applies",
                )
    except (RunFatalError, DepthExceededError, InvalidAddressError) as exc:
        return RunResult(Verdict.FAILED, state, str(exc))


def run(
    program: ProgramD,
    goal: Goal,
    events: Iterable[Event] = (),
    limits: Limits = Limits(),
    on_status: StatusHook | None = None,
    on_move: MoveHook | None = None,
) -> RunResult:
    """Run a program to a verdict with a fixed event script."""
    return run_loop(new_state(program, goal), ScriptedSource(events), limits, on_status, on_move)


def _theta_entry(name: str, value) -> dict:
    if isinstance(value, IntV):
        return {"var": name, "kind": "int", "value": value.value}
    if isinstance(value, StrV):
        return {"var": name, "kind": "str", "value": value.value}
    if isinstance(value, SymV):
        return {"var": name, "kind": "sym", "value": value.name}
    if isinstance(value, BoolV):
        return {"var": name, "kind": "bool", "value": value.value}
    raise TypeError(f"not a value: {value!r}")


def snapshot(state: RunState) -> dict:
    """The wire shape of a position, used by the session protocol."""
    return {
        "program_pretty": pretty_program(state.program),
        "choices": [
            {
                "path": addr.dotted(),
                "remaining": len(node.alternatives),
                "active_pretty": pretty_program(node.alternatives[0]),
            }
            for addr, node in iter_choices(state.program)
        ],
        "goal_pretty": pretty_goal(state.goal),
        "theta": [
            _theta_entry(name, value)
            for name, value in sorted(state.theta.items(), key=lambda kv: kv[0])
        ],
        "status": state.status.label if state.status is not None else None,
        "move_count": state.move_count,
        "outputs": list(state.outputs),
    }
