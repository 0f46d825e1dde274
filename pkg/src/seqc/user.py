"""The user's move: switching a declaration choice.

An Esc aimed at a choice node drops its front alternative, so the next one
becomes active.  Aiming at a choice that is already down to one alternative
is a no-op rather than an error; aiming at a path that does not exist in
the tree is an error.  Addresses are child-index paths: both sides of an
And and every alternative of a choice are addressable, so a nested choice
inside a not-yet-active alternative can still be switched ahead of time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    Address,
    Event,
    ProgramD,
    SeqChoiceD,
    address_resolve,
    iter_choices,
    replace_at,
)


@dataclass(frozen=True)
class SwitchResult:
    new_program: ProgramD
    switched: bool
    address: Address


def exs_apply(p: ProgramD, event: Event) -> SwitchResult:
    """Apply one Esc to the declaration tree."""
    node = address_resolve(p, event.address)
    if isinstance(node, SeqChoiceD) and len(node.alternatives) >= 2:
        shortened = SeqChoiceD(node.alternatives[1:])
        return SwitchResult(replace_at(p, event.address, shortened), True, event.address)
    return SwitchResult(p, False, event.address)


def user_move_available(p: ProgramD) -> bool:
    return any(len(node.alternatives) >= 2 for _, node in iter_choices(p))


def parse_event_line(
    line: str, p: ProgramD, lineno: int = 0, filename: str = "<events>"
) -> Event | None:
    """One line of an events file: `esc`, `esc <path>`, `%` comment, or blank.

    A bare `esc` is shorthand for the only choice in the program and is an
    error when the program has none or several.
    """
    text = line.split("%", 1)[0].strip()
    if not text:
        return None
    parts = text.split()
    if parts[0] != "esc":
        raise ParseError(f"unknown event {parts[0]!r} (only 'esc' exists)", lineno, 1, filename)
    if len(parts) == 1:
        choices = list(iter_choices(p))
        if len(choices) != 1:
            raise ParseError(
                f"bare 'esc' needs exactly one choice in the program, found {len(choices)};"
                " write 'esc <path>'",
                lineno,
                1,
                filename,
            )
        return Event(choices[0][0])
    if len(parts) > 2:
        raise ParseError("an event is 'esc' or 'esc <path>'", lineno, 1, filename)
    return Event(Address.parse(parts[1]))


def read_events_file(path: str, p: ProgramD) -> list[Event]:
    events: list[Event] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            event = parse_event_line(line, p, lineno, path)
            if event is not None:
                events.append(event)
    return events
