"""Newline-delimited JSON session protocol.

One session drives one run.  Incoming lines (to the engine):

    {"load": "<program text>"}   parse and start a fresh run
    {"event": "<dot.path>"}      Esc aimed at the choice at that address
    {"reset": true}              restart the most recently loaded program

Outgoing lines (from the engine):

    {"state": {...}}             snapshot at every loop head, so after each
                                 machine move and at every pause
    {"output": "<line>"}         one per print, before the following state
    {"verdict": "<name>"}        only when the run actually ends; a paused
                                 run (StableWaiting) keeps the session open
    {"error": {"code", "message"}}

Malformed input never kills the session.  An event while the position is
not at a user-move pause (the run already ended) is queued and acknowledged
with a "queued" flag rather than rejected; the queue is discarded on the
next load or reset.  Field order is fixed and output carries no timestamps,
so a replayed session is byte-identical.
"""

from __future__ import annotations

import json
import socket
import sys
from typing import Callable, TextIO

from .errors import InvalidAddressError, ParseError
from .runtime import Limits, RunResult, RunState, Verdict, new_state, run_loop, snapshot
from .syntax import Address, Event
from .parser import parse_program
from .user import exs_apply

ERROR_BAD_JSON = "bad_json"
ERROR_BAD_PATH = "bad_path"
ERROR_BAD_MESSAGE = "bad_message"
ERROR_PARSE = "parse_error"
ERROR_NO_PROGRAM = "no_program"
# reserved by the protocol sketch; never produced because out-of-turn
# events are queued and acknowledged instead of rejected
ERROR_NOT_STABLE = "not_stable"

Emit = Callable[[dict], None]


def _dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


class Session:
    """Protocol state machine; emit() is called once per outgoing message."""

    def __init__(self, emit: Emit, limits: Limits = Limits(), text: str | None = None,
                 filename: str = "<session>"):
        self._emit = emit
        self._limits = limits
        self._filename = filename
        self._text: str | None = None
        self._state: RunState | None = None
        self._result: RunResult | None = None
        self._queued: list[Event] = []
        if text is not None:
            self._load(text)

    # -- incoming

    def handle_line(self, line: str) -> None:
        line = line.strip()
        if not line:
            return
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            self._error(ERROR_BAD_JSON, f"not JSON: {exc.msg}")
            return
        if not isinstance(msg, dict) or len(msg) != 1:
            self._error(ERROR_BAD_MESSAGE, 'expected exactly one of {"load"}, {"event"}, {"reset"}')
            return
        key, value = next(iter(msg.items()))
        if key == "load":
            if not isinstance(value, str):
                self._error(ERROR_BAD_MESSAGE, '"load" takes the program text as a string')
                return
            self._load(value)
        elif key == "reset":
            if value is not True:
                self._error(ERROR_BAD_MESSAGE, '"reset" takes true')
                return
            if self._text is None:
                self._error(ERROR_NO_PROGRAM, "nothing loaded yet")
                return
            self._load(self._text)
        elif key == "event":
            if not isinstance(value, str):
                self._error(ERROR_BAD_MESSAGE, '"event" takes a dotted path string')
                return
            self._event(value)
        else:
            self._error(ERROR_BAD_MESSAGE, f"unknown message key {key!r}")

    # -- internals

    def _load(self, text: str) -> None:
        try:
            program, goal = parse_program(text, self._filename)
        except ParseError as exc:
            self._error(ERROR_PARSE, str(exc))
            return
        self._text = text
        self._state = new_state(program, goal)
        self._queued.clear()
        self._advance()

    def _event(self, path_text: str) -> None:
        if self._state is None or self._result is None:
            self._error(ERROR_NO_PROGRAM, "nothing loaded yet")
            return
        try:
            address = Address.parse(path_text)
        except InvalidAddressError:
            self._error(ERROR_BAD_PATH, f"not a dotted path: {path_text!r}")
            return
        event = Event(address)
        if self._result.verdict is not Verdict.STABLE_WAITING:
            # the run already ended; hold the event and say so
            self._queued.append(event)
            reply = snapshot(self._state)
            self._emit({"state": reply, "queued": True})
            return
        try:
            switch = exs_apply(self._state.program, event)
        except InvalidAddressError as exc:
            self._error(ERROR_BAD_PATH, str(exc))
            return
        self._state.program = switch.new_program
        self._advance()

    def _advance(self) -> None:
        assert self._state is not None

        def on_status(state: RunState) -> None:
            self._emit({"state": snapshot(state)})

        def on_move(state: RunState, outcome) -> None:
            for line in outcome.output:
                self._emit({"output": line})

        result = run_loop(self._state, _NoEvents(), self._limits, on_status, on_move)
        self._result = result
        if result.verdict is Verdict.SUCCEEDED:
            self._emit({"verdict": result.verdict.label})
        elif result.verdict is Verdict.FAILED:
            body: dict = {"verdict": result.verdict.label}
            if result.diagnostic:
                body["diagnostic"] = result.diagnostic
            self._emit(body)

    def _error(self, code: str, message: str) -> None:
        self._emit({"error": {"code": code, "message": message}})


class _NoEvents:
    """Events reach the session as messages, never through the loop."""

    def next(self):
        return None


# ---------------------------------------------------------------------------
# Transports

def serve_stdio(text: str | None, limits: Limits = Limits(),
                infile: TextIO = None, outfile: TextIO = None,
                filename: str = "<session>") -> None:
    infile = infile if infile is not None else sys.stdin
    outfile = outfile if outfile is not None else sys.stdout

    def emit(obj: dict) -> None:
        outfile.write(_dumps(obj) + "\n")
        outfile.flush()

    session = Session(emit, limits, text, filename)
    for line in infile:
        session.handle_line(line)


def serve_tcp(text: str | None, host: str, port: int, limits: Limits = Limits(),
              once: bool = False, filename: str = "<session>",
              ready: Callable[[int], None] | None = None) -> None:
    """One session per connection, one connection at a time."""
    server = socket.create_server((host, port))
    try:
        if ready is not None:
            ready(server.getsockname()[1])
        while True:
            conn, _addr = server.accept()
            reader = conn.makefile("r", encoding="utf-8", newline="\n")
            writer = conn.makefile("w", encoding="utf-8", newline="\n")

            def emit(obj: dict) -> None:
                writer.write(_dumps(obj) + "\n")
                writer.flush()

            session = Session(emit, limits, text, filename)
            try:
                for line in reader:
                    session.handle_line(line)
            except (BrokenPipeError, ConnectionResetError):
                pass
            finally:
                for closable in (reader, writer, conn):
                    try:
                        closable.close()
                    except OSError:
                        pass
            if once:
                return
    finally:
        server.close()
