"""Command line front end.

    seqc run <file>    execute; exit code mirrors the verdict
    seqc check <file>  parse and report the initial status
    seqc serve <file>  session protocol on stdio, or TCP with --listen
    seqc fmt <file>    canonical formatting

run prints program output on stdout and keeps everything else (trace,
prompts, diagnostics) on stderr, so piped output is exactly what the
program printed.  Exit codes: 0 Succeeded, 1 Failed, 2 StableWaiting,
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ParseError, SeqcError
from .machine import MoveOutcome
from .parser import format_program, parse_program, pretty_program
from .runtime import (
    Limits,
    RunState,
    ScriptedSource,
    Verdict,
    new_state,
    run_loop,
)
from .session import serve_stdio, serve_tcp
from .stability import explain_stability, stable_status
from .syntax import Event, Subst, format_value, iter_choices
from .user import parse_event_line, read_events_file

USAGE_ERROR = 3


def _read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SystemExit(f"seqc: cannot read {path}: {exc.strerror}")


class _InteractiveSource:
    """Prompts on stderr, reads one event per line from stdin."""

    def __init__(self, state: RunState):
        self._state = state

    def next(self) -> Event | None:
        while True:
            print("esc? ", end="", file=sys.stderr, flush=True)
            line = sys.stdin.readline()
            if not line:
                print(file=sys.stderr)
                return None
            try:
                event = parse_event_line(line, self._state.program, filename="<stdin>")
            except ParseError as exc:
                print(f"seqc: {exc.message}", file=sys.stderr)
                continue
            if event is not None:
                return event


def _cmd_run(args: argparse.Namespace) -> int:
    text = _read_source(args.file)
    program, goal = parse_program(text, args.file)
    state = new_state(program, goal)
    if args.interactive:
        source = _InteractiveSource(state)
    elif args.events:
        source = ScriptedSource(read_events_file(args.events, program))
    else:
        source = ScriptedSource([])
    limits = Limits(max_moves=args.max_moves, max_unfold=args.max_unfold)

    prev_theta = Subst()

    def on_status(st: RunState) -> None:
        if args.explain_stability:
            print(f"--- position after {st.move_count} move(s) ---", file=sys.stderr)
            print(explain_stability(st.program, st.goal, st.theta, limits.max_unfold), file=sys.stderr)

    def on_move(st: RunState, outcome: MoveOutcome) -> None:
        nonlocal prev_theta
        for line in outcome.output:
            print(line, flush=True)
        if args.trace:
            delta = ", ".join(
                f"{name}={format_value(value)}"
                for name, value in sorted(st.theta.items())
                if prev_theta.get(name) != value
            )
            path = ".".join(str(i) for i in outcome.move_path) if outcome.move_path else "(root)"
            print(
                f"MOVE {st.move_count}: rule={outcome.rule} goal-path={path} theta={delta or '-'}",
                file=sys.stderr,
            )
        prev_theta = st.theta

    result = run_loop(state, source, limits, on_status, on_move)
    if result.diagnostic:
        print(f"seqc: {result.diagnostic}", file=sys.stderr)
    return result.verdict.exit_code


def _cmd_check(args: argparse.Namespace) -> int:
    text = _read_source(args.file)
    program, goal = parse_program(text, args.file)
    status = stable_status(program, goal, Subst())
    print(f"status: {status.label} ({status.code})")
    for addr, node in iter_choices(program):
        path = addr.dotted() or "(root)"
        print(f"choice at {path}: {len(node.alternatives)} alternatives")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    text = _read_source(args.file)
    parse_program(text, args.file)  # fail fast before opening a transport
    limits = Limits(max_moves=args.max_moves, max_unfold=args.max_unfold)
    if args.listen:
        host, _, port_text = args.listen.rpartition(":")
        host = host or "127.0.0.1"
        try:
            port = int(port_text)
        except ValueError:
            raise SystemExit(f"seqc: --listen wants HOST:PORT, got {args.listen!r}")

        def ready(bound_port: int) -> None:
            print(f"listening on {host}:{bound_port}", file=sys.stderr, flush=True)

        try:
            serve_tcp(text, host, port, limits, filename=args.file, ready=ready)
        except KeyboardInterrupt:
            return 130
        return 0
    serve_stdio(text, limits, filename=args.file)
    return 0


def _cmd_fmt(args: argparse.Namespace) -> int:
    text = _read_source(args.file)
    program, goal = parse_program(text, args.file)
    out = format_program(program, goal)
    if args.addresses:
        notes = [
            f"% choice at {addr.dotted() or '(root)'}: {len(node.alternatives)} alternatives,"
            f" active: {pretty_program(node.alternatives[0])}"
            for addr, node in iter_choices(program)
        ]
        if notes:
            out += "\n".join(notes) + "\n"
    sys.stdout.write(out)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a program")
    run_p.add_argument("file")
    events_group = run_p.add_mutually_exclusive_group()
    events_group.add_argument("--events", help="scripted events file, one 'esc <path>' per line")
    events_group.add_argument("--interactive", action="store_true", help="read events from stdin")
    run_p.add_argument("--trace", action="store_true", help="log each machine move to stderr")
    run_p.add_argument("--max-unfold", type=int, default=64, help="call/constant unfolding bound")
    run_p.add_argument("--max-moves", type=int, default=10000, help="machine move budget")
    run_p.add_argument(
        "--explain-stability", action="store_true", help="dump the stability reasoning at every step"
    )
    run_p.set_defaults(fn=_cmd_run)

    check_p = sub.add_parser("check", help="parse and report the initial status")
    check_p.add_argument("file")
    check_p.set_defaults(fn=_cmd_check)

    serve_p = sub.add_parser("serve", help="speak the session protocol")
    serve_p.add_argument("file")
    serve_p.add_argument("--listen", help="serve over TCP at HOST:PORT instead of stdio")
    serve_p.add_argument("--max-unfold", type=int, default=64)
    serve_p.add_argument("--max-moves", type=int, default=10000)
    serve_p.set_defaults(fn=_cmd_serve)

    fmt_p = sub.add_parser("fmt", help="print the canonical formatting")
    fmt_p.add_argument("file")
    fmt_p.add_argument("--addresses", action="store_true", help="append a choice-address listing")
    fmt_p.set_defaults(fn=_cmd_fmt)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; fold into our usage code
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"seqc: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return USAGE_ERROR
        raise
    except SeqcError as exc:
        print(f"seqc: {exc}", file=sys.stderr)
        return Verdict.FAILED.exit_code


if __name__ == "__main__":
    sys.exit(main())
