import io
import json
import socket
import threading

from seqc.runtime import Limits
from seqc.session import Session, serve_stdio, serve_tcp

STUCK = "decls { k == 1 } goal { 1 == 2; x = 1 }"


def make_session(text=None):
    log: list[dict] = []
    session = Session(log.append, text=text)
    return session, log


def keys(log):
    return [next(iter(m)) for m in log]


def statuses(log):
    return [m["state"]["status"] for m in log if "state" in m]


def test_load_runs_to_the_first_pause(bmw_text):
    session, log = make_session()
    session.handle_line(json.dumps({"load": bmw_text}))
    assert keys(log) == ["state", "state", "output", "state"]
    assert statuses(log) == ["MachineMove", "MachineMove", "UserMove"]
    assert log[2] == {"output": "$32,000"}
    assert [m["state"]["move_count"] for m in log if "state" in m] == [0, 1, 2]
    # paused, not ended: no verdict message
    assert "verdict" not in keys(log)


def test_full_session_stream(bmw_text):
    session, log = make_session(bmw_text)
    session.handle_line('{"event":"0"}')
    session.handle_line('{"event":"0"}')
    assert statuses(log) == [
        "MachineMove", "MachineMove", "UserMove",
        "MachineMove", "MachineMove", "MachineMove", "UserMove",
        "MachineMove", "MachineMove", "MachineMove", "Terminal",
    ]
    assert [m["output"] for m in log if "output" in m] == ["$32,000", "$54,000", "$82,200"]
    assert log[-1] == {"verdict": "Succeeded"}
    # every print lands before the snapshot that reflects it
    for i, msg in enumerate(log):
        if "output" in msg:
            assert "state" in log[i + 1]


def test_remaining_alternatives_shrink(bmw_text):
    session, log = make_session(bmw_text)
    session.handle_line('{"event":"0"}')
    session.handle_line('{"event":"0"}')
    remaining = [m["state"]["choices"][0]["remaining"] for m in log if "state" in m]
    assert remaining == [3, 3, 3, 2, 2, 2, 2, 1, 1, 1, 1]


def test_event_before_load():
    session, log = make_session()
    session.handle_line('{"event":"0"}')
    assert log == [{"error": {"code": "no_program", "message": "nothing loaded yet"}}]


def test_reset_before_load():
    session, log = make_session()
    session.handle_line('{"reset":true}')
    assert log[0]["error"]["code"] == "no_program"


def test_bad_json_keeps_the_session_alive(bmw_text):
    session, log = make_session()
    session.handle_line("{oops")
    assert log[0]["error"]["code"] == "bad_json"
    session.handle_line(json.dumps({"load": bmw_text}))
    assert statuses(log)[-1] == "UserMove"


def test_bad_message_shapes():
    session, log = make_session()
    for line in ('{"load":1}', '{"reset":false}', '{"event":5}',
                 '{"nope":true}', '{"load":"x","event":"0"}', "[1,2]", '"load"'):
        session.handle_line(line)
    assert [m["error"]["code"] for m in log] == ["bad_message"] * 7


def test_bad_paths(bmw_text):
    session, log = make_session(bmw_text)
    before = len(log)
    session.handle_line('{"event":"a.b"}')
    session.handle_line('{"event":"9"}')
    assert [m["error"]["code"] for m in log[before:]] == ["bad_path", "bad_path"]
    assert log[-1]["error"]["message"] == "invalid address 9"
    # the run is untouched and still accepts the right switch
    session.handle_line('{"event":"0"}')
    assert log[-1]["state"]["status"] == "UserMove"


def test_parse_error_reply():
    session, log = make_session()
    session.handle_line('{"load":"decls { goal { skip }"}')
    assert log[0]["error"]["code"] == "parse_error"
    assert "<session>:1:" in log[0]["error"]["message"]
    session.handle_line('{"load":"decls { k == 1 } goal { skip }"}')
    assert log[-1] == {"verdict": "Succeeded"}


def test_failed_run_reports_a_diagnostic():
    session, log = make_session(STUCK)
    assert statuses(log) == ["MachineStuck"]
    assert log[-1]["verdict"] == "Failed"
    assert "stuck" in log[-1]["diagnostic"]


def test_post_verdict_events_are_queued_not_applied(bmw_text):
    session, log = make_session(bmw_text)
    session.handle_line('{"event":"0"}')
    session.handle_line('{"event":"0"}')
    initial = [m for m in log]
    session.handle_line('{"event":"0"}')
    ack = log[-1]
    assert ack["queued"] is True
    assert ack["state"]["status"] == "Terminal"
    # reset discards the queue: the replay matches the original stream exactly
    log.clear()
    session.handle_line('{"reset":true}')
    session.handle_line('{"event":"0"}')
    session.handle_line('{"event":"0"}')
    assert log == initial


def test_blank_lines_are_ignored(bmw_text):
    session, log = make_session(bmw_text)
    n = len(log)
    session.handle_line("")
    session.handle_line("   \n")
    assert len(log) == n


def test_load_replaces_the_running_program(bmw_text):
    session, log = make_session(bmw_text)
    log.clear()
    session.handle_line('{"load":"decls { k == 1 } goal { x = 5; print(x) }"}')
    assert [m["state"]["move_count"] for m in log if "state" in m] == [0, 1, 2]
    assert [m["output"] for m in log if "output" in m] == ["5"]
    assert log[-1] == {"verdict": "Succeeded"}


def run_stdio(bmw_text, lines):
    out = io.StringIO()
    serve_stdio(bmw_text, Limits(), io.StringIO("".join(lines)), out)
    return out.getvalue()


def test_stdio_transport_and_replay_are_byte_identical(bmw_text):
    lines = ['{"event":"0"}\n', '{"event":"0"}\n']
    first = run_stdio(bmw_text, lines)
    second = run_stdio(bmw_text, lines)
    assert first == second
    emitted = first.splitlines()
    assert len(emitted) == 15
    assert emitted[-1] == '{"verdict":"Succeeded"}'
    for line in emitted:
        parsed = json.loads(line)
        assert json.dumps(parsed, ensure_ascii=False, separators=(",", ":")) == line


def test_tcp_transport(bmw_text):
    port_box: list[int] = []
    ready = threading.Event()

    def note_port(port: int) -> None:
        port_box.append(port)
        ready.set()

    server = threading.Thread(
        target=serve_tcp,
        args=(bmw_text, "127.0.0.1", 0),
        kwargs={"once": True, "ready": note_port},
        daemon=True,
    )
    server.start()
    assert ready.wait(5)
    with socket.create_connection(("127.0.0.1", port_box[0]), timeout=5) as conn:
        conn.sendall(b'{"event":"0"}\n{"event":"0"}\n')
        conn.shutdown(socket.SHUT_WR)
        data = b""
        while chunk := conn.recv(4096):
            data += chunk
    server.join(5)
    lines = data.decode("utf-8").splitlines()
    assert len(lines) == 15
    assert json.loads(lines[-1]) == {"verdict": "Succeeded"}
