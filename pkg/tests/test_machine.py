import pytest

from seqc.errors import DepthExceededError, RunFatalError
from seqc.machine import ex_m_step
from seqc.parser import parse_goal_text, parse_program
from seqc.syntax import (
    Assign,
    Call,
    IntLit,
    IntV,
    Print,
    Seq,
    SeqChoiceG,
    StrV,
    Subst,
    Top,
    TOP,
    Var,
)


def parts_of(text: str):
    return parse_program(text)


NO_DECLS, _ = parse_program("decls { unused == 0 } goal { skip }")


def step(goal_text: str, theta=None, program=NO_DECLS, **kw):
    goal = parse_goal_text(goal_text)
    return goal, ex_m_step(program, goal, theta or Subst(), **kw)


def test_skip_needs_no_move():
    goal, out = step("skip")
    assert out is not None and not out.moved
    assert out.new_goal is goal
    assert out.output == ()


def test_true_condition_needs_no_move_and_false_fails():
    _, out = step("1 == 1")
    assert out is not None and not out.moved
    _, out = step("1 == 2")
    assert out is None
    _, out = step("x == 1")  # unbound: the guard cannot be checked
    assert out is None


def test_assign_binds_and_becomes_skip():
    _, out = step("x = 2 + 3")
    assert out.moved and out.new_goal == TOP
    assert out.new_theta.get("x") == IntV(5)
    assert out.output == () and out.rule == "8" and out.move_path == ()


def test_assign_failure_is_no_rule():
    _, out = step("x = y + 1")
    assert out is None
    _, out = step("x = 1 / 0")
    assert out is None


def test_print_emits_and_becomes_skip():
    theta = Subst().bind("x", StrV("$5"))
    _, out = step("print(x)", theta)
    assert out.moved and out.new_goal == TOP
    assert out.output == ("$5",) and out.rule == "9"
    assert out.new_theta is theta


def test_print_unbound_is_fatal():
    with pytest.raises(RunFatalError):
        step("print(x)")


def test_seq_moves_in_first_part_first():
    goal, out = step("x = 1; y = 2")
    assert out.moved
    assert out.new_goal == Seq(TOP, Assign("y", IntLit(2)))
    assert out.move_path == (0,)


def test_seq_passes_over_settled_prefix():
    goal, out = step("skip; 1 == 1; y = 2")
    assert out.moved
    assert out.new_goal == Seq(TOP, Seq(parse_goal_text("1 == 1"), TOP))
    assert out.new_theta.get("y") == IntV(2)
    assert out.move_path == (1, 1)


def test_seq_fails_at_first_failing_part():
    _, out = step("1 == 2; y = 2")
    assert out is None  # the pending assignment never fires


def test_seq_with_nothing_to_do():
    goal, out = step("skip; 1 == 1")
    assert out is not None and not out.moved
    assert out.new_goal is goal


def test_choice_advances_inside_first_alternative():
    goal, out = step("choice(x = 1; print(x), skip)")
    assert out.moved and out.rule == "advance"
    assert out.move_path == (0, 0)
    assert isinstance(out.new_goal, SeqChoiceG)
    assert len(out.new_goal.alternatives) == 2
    assert out.new_goal.alternatives[1] == TOP


def test_choice_switches_when_first_alternative_fails():
    goal, out = step("choice(1 == 2; x = 1, y = 3)")
    assert out.moved and out.rule == "11" and out.move_path == ()
    assert out.new_goal == SeqChoiceG((Assign("y", IntLit(3)),))
    assert out.new_theta.items() == Subst().items()
    assert out.output == ()


def test_choice_with_no_alternative_left_fails():
    _, out = step("choice(1 == 2, 2 == 3)")
    assert out.moved  # first switch drops the front
    assert ex_m_step(NO_DECLS, out.new_goal, Subst()) is None


def test_choice_settled_first_alternative_is_no_move():
    goal, out = step("choice(skip, x = 1)")
    assert out is not None and not out.moved
    assert out.new_goal is goal


def test_call_pastes_evaluated_arguments():
    program, _ = parts_of("decls { f(p) = { x = p + 1 } } goal { skip }")
    _, out = step("f(2 * 3)", program=program)
    assert out.moved and out.rule == "call"
    assert out.new_goal == TOP  # the body stepped: x = 7 became skip
    assert out.new_theta.get("x") == IntV(7)


def test_call_argument_failure_is_no_rule():
    program, _ = parts_of("decls { f(p) = { x = p } } goal { skip }")
    _, out = step("f(y + 1)", program=program)
    assert out is None


def test_call_uses_first_matching_declaration():
    program, _ = parts_of(
        "decls { choice(f() = { x = 1 }, f() = { x = 2 }) } goal { skip }"
    )
    _, out = step("f()", program=program)
    assert out.new_theta.get("x") == IntV(1)


def test_call_falls_through_failing_declarations():
    program, _ = parts_of(
        "decls { f(p) = { p > 5; x = p }; f(p) = { y = p } } goal { skip }"
    )
    _, out = step("f(1)", program=program)
    assert out.moved and out.new_theta.get("y") == IntV(1)
    assert out.new_theta.get("x") is None


def test_call_with_settled_body_stays_a_call():
    program, _ = parts_of("decls { f(p) = { p >= 0 } } goal { skip }")
    goal, out = step("f(3)", program=program)
    assert out is not None and not out.moved
    assert out.new_goal is goal  # the call is not unfolded in place


def test_call_nobody_answers():
    _, out = step("ghost(1)")
    assert out is None
    program, _ = parts_of("decls { f(p) = { skip } } goal { skip }")
    _, out = step("f(1, 2)", program=program)  # wrong arity
    assert out is None


def test_unfold_depth_guard():
    program, _ = parts_of("decls { loop() = { loop() } } goal { skip }")
    with pytest.raises(DepthExceededError):
        step("loop()", program=program)
    # a shallow bound trips earlier
    with pytest.raises(DepthExceededError):
        step("loop()", program=program, max_unfold=2)


def test_labels_survive_sequencing_but_not_choices():
    goal, out = step("skip; choice(1 == 2; x = 1, print(z), y = 1)")
    # sequencing keeps the inner label; the switch is at the choice node
    assert out.moved and out.rule == "11"
    assert out.move_path == (1,)


def test_no_move_returns_the_same_objects():
    theta = Subst().bind("x", IntV(1))
    goal = parse_goal_text("skip; x == 1")
    out = ex_m_step(NO_DECLS, goal, theta)
    assert not out.moved
    assert out.new_goal is goal and out.new_theta is theta
