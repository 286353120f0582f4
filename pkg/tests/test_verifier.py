import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from roughreason.rough import sample_corpus_path
from roughreason.terms import Equation, Num, Op, Var, parse_equation, solution_set
from roughreason.verifier import (
    ArgumentNotPresent, DefectLedger, Rubric, RuleApplication, RuleError, ScriptSyntaxError,
    apply_rule, check_step, ledger_markdown, parse_solution, read_solution, verify_solution,
)
from roughreason.terms import DivisionByZeroError

from .strategies import linear_equations

E = parse_equation
R = RuleApplication.parse


def same_sides(x: Equation, y: Equation) -> bool:
    from roughreason.terms import expand
    return (expand(x.lhs), expand(x.rhs)) == (expand(y.lhs), expand(y.rhs))


# ---------------------------------------------------------------------------
# rules


def test_rule_argument_contract():
    with pytest.raises(RuleError):
        RuleApplication("add")
    with pytest.raises(RuleError):
        RuleApplication("simplify", Num(1))
    with pytest.raises(RuleError):
        R("rotate 2")
    assert str(R("transpose 2x + 3")) == "transpose 2x + 3"
    assert R("transpose").argument is None


def test_cancel_divides_every_addend():
    assert str(apply_rule(E("2x+3 = 4x+1"), R("cancel 2"))) == "x + 3/2 = 2x + 1/2"


def test_subtract_wraps_both_sides():
    assert apply_rule(E("x+3 = 2x+1"), R("subtract 3")) == E("x+3-3 = 2x+1-3")


def test_transpose_single_addend():
    assert apply_rule(E("2x+3 = 4x+1"), R("transpose 1")) == E("2x+3-1 = 4x")


def test_transpose_whole_side():
    assert apply_rule(E("2x+3 = 4x+1"), R("transpose 2x+3")) == E("0 = 4x+1-(2x+3)")


def test_transpose_negative_addend():
    assert same_sides(apply_rule(E("0 = 2x-2"), R("transpose 2")), E("2 = 2x"))


def test_transpose_missing_argument():
    with pytest.raises(ArgumentNotPresent):
        apply_rule(E("2x+3 = 4x+1"), R("transpose 5"))


def test_divide_by_zero():
    with pytest.raises(DivisionByZeroError):
        apply_rule(E("2x = 4"), R("divide 0"))


def test_simplify_collects_each_side():
    assert str(apply_rule(E("x+3-3 = 2x+1-3"), R("simplify"))) == "x = 2x - 2"


def test_given_is_not_a_transformation():
    with pytest.raises(RuleError):
        apply_rule(E("x = 1"), R("given"))


# ---------------------------------------------------------------------------
# step checks


def test_partial_cancel_is_unsound_with_three_points():
    v = check_step(E("2x+3 = 4x+1"), E("x+3 = 2x+1"), R("cancel 2"))
    assert (v.classification, v.severity) == ("unsound", 3)
    assert v.corrected == "x + 3/2 = 2x + 1/2"


def test_partial_cancel_leaving_one_addend():
    v = check_step(E("2x+2 = 4x"), E("x+2 = 2x"), R("cancel 2"))
    assert (v.classification, v.severity) == ("unsound", 2)


def test_correct_equation_under_wrong_rule_is_mislabeled():
    v = check_step(E("x+2-x = 2x-x"), E("x = 2"), R("transpose"))
    assert (v.classification, v.severity) == ("mislabeled", 0)
    assert "simplify" in v.diagnosis


def test_other_unsound_rules_weigh_one():
    v = check_step(E("x+3 = 2x+1"), E("x = 2x+1"), R("subtract 3"))
    assert (v.classification, v.severity) == ("unsound", 1)


def test_outside_vocabulary():
    v = check_step(E("x = 2"), E("x+x = 4"), R("add 5"))
    assert v.classification == "mislabeled" and "multiply 2" in v.diagnosis
    # valid, but no single rule gives it, and the declared rule would lose the solution
    v = check_step(E("2x = 4"), E("x - 1 = 1"), R("multiply 0"))
    assert v.classification == "mislabeled" and v.diagnosis.endswith("rule outside vocabulary")


def test_solution_preserving_rewrite_of_the_genuine_result_is_sound():
    # not what "add 1" literally produces, and no single rule produces it,
    # yet it has the solutions of both the previous equation and that result
    v = check_step(E("2x = 4"), E("x + 1 = 3"), R("add 1"))
    assert v.classification == "sound" and v.diagnosis.startswith("accepted")


def test_verdict_invariants():
    from roughreason.verifier import StepVerdict
    with pytest.raises(ValueError):
        StepVerdict("sound", 1)
    with pytest.raises(ValueError):
        StepVerdict("mislabeled", 0, "")
    with pytest.raises(ValueError):
        StepVerdict("unsound", 0, "x")


def test_rubric_overrides():
    rubric = Rubric(unsound_base=2, untouched_addend_weight=3)
    v = check_step(E("2x+3 = 4x+1"), E("x+3 = 2x+1"), R("cancel 2"), rubric)
    assert v.severity == 2 + 3 * 2
    with pytest.raises(ValueError):
        Rubric.from_json({"mislabeled": 1})
    with pytest.raises(ValueError):
        Rubric.from_json({"bonus": 1})
    assert Rubric.from_json(Rubric().to_json()) == Rubric()


# ---------------------------------------------------------------------------
# scripts and ledgers


def _ledger(sid):
    return verify_solution(read_solution(sample_corpus_path() / f"{sid}.sol"))


def test_first_corpus_solution():
    lg = _ledger("S1")
    assert lg.severities == (0, 3, 0, 0, 0, 0)
    assert lg.total_severity == 3
    assert str(lg.final_answer) == "{2}" and str(lg.true_answer) == "{1}"
    assert lg.correct_answer is False


def test_second_corpus_solution():
    lg = _ledger("S2")
    assert lg.severities == (0, 0, 0, 2, 0, 0)
    assert [v.classification for v in lg.verdicts] == ["sound"] * 3 + ["unsound", "sound", "mislabeled"]


@pytest.mark.parametrize("sid", ["S3", "S5"])
def test_proper_solutions(sid):
    lg = _ledger(sid)
    assert lg.flagged() == [] and lg.total_severity == 0
    assert str(lg.final_answer) == "{1}" and lg.correct_answer


@pytest.mark.parametrize("sid", ["S6", "S9"])
def test_graphical_solutions_are_not_verified(sid):
    lg = _ledger(sid)
    assert not lg.verifiable and lg.verdicts == () and lg.correct_answer is None
    assert len(lg.steps) >= 3


def test_ledger_json_round_trip():
    for sid in ("S1", "S2", "S6"):
        lg = _ledger(sid)
        assert DefectLedger.from_json(json.loads(json.dumps(lg.to_json()))) == lg


def test_ledger_markdown():
    text = ledger_markdown([_ledger("S1"), _ledger("S6")])
    assert "| 2 | x+3 = 2x+1 | cancel 2 | unsound | 3 |" in text
    assert "not verifiable" in text


def test_parse_six_line_script():
    text = (sample_corpus_path() / "S1.sol").read_text()
    script = parse_solution(text)
    assert len(script.steps) == 6
    assert script.steps[-1].equation == E("x = 2")
    assert script.steps[-1].remark == "0 = 2-x"


def test_parse_given_only():
    script = parse_solution("given: 2x+3 = 4x+1\n")
    assert len(script.steps) == 1
    lg = verify_solution(script)
    assert lg.severities == (0,) and lg.final_answer == lg.true_answer


@pytest.mark.parametrize("text, line", [
    ("given: x = 1\nstep: x = 1 ; rotate 2\n", 2),
    ("given: x = 1\nstep: x = 1\n", 2),
    ("step: x = 1 ; simplify\n", 1),
    ("given: x = 1\n\n\nstep: x = = 1 ; simplify\n", 4),
    ("given: x = 1\nwhat: is this\n", 2),
    ("", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ScriptSyntaxError) as err:
        parse_solution(text)
    assert err.value.line == line


def test_graphical_script_rejects_steps():
    with pytest.raises(ScriptSyntaxError):
        parse_solution("subdomain: graphical\ngiven: x = 1\nstep: x = 1 ; simplify\n")


# ---------------------------------------------------------------------------
# properties

small = st.integers(1, 6).map(lambda k: Num(Fraction(k)))


@st.composite
def valid_rules(draw, e: Equation):
    kind = draw(st.sampled_from(["add", "subtract", "multiply", "divide", "cancel",
                                 "transpose", "simplify"]))
    if kind == "simplify":
        return RuleApplication("simplify")
    if kind == "transpose":
        from roughreason.terms import addends
        options = [t for side in (e.lhs, e.rhs) for _, t in addends(side)]
        return RuleApplication("transpose", draw(st.sampled_from(options)))
    if kind in ("add", "subtract"):
        arg = draw(st.one_of(small, st.just(Var("x")),
                             small.map(lambda n: Op("*", (n, Var("x"))))))
        return RuleApplication(kind, arg)
    return RuleApplication(kind, draw(small))


@st.composite
def chains(draw):
    left, right = draw(linear_equations())
    e = Equation(left, right)
    rules = []
    for _ in range(draw(st.integers(1, 6))):
        r = draw(valid_rules(e))
        rules.append(r)
        e = apply_rule(e, r)
    return Equation(left, right), rules


@settings(max_examples=150, deadline=None)
@given(chains())
def test_rules_preserve_solution_sets(chain):
    e, rules = chain
    expected = solution_set(e)
    for r in rules:
        e = apply_rule(e, r)
        assert solution_set(e) == expected


@settings(max_examples=100, deadline=None)
@given(linear_equations(), small)
def test_divide_then_multiply(sides, k):
    e = Equation(*sides)
    back = apply_rule(apply_rule(e, RuleApplication("divide", k)), RuleApplication("multiply", k))
    assert solution_set(back) == solution_set(e)


@settings(max_examples=100, deadline=None)
@given(chains())
def test_verdicts_are_symmetric_under_side_swap_and_sound_along_genuine_chains(chain):
    e, rules = chain
    for r in rules:
        nxt = apply_rule(e, r)
        assert check_step(e, nxt, r).classification == "sound"
        assert check_step(e, nxt.swapped(), r).classification == "sound"
        e = nxt


@settings(max_examples=150, deadline=None)
@given(linear_equations(), linear_equations(), st.data())
def test_mislabeled_never_changes_solutions_and_severity_tracks_unsound(p, q, data):
    prev, claimed = Equation(*p), Equation(*q)
    r = data.draw(valid_rules(prev))
    v = check_step(prev, claimed, r)
    if v.classification == "mislabeled":
        assert solution_set(prev) == solution_set(claimed)
    assert (v.severity == 0) == (v.classification != "unsound")
