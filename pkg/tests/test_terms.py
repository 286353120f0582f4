from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from roughreason import UNDEFINED
from roughreason.terms import (
    DivisionByZeroError, Equation, Inequality, MultiVariableError, NonLinearError, Num, Op,
    SolutionSet, TermSyntaxError, UnboundVariableError, UnknownSymbolError, Var, addends,
    eval_term, expand, normalize_linear, parse_equation, parse_relation, parse_term,
    print_term, solution_set,
)

from .strategies import rationals, terms

F = Fraction


def test_parse_linear_term():
    assert parse_term("2x+3") == Op("+", (Op("*", (Num(2), Var("x"))), Num(3)))


def test_parse_constant():
    assert parse_term("0") == Num(0)


def test_rational_literal_is_reduced():
    assert parse_term("-(2/4)x") == Op("*", (Op("neg", (Num(F(1, 2)),)), Var("x")))


def test_fraction_bar_and_division_sign_share_a_node():
    assert parse_term("x/y") == parse_term("x ÷ y") == Op("/", (Var("x"), Var("y")))


def test_sign_operators():
    assert parse_term("⊖⊖a") == Op("neg", (Op("neg", (Var("a"),)),))
    assert parse_term("⊕a") == Op("pos", (Var("a"),))


def test_sqrt_synonyms():
    assert parse_term("sqrt(4)") == parse_term("√(4)") == Op("sqrt", (Num(4),))


def test_greater_equal_is_rewritten():
    assert parse_relation("x ≥ 2") == Inequality(Num(2), Var("x"))
    assert parse_relation("x >= 2") == parse_relation("2 <= x")


@pytest.mark.parametrize("text", ["", "2x+", "(x", "x)", "2 = = 3", "x @ y", "ab+"])
def test_syntax_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text)


def test_unknown_symbol_reports_position():
    with pytest.raises(UnknownSymbolError) as err:
        parse_term("x + $")
    assert err.value.position == 4


@pytest.mark.parametrize("text, printed", [
    ("2x+3", "2x + 3"),
    ("1", "1"),
    ("√(4)", "√(4)"),
    ("x - (y - z)", "x - (y - z)"),
    ("(x - y) - z", "x - y - z"),
    ("2 ÷ (x × y)", "2 ÷ (xy)"),
])
def test_print(text, printed):
    assert print_term(parse_term(text)) == printed


@settings(max_examples=300)
@given(terms())
def test_round_trip(t):
    assert parse_term(print_term(t)) == t


def test_eval_division_by_zero_is_undefined():
    assert eval_term(parse_term("x ÷ 0"), {"x": F(3)}) is UNDEFINED


def test_eval_identity():
    assert eval_term(parse_term("x + 0"), {"x": F(5)}) == 5


def test_eval_square_roots():
    assert eval_term(parse_term("√(4) × √(9)")) == 6 == eval_term(parse_term("√(36)"))
    assert eval_term(parse_term("√(2)")) is UNDEFINED
    assert eval_term(parse_term("√(0 - 4)")) is UNDEFINED


def test_unbound_variable():
    with pytest.raises(UnboundVariableError):
        eval_term(parse_term("x + 1"), {})


@given(terms(), st.lists(rationals, min_size=6, max_size=6))
def test_undefined_propagates_strictly(t, values):
    env = dict(zip("abcxyz", values))
    bad = Op("/", (Num(1), Num(0)))
    for wrapped in (Op("+", (t, bad)), Op("*", (bad, t)), Op("neg", (bad,)), Op("sqrt", (bad,))):
        assert eval_term(wrapped, env) is UNDEFINED


@given(rationals, rationals, rationals)
def test_sampled_axioms(a, b, c):
    env = {"a": a, "b": b, "c": c}

    def ev(text):
        return eval_term(parse_term(text), env)

    assert ev("a × (b + c)") == ev("a × b + a × c")
    assert ev("a + 0") == ev("a × 1") == a
    assert ev("⊖⊖a") == a
    assert ev("(⊖a) × (⊖b)") == ev("a × b")
    assert ev("a + ⊖a") == 0
    if b != 0:
        assert ev("(a ÷ b) × b") == a
    else:
        assert ev("a ÷ b") is UNDEFINED


@given(rationals, rationals)
def test_square_root_laws_hold_weakly(a, b):
    # both sides agree whenever both are defined; definedness is not required
    env = {"a": a, "b": b}
    lhs = eval_term(parse_term("√(a) × √(a)"), env)
    if lhs is not UNDEFINED:
        assert lhs == a
    s1 = eval_term(parse_term("√(a) × √(b)"), env)
    s2 = eval_term(parse_term("√(a × b)"), env)
    if s1 is not UNDEFINED and s2 is not UNDEFINED:
        assert s1 == s2


def test_normalize_given_equation():
    nf = normalize_linear(parse_equation("2x+3 = 4x+1"))
    assert (nf.variable, nf.coefficient, nf.constant) == ("x", 2, -2)
    assert str(nf) == "2x - 2 = 0"


def test_normalize_sign_convention():
    assert normalize_linear(parse_equation("0 = 2-x")) == normalize_linear(parse_equation("0 = x-2"))
    assert normalize_linear(parse_equation("0 = 2x - 2")) == normalize_linear(parse_equation("2 = 2x"))


def test_normalize_degenerate():
    nf = normalize_linear(parse_equation("x = x"))
    assert nf.degenerate and nf.constant == 0


def test_normalize_errors():
    with pytest.raises(NonLinearError):
        normalize_linear(parse_equation("x × x = 1"))
    with pytest.raises(MultiVariableError):
        normalize_linear(parse_equation("x = y"))


@pytest.mark.parametrize("text, expected", [
    ("2x+3 = 4x+1", SolutionSet.single(1)),
    ("x = x+1", SolutionSet.empty()),
    ("0 = 2-x", SolutionSet.single(2)),
    ("x = x", SolutionSet.all()),
    ("2 = 2", SolutionSet.all()),
])
def test_solution_set(text, expected):
    assert solution_set(parse_equation(text)) == expected


@given(rationals.filter(lambda q: q != 0), rationals, rationals)
def test_solution_set_invariant_under_scaling(k, c, d):
    e = Equation(Op("+", (Op("*", (Num(abs(c)), Var("x"))), Num(abs(d)))), Num(1))
    scaled = Equation(Op("*", (Num(abs(k)), e.lhs)), Op("*", (Num(abs(k)), e.rhs)))
    assert solution_set(e) == solution_set(scaled)


def test_solution_set_json_round_trip():
    for s in (SolutionSet.empty(), SolutionSet.all(), SolutionSet.single(F(-3, 2))):
        assert SolutionSet.from_json(s.to_json()) == s


def test_addends_and_expand():
    t = parse_term("2x - 2 - x")
    assert [sign for sign, _ in addends(t)] == [1, -1, -1]
    assert expand(t) == {("x",): F(1), (): F(-2)}
    with pytest.raises(DivisionByZeroError):
        expand(parse_term("x ÷ 0"))
