import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from roughreason import UNDEFINED
from roughreason.partial import (
    And, App, Defined, ElementError, FiniteStructure, Formula, Implies, K, Leq, Operation,
    SchemaError, StrongEq, UnknownOperationError, V, WEq, WStarEq, ArityError,
    check_axiom_set, check_formula, dump_structure, eval_struct_term, evaluate, holds_atom,
    load_structure, read_structure,
)
from roughreason.suites import get_suite

from .strategies import partial_structures

FIX = Path(__file__).parent / "fixtures"
a, b = V("a"), V("b")


def _two(undefined_pairs=()):
    """Carrier {p, q}; vee total, wedge undefined on the given pairs."""
    carrier = ["p", "q"]
    wedge = {(x, y): x if x == y else "p" for x in carrier for y in carrier}
    for pair in undefined_pairs:
        wedge[pair] = None
    return FiniteStructure(
        carrier=carrier, order={("p", "p"), ("q", "q"), ("p", "q")},
        ops={"vee": Operation("vee", 2, {(x, y): "q" if "q" in (x, y) else "p"
                                         for x in carrier for y in carrier}),
             "wedge": Operation("wedge", 2, wedge),
             "id": Operation("id", 1, {("p",): "p", ("q",): "q"})},
        constants={"bot": "p", "top": "q"},
        lower=(Operation("l", 1, {("p",): "p", ("q",): "q"}),),
        upper=(Operation("u", 1, {("p",): "p", ("q",): "q"}),),
    )


def test_load_fixtures():
    one = read_structure(FIX / "one_element.json")
    assert one.carrier == ("e",) and one.operation("vee").is_total(one.carrier)
    chain = read_structure(FIX / "chain2_identity.json")
    assert chain.n_families == 1 and chain.operation("l")("top") == "top"


def test_load_rejects_outside_element():
    doc = json.loads((FIX / "chain2_identity.json").read_text())
    doc["ops"]["vee"]["bot,bot"] = "middle"
    with pytest.raises(ElementError):
        load_structure(doc)


def test_load_rejects_bad_arity_and_schema():
    doc = json.loads((FIX / "chain2_identity.json").read_text())
    doc["ops"]["vee"]["bot"] = "bot"
    with pytest.raises(ArityError):
        load_structure(doc)
    with pytest.raises(SchemaError):
        load_structure({"carrier": "bot"})
    with pytest.raises(SchemaError):
        load_structure("{not json")


def test_dump_load_round_trip():
    S = read_structure(FIX / "chain3_nonmonotone_lower.json")
    assert load_structure(dump_structure(S)) == S


def test_table_miss_is_undefined():
    S = _two(undefined_pairs=[("p", "q")])
    assert eval_struct_term(S, App("wedge", (a, b)), {"a": "p", "b": "q"}) is UNDEFINED


def test_identity_lookup():
    S = _two()
    assert eval_struct_term(S, App("l", (a,)), {"a": "q"}) == "q"


def test_nested_lookup():
    S = _two()
    t = App("vee", (App("wedge", (a, b)), a))
    assert eval_struct_term(S, t, {"a": "p", "b": "q"}) == "p"


def test_strict_propagation():
    S = _two(undefined_pairs=[("p", "q")])
    t = App("id", (App("vee", (App("wedge", (a, b)), a)),))
    assert eval_struct_term(S, t, {"a": "p", "b": "q"}) is UNDEFINED


def test_unknown_operation():
    with pytest.raises(UnknownOperationError):
        eval_struct_term(_two(), App("otimes", (a, b)), {"a": "p", "b": "p"})


def _case_terms():
    """(lhs, rhs, env) for: both undefined; one defined; both defined and unequal."""
    undef = App("wedge", (a, b))
    return [
        (undef, undef, {"a": "p", "b": "q"}),
        (a, undef, {"a": "p", "b": "q"}),
        (a, b, {"a": "p", "b": "q"}),
    ]


@pytest.mark.parametrize("case, weq, wstar", [(0, True, True), (1, True, False), (2, False, False)])
def test_weak_equality_truth_table(case, weq, wstar):
    S = _two(undefined_pairs=[("p", "q")])
    lhs, rhs, env = _case_terms()[case]
    assert holds_atom(S, WEq(lhs, rhs), env) is weq
    assert holds_atom(S, WStarEq(lhs, rhs), env) is wstar


def test_strong_equality_and_definedness():
    S = _two(undefined_pairs=[("p", "q")])
    env = {"a": "p", "b": "q"}
    u = App("wedge", (a, b))
    assert not holds_atom(S, StrongEq(u, u), env)
    assert holds_atom(S, WStarEq(u, u), env)
    assert not holds_atom(S, Defined(u), env)
    assert holds_atom(S, Leq(u, a, weak=True), env)
    assert not holds_atom(S, Leq(u, a), env)


def _random_term(draw, depth=2):
    if depth == 0 or draw(st.booleans()):
        return V(draw(st.sampled_from("abc")))
    op = draw(st.sampled_from(["vee", "wedge", "l", "u"]))
    if op in ("l", "u"):
        return App(op, (_random_term(draw, depth - 1),))
    return App(op, (_random_term(draw, depth - 1), _random_term(draw, depth - 1)))


def defining_combination(s, t, atom=StrongEq):
    return And(Implies(atom(s, s), atom(s, t)), Implies(atom(t, t), atom(s, t)))


@settings(max_examples=200)
@given(partial_structures(), st.data())
def test_weak_star_is_the_defining_combination(S, data):
    s = _random_term(data.draw, 2)
    t = _random_term(data.draw, 2)
    env = {v: data.draw(st.sampled_from(S.carrier)) for v in "abc"}
    direct = holds_atom(S, WStarEq(s, t), env)
    # with existence equations as atoms the combination is exactly ω*
    assert direct == evaluate(S, defining_combination(s, t), env)
    # with vacuous weak atoms, s ω= s always holds and it collapses to ω=
    assert evaluate(S, defining_combination(s, t, WEq), env) == holds_atom(S, WEq(s, t), env)
    assert not direct or holds_atom(S, WEq(s, t), env)


def test_reflexivity_of_weak_equality():
    S = read_structure(FIX / "chain3_nonmonotone_lower.json")
    assert check_formula(S, Formula("refl", ("a",), WEq(a, a))).holds


def test_qlu1_on_identity_chain():
    S = read_structure(FIX / "chain2_identity.json")
    qlu1 = next(f for f in get_suite("rcqo").axioms if f.name == "qlu1")
    assert check_formula(S, qlu1).holds


def test_broken_monotonicity_witness():
    S = read_structure(FIX / "chain2_broken_monotonicity.json")
    mo = next(f for f in get_suite("rcqo").axioms if f.name == "qlu-mo")
    report = check_formula(S, mo)
    assert not report.holds
    assert report.witness == {"a": "bot", "b": "top"}
    assert not evaluate(S, mo.body, report.witness)


def test_check_axiom_set_keeps_order_and_does_not_short_circuit():
    S = read_structure(FIX / "chain2_broken_monotonicity.json")
    axioms = get_suite("rcqo").axioms
    reports = check_axiom_set(S, axioms)
    assert [r.name for r in reports] == [f.name for f in axioms]
    assert sum(not r.holds for r in reports) == 4
    assert check_axiom_set(S, []) == []


@settings(max_examples=60)
@given(partial_structures(), st.sampled_from(get_suite("er-companion").axioms))
def test_witnesses_refute_and_workers_agree(S, f):
    serial = check_formula(S, f)
    for workers in (2, 3, 5):
        assert check_formula(S, f, workers=workers) == serial
    if not serial.holds:
        assert not evaluate(S, f.body, serial.witness)


def test_report_json_round_trip():
    S = read_structure(FIX / "chain2_broken_monotonicity.json")
    for r in check_axiom_set(S, get_suite("rcqo").axioms):
        assert type(r).from_json(json.loads(json.dumps(r.to_json()))) == r


def test_formula_requires_quantified_variables():
    with pytest.raises(ValueError):
        Formula("bad", ("a",), WEq(a, b))
    assert str(K("bot")) == "⊥"


@settings(max_examples=40, deadline=None)
@given(partial_structures(), st.sampled_from(get_suite("rqoai").axioms[:12] + get_suite("er-companion").axioms))
def test_compiled_checker_agrees_with_interpreter(S, f):
    import itertools
    from roughreason.partial import _compile_body
    if not all(S.has_operation(op) for op in f.operations):
        return
    compiled = _compile_body(S, f.body, 0)
    for values in itertools.product(S.carrier, repeat=len(f.variables)):
        env = dict(zip(f.variables, values))
        assert compiled(env) == evaluate(S, f.body, env)
