from fractions import Fraction

from hypothesis import strategies as st

from roughreason.terms import Num, Op, Var

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
naturals = st.fractions(min_value=0, max_value=50, max_denominator=9)

leaves = st.one_of(naturals.map(Num), st.sampled_from("abcxyz").map(Var))


def terms(max_leaves: int = 12):
    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: Op(t[0], t[1:])),
            st.tuples(st.sampled_from(["pos", "neg", "sqrt"]), children).map(lambda t: Op(t[0], t[1:])),
        )
    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def linear_equations(draw):
    """c1·x + d1 = c2·x + d2 with small integer coefficients."""
    c1, d1, c2, d2 = (draw(st.integers(0, 9)) for _ in range(4))
    left = Op("+", (Op("*", (Num(Fraction(c1)), Var("x"))), Num(Fraction(d1))))
    right = Op("+", (Op("*", (Num(Fraction(c2)), Var("x"))), Num(Fraction(d2))))
    return left, right


@st.composite
def partial_structures(draw, max_size: int = 3):
    """Random structures with partial join/meet and one partial l/u family."""
    from roughreason.partial import FiniteStructure, Operation

    n = draw(st.integers(1, max_size))
    carrier = [f"e{i}" for i in range(n)]
    values = st.one_of(st.none(), st.sampled_from(carrier))
    order = {(a, a) for a in carrier}
    order |= {p for p in ((a, b) for a in carrier for b in carrier) if draw(st.booleans())}

    def table(name, arity):
        import itertools
        keys = list(itertools.product(carrier, repeat=arity))
        return Operation(name, arity, {k: draw(values) for k in keys})

    return FiniteStructure(
        carrier=carrier, order=order, parthood=order,
        ops={"vee": table("vee", 2), "wedge": table("wedge", 2)},
        constants={"bot": carrier[0], "top": carrier[-1]},
        lower=(table("l", 1),), upper=(table("u", 1),),
    )
