"""Parse and print terms, then compare the weak equalities on an undefined value."""

from roughreason.partial import App, FiniteStructure, Operation, StrongEq, V, WEq, WStarEq, holds_atom
from roughreason.terms import parse_equation, parse_term, print_term, solution_set

t = parse_term("2 ÷ (x × y) + -(2/4)x")
print(print_term(t))
e = parse_equation("2x+3 = 4x+1")
print(e, "has solutions", solution_set(e))

S = FiniteStructure(carrier=["p"], order={("p", "p")},
                    ops={"f": Operation("f", 1, {("p",): None})})
undefined, defined, env = App("f", (V("a"),)), V("a"), {"a": "p"}
for atom in (WEq, WStarEq, StrongEq):
    print(f"{atom.__name__:9s} undefined vs defined: {holds_atom(S, atom(undefined, defined), env)}")
