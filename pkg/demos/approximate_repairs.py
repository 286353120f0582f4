"""Walk flawed solutions toward their repaired forms with the upper operator."""

from roughreason.rough import apply_operator, iterate_operator, sample_corpus

space = sample_corpus().space()
print("elements:", ", ".join(space.elements))

for start in ("S1", "S2"):
    print(iterate_operator(space, "u_eq", start, 5))

# the equational operator has nothing to say about a graphical solution
print("u_eq(S6) =", apply_operator(space, "u_eq", "S6"))
print("u_graph(S6) =", apply_operator(space, "u_graph", "S6"))
