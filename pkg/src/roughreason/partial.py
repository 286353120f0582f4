"""Finite partial algebraic systems and exhaustive axiom checking.

A :class:`FiniteStructure` is a finite carrier with an order, a parthood
relation, partial operation tables, named constants and indexed families of
lower/upper operators ``l[i]``, ``u[i]``.  Formulas are universally
quantified boolean combinations of atoms over structure terms; they are
decided by enumerating every assignment in carrier order.

Atom semantics with an undefined side:

=============  =================================================
``WEq``        ω-equality: true if either side is undefined
``WStarEq``    ω*-equality: true if both undefined, or both equal
``StrongEq``   both defined and equal
``Leq/Part``   strict: false on undefined; ``weak=True``: true
``Defined``    the term has a value
=============  =================================================
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ._undefined import UNDEFINED

__all__ = [
    "StructureError", "SchemaError", "ElementError", "ArityError", "UnknownOperationError",
    "Operation", "FiniteStructure", "load_structure", "dump_structure",
    "read_structure", "write_structure",
    "V", "K", "App", "WEq", "WStarEq", "StrongEq", "Leq", "Part", "Defined",
    "Not", "And", "Or", "Implies", "Iff", "Formula", "CheckReport",
    "eval_struct_term", "holds_atom", "evaluate", "check_formula", "check_axiom_set",
]

# arity of operation names that may appear with an empty table
DEFAULT_ARITY = {
    "vee": 2, "wedge": 2, "otimes": 2, "cdot": 2,
    "imp": 2, "imp_neg": 2, "imp_sim": 2, "n": 1, "l": 1, "u": 1,
}


class StructureError(ValueError):
    pass


class SchemaError(StructureError):
    pass


class ElementError(StructureError):
    pass


class ArityError(StructureError):
    pass


class UnknownOperationError(KeyError):
    pass


# ---------------------------------------------------------------------------
# Structures


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: Mapping[Tuple[str, ...], Optional[str]]

    def __call__(self, *args):
        value = self.table.get(args)
        return UNDEFINED if value is None else value

    def is_total(self, carrier: Sequence[str]) -> bool:
        return all(
            self.table.get(args) is not None
            for args in itertools.product(carrier, repeat=self.arity)
        )


def _freeze_table(table) -> Mapping:
    return MappingProxyType(dict(table))


@dataclass(frozen=True)
class FiniteStructure:
    carrier: Tuple[str, ...]
    order: frozenset = frozenset()
    parthood: Optional[frozenset] = None
    ops: Mapping[str, Operation] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    lower: Tuple[Operation, ...] = ()
    upper: Tuple[Operation, ...] = ()
    predicates: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "order", frozenset(map(tuple, self.order)))
        if self.parthood is not None:
            object.__setattr__(self, "parthood", frozenset(map(tuple, self.parthood)))
        object.__setattr__(self, "ops", MappingProxyType(dict(self.ops)))
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(
            self, "predicates",
            MappingProxyType({k: frozenset(map(tuple, v)) for k, v in self.predicates.items()}),
        )
        self.validate()

    def validate(self):
        names = set(self.carrier)
        if len(names) != len(self.carrier):
            raise SchemaError("carrier has repeated elements")
        if not self.carrier:
            raise SchemaError("carrier is empty")
        for e in self.carrier:
            if not isinstance(e, str) or "," in e:
                raise SchemaError(f"element names are strings without commas: {e!r}")

        def check_elem(e, where):
            if e not in names:
                raise ElementError(f"{where}: {e!r} is not in the carrier")

        for rel_name, rel in (("order", self.order), ("parthood", self.parthood or ())):
            for pair in rel:
                if len(pair) != 2:
                    raise ArityError(f"{rel_name}: {pair!r} is not a pair")
                for e in pair:
                    check_elem(e, rel_name)
        for pname, rel in self.predicates.items():
            for tup in rel:
                for e in tup:
                    check_elem(e, pname)
        for cname, e in self.constants.items():
            check_elem(e, f"constant {cname}")
        if len(self.lower) != len(self.upper):
            raise SchemaError("l and u families must have the same length")
        for op in list(self.ops.values()) + list(self.lower) + list(self.upper):
            for args, value in op.table.items():
                if len(args) != op.arity:
                    raise ArityError(f"{op.name}: {args!r} does not have arity {op.arity}")
                for e in args:
                    check_elem(e, op.name)
                if value is not None:
                    check_elem(value, op.name)

    # -- queries -----------------------------------------------------------

    @property
    def n_families(self) -> int:
        return len(self.lower)

    def leq(self, a, b) -> bool:
        return (a, b) in self.order

    def part(self, a, b) -> bool:
        return self.parthood is not None and (a, b) in self.parthood

    def operation(self, name: str, index: int = 0) -> Operation:
        if name in ("l", "u"):
            family = self.lower if name == "l" else self.upper
            if index >= len(family):
                raise UnknownOperationError(f"{name}[{index}]")
            return family[index]
        try:
            return self.ops[name]
        except KeyError:
            raise UnknownOperationError(name) from None

    def has_operation(self, name: str) -> bool:
        if name in ("l", "u"):
            return self.n_families > 0
        return name in self.ops

    def replace(self, **changes) -> "FiniteStructure":
        fields_ = dict(
            carrier=self.carrier, order=self.order, parthood=self.parthood,
            ops=dict(self.ops), constants=dict(self.constants),
            lower=self.lower, upper=self.upper, predicates=dict(self.predicates),
        )
        fields_.update(changes)
        return FiniteStructure(**fields_)


def _parse_table(name: str, table: Mapping, arity: Optional[int]) -> Operation:
    if not isinstance(table, Mapping):
        raise SchemaError(f"operation {name!r} must be an object")
    parsed = {}
    for key, value in table.items():
        args = tuple(key.split(",")) if key != "" else ()
        if arity is None:
            arity = len(args)
        if len(args) != arity:
            raise ArityError(f"{name}: key {key!r} does not have arity {arity}")
        if value is not None and not isinstance(value, str):
            raise SchemaError(f"{name}: value for {key!r} must be a string or null")
        parsed[args] = value
    if arity is None:
        if name not in DEFAULT_ARITY:
            raise SchemaError(f"cannot infer the arity of empty operation {name!r}")
        arity = DEFAULT_ARITY[name]
    return Operation(name, arity, _freeze_table(parsed))


def load_structure(document: Union[Mapping, str]) -> FiniteStructure:
    """Validate a structure document (a parsed JSON object or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("structure document must be an object")
    unknown = set(document) - {"carrier", "order", "parthood", "constants", "ops", "predicates"}
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    carrier = document.get("carrier")
    if not isinstance(carrier, list):
        raise SchemaError("'carrier' must be a list")

    def pairs(key):
        value = document.get(key, [])
        if not isinstance(value, list) or any(not isinstance(p, list) for p in value):
            raise SchemaError(f"{key!r} must be a list of pairs")
        return [tuple(p) for p in value]

    ops_doc = document.get("ops", {})
    if not isinstance(ops_doc, Mapping):
        raise SchemaError("'ops' must be an object")
    ops, lower, upper = {}, [], []
    for name, table in ops_doc.items():
        if name in ("l", "u"):
            if not isinstance(table, list):
                raise SchemaError(f"{name!r} must be a list of unary tables")
            family = [_parse_table(name, t, 1) for t in table]
            (lower if name == "l" else upper).extend(family)
        else:
            ops[name] = _parse_table(name, table, DEFAULT_ARITY.get(name))
    predicates = document.get("predicates", {})
    if not isinstance(predicates, Mapping):
        raise SchemaError("'predicates' must be an object")
    constants = document.get("constants", {})
    if not isinstance(constants, Mapping):
        raise SchemaError("'constants' must be an object")
    return FiniteStructure(
        carrier=tuple(carrier),
        order=pairs("order"),
        parthood=pairs("parthood") if "parthood" in document else None,
        ops=ops,
        constants=dict(constants),
        lower=tuple(lower),
        upper=tuple(upper),
        predicates={k: [tuple(t) for t in v] for k, v in predicates.items()},
    )


def _dump_table(op: Operation, carrier) -> dict:
    out = {}
    for args in itertools.product(carrier, repeat=op.arity):
        if args in op.table:
            out[",".join(args)] = op.table[args]
    return out


def dump_structure(S: FiniteStructure) -> dict:
    index = {e: i for i, e in enumerate(S.carrier)}

    def sort_pairs(rel):
        return [list(p) for p in sorted(rel, key=lambda p: tuple(index[e] for e in p))]

    doc = {"carrier": list(S.carrier), "order": sort_pairs(S.order)}
    if S.parthood is not None:
        doc["parthood"] = sort_pairs(S.parthood)
    doc["constants"] = dict(S.constants)
    ops = {name: _dump_table(op, S.carrier) for name, op in S.ops.items()}
    if S.n_families:
        ops["l"] = [_dump_table(op, S.carrier) for op in S.lower]
        ops["u"] = [_dump_table(op, S.carrier) for op in S.upper]
    doc["ops"] = ops
    if S.predicates:
        doc["predicates"] = {k: sort_pairs(v) for k, v in S.predicates.items()}
    return doc


def read_structure(path) -> FiniteStructure:
    with open(path, encoding="utf-8") as fh:
        return load_structure(fh.read())


def write_structure(S: FiniteStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dump_structure(S), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Formula language


@dataclass(frozen=True)
class V:
    """Quantified variable."""
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class K:
    """Named constant (``bot``, ``top``, ...)."""
    name: str

    def __str__(self):
        return {"bot": "⊥", "top": "⊤"}.get(self.name, self.name)


_OP_TEXT = {"vee": "∨", "wedge": "∧", "otimes": "⊗", "cdot": "·"}


@dataclass(frozen=True)
class App:
    op: str
    args: Tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        if self.op in ("l", "u") and len(self.args) == 1:
            (a,) = self.args
            if isinstance(a, App) and a.op in ("l", "u"):
                return f"{a}{self.op}"
            inner = f"({a})" if isinstance(a, App) else str(a)
            return f"{inner}^{self.op}"
        if self.op in _OP_TEXT and len(self.args) == 2:
            a, b = (f"({x})" if isinstance(x, App) and x.op in _OP_TEXT else str(x) for x in self.args)
            return f"{a} {_OP_TEXT[self.op]} {b}"
        return f"{self.op}({', '.join(map(str, self.args))})"


STerm = Union[V, K, App]


@dataclass(frozen=True)
class WEq:
    left: STerm
    right: STerm

    def __str__(self):
        return f"{self.left} =ω {self.right}"


@dataclass(frozen=True)
class WStarEq:
    left: STerm
    right: STerm

    def __str__(self):
        return f"{self.left} =ω* {self.right}"


@dataclass(frozen=True)
class StrongEq:
    left: STerm
    right: STerm

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Leq:
    left: STerm
    right: STerm
    weak: bool = False

    def __str__(self):
        return f"{self.left} {'≤ω' if self.weak else '≤'} {self.right}"


@dataclass(frozen=True)
class Part:
    left: STerm
    right: STerm
    weak: bool = False

    def __str__(self):
        return f"{'Pω' if self.weak else 'P'}({self.left}, {self.right})"


@dataclass(frozen=True)
class Defined:
    term: STerm

    def __str__(self):
        return f"def({self.term})"


Atom = Union[WEq, WStarEq, StrongEq, Leq, Part, Defined]


@dataclass(frozen=True)
class Not:
    body: object

    def __str__(self):
        return f"¬({self.body})"


@dataclass(frozen=True)
class And:
    parts: Tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))

    def __str__(self):
        return " & ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Or:
    parts: Tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))

    def __str__(self):
        return " or ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Implies:
    premise: object
    conclusion: object

    def __str__(self):
        return f"{_wrap(self.premise)} → {_wrap(self.conclusion)}"


@dataclass(frozen=True)
class Iff:
    left: object
    right: object

    def __str__(self):
        return f"{_wrap(self.left)} ↔ {_wrap(self.right)}"


def _wrap(f) -> str:
    return f"({f})" if isinstance(f, (And, Or, Implies, Iff)) else str(f)


def _term_vars(t) -> set:
    if isinstance(t, V):
        return {t.name}
    if isinstance(t, App):
        out = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


def _body_vars(f) -> set:
    if isinstance(f, Not):
        return _body_vars(f.body)
    if isinstance(f, (And, Or)):
        out = set()
        for p in f.parts:
            out |= _body_vars(p)
        return out
    if isinstance(f, Implies):
        return _body_vars(f.premise) | _body_vars(f.conclusion)
    if isinstance(f, Iff):
        return _body_vars(f.left) | _body_vars(f.right)
    if isinstance(f, Defined):
        return _term_vars(f.term)
    return _term_vars(f.left) | _term_vars(f.right)


def _body_ops(f) -> set:
    def term_ops(t):
        if isinstance(t, App):
            out = {t.op}
            for a in t.args:
                out |= term_ops(a)
            return out
        return set()

    if isinstance(f, Not):
        return _body_ops(f.body)
    if isinstance(f, (And, Or)):
        return set().union(*(_body_ops(p) for p in f.parts))
    if isinstance(f, Implies):
        return _body_ops(f.premise) | _body_ops(f.conclusion)
    if isinstance(f, Iff):
        return _body_ops(f.left) | _body_ops(f.right)
    if isinstance(f, Defined):
        return term_ops(f.term)
    return term_ops(f.left) | term_ops(f.right)


def _body_consts(f) -> set:
    def term_consts(t):
        if isinstance(t, K):
            return {t.name}
        if isinstance(t, App):
            return set().union(set(), *(term_consts(a) for a in t.args))
        return set()

    if isinstance(f, Not):
        return _body_consts(f.body)
    if isinstance(f, (And, Or)):
        return set().union(*(_body_consts(p) for p in f.parts))
    if isinstance(f, Implies):
        return _body_consts(f.premise) | _body_consts(f.conclusion)
    if isinstance(f, Iff):
        return _body_consts(f.left) | _body_consts(f.right)
    if isinstance(f, Defined):
        return term_consts(f.term)
    return term_consts(f.left) | term_consts(f.right)


@dataclass(frozen=True)
class Formula:
    """Universal closure ``∀ variables . body``."""

    name: str
    variables: Tuple[str, ...]
    body: object

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        free = _body_vars(self.body) - set(self.variables)
        if free:
            raise ValueError(f"{self.name}: unquantified variables {sorted(free)}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"{self.name}: repeated quantified variable")

    @property
    def operations(self) -> set:
        return _body_ops(self.body)

    @property
    def constants(self) -> set:
        return _body_consts(self.body)

    @property
    def uses_families(self) -> bool:
        return bool(self.operations & {"l", "u"})

    def __str__(self):
        quant = f"∀{','.join(self.variables)} " if self.variables else ""
        return f"{quant}{self.body}"


# ---------------------------------------------------------------------------
# Evaluation


def eval_struct_term(S: FiniteStructure, t, assignment: Mapping[str, str], index: int = 0):
    """Strict evaluation: an undefined argument or a missing entry is UNDEFINED."""
    if isinstance(t, V):
        return assignment[t.name]
    if isinstance(t, K):
        try:
            return S.constants[t.name]
        except KeyError:
            raise UnknownOperationError(f"constant {t.name}") from None
    op = S.operation(t.op, index)
    if len(t.args) != op.arity:
        raise ArityError(f"{t.op} takes {op.arity} argument(s)")
    args = []
    for a in t.args:
        v = eval_struct_term(S, a, assignment, index)
        if v is UNDEFINED:
            return UNDEFINED
        args.append(v)
    return op(*args)


def holds_atom(S: FiniteStructure, atom, assignment, index: int = 0) -> bool:
    if isinstance(atom, Defined):
        return eval_struct_term(S, atom.term, assignment, index) is not UNDEFINED
    a = eval_struct_term(S, atom.left, assignment, index)
    b = eval_struct_term(S, atom.right, assignment, index)
    a_def, b_def = a is not UNDEFINED, b is not UNDEFINED
    if isinstance(atom, WEq):
        return not (a_def and b_def) or a == b
    if isinstance(atom, WStarEq):
        return (not a_def and not b_def) or (a_def and b_def and a == b)
    if isinstance(atom, StrongEq):
        return a_def and b_def and a == b
    if not (a_def and b_def):
        return atom.weak
    if isinstance(atom, Leq):
        return S.leq(a, b)
    if isinstance(atom, Part):
        return S.part(a, b)
    raise TypeError(f"not an atom: {atom!r}")


def evaluate(S: FiniteStructure, body, assignment, index: int = 0) -> bool:
    """Truth of a quantifier-free body under a total assignment."""
    if isinstance(body, Not):
        return not evaluate(S, body.body, assignment, index)
    if isinstance(body, And):
        return all(evaluate(S, p, assignment, index) for p in body.parts)
    if isinstance(body, Or):
        return any(evaluate(S, p, assignment, index) for p in body.parts)
    if isinstance(body, Implies):
        return not evaluate(S, body.premise, assignment, index) or evaluate(
            S, body.conclusion, assignment, index
        )
    if isinstance(body, Iff):
        return evaluate(S, body.left, assignment, index) == evaluate(S, body.right, assignment, index)
    return holds_atom(S, body, assignment, index)


@dataclass(frozen=True)
class CheckReport:
    name: str
    holds: bool
    witness: Optional[Dict[str, str]]
    assignments: int
    failures: int
    index: Optional[int] = None
    formula: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name, "holds": self.holds, "witness": self.witness,
            "assignments": self.assignments, "failures": self.failures,
            "index": self.index, "formula": self.formula,
        }

    @classmethod
    def from_json(cls, d) -> "CheckReport":
        return cls(
            d["name"], d["holds"], d["witness"], d["assignments"], d["failures"],
            d.get("index"), d.get("formula", ""),
        )


def _compile_term(S: FiniteStructure, t, index: int):
    """Closure computing ``eval_struct_term`` for a fixed term."""
    if isinstance(t, V):
        name = t.name
        return lambda env: env[name]
    if isinstance(t, K):
        value = eval_struct_term(S, t, {}, index)
        return lambda env: value
    op = S.operation(t.op, index)
    if len(t.args) != op.arity:
        raise ArityError(f"{t.op} takes {op.arity} argument(s)")
    table = op.table
    subs = [_compile_term(S, a, index) for a in t.args]
    if len(subs) == 1:
        (f,) = subs

        def unary(env):
            v = f(env)
            if v is UNDEFINED:
                return UNDEFINED
            r = table.get((v,))
            return UNDEFINED if r is None else r
        return unary
    f, g = subs[0], subs[-1]

    def binary(env):
        v = f(env)
        if v is UNDEFINED:
            return UNDEFINED
        w = g(env)
        if w is UNDEFINED:
            return UNDEFINED
        r = table.get((v, w))
        return UNDEFINED if r is None else r
    if len(subs) == 2:
        return binary

    def general(env):
        args = []
        for h in subs:
            v = h(env)
            if v is UNDEFINED:
                return UNDEFINED
            args.append(v)
        r = table.get(tuple(args))
        return UNDEFINED if r is None else r
    return general


def _compile_body(S: FiniteStructure, body, index: int):
    """Closure computing ``evaluate`` for a fixed body."""
    if isinstance(body, Not):
        f = _compile_body(S, body.body, index)
        return lambda env: not f(env)
    if isinstance(body, And):
        parts = [_compile_body(S, p, index) for p in body.parts]
        return lambda env: all(p(env) for p in parts)
    if isinstance(body, Or):
        parts = [_compile_body(S, p, index) for p in body.parts]
        return lambda env: any(p(env) for p in parts)
    if isinstance(body, Implies):
        f, g = _compile_body(S, body.premise, index), _compile_body(S, body.conclusion, index)
        return lambda env: not f(env) or g(env)
    if isinstance(body, Iff):
        f, g = _compile_body(S, body.left, index), _compile_body(S, body.right, index)
        return lambda env: f(env) == g(env)
    if isinstance(body, Defined):
        f = _compile_term(S, body.term, index)
        return lambda env: f(env) is not UNDEFINED
    f, g = _compile_term(S, body.left, index), _compile_term(S, body.right, index)
    if isinstance(body, WEq):
        def weq(env):
            x, y = f(env), g(env)
            return x is UNDEFINED or y is UNDEFINED or x == y
        return weq
    if isinstance(body, WStarEq):
        def wstar(env):
            x, y = f(env), g(env)
            if x is UNDEFINED or y is UNDEFINED:
                return x is y
            return x == y
        return wstar
    if isinstance(body, StrongEq):
        def strong(env):
            x = f(env)
            return x is not UNDEFINED and x == g(env)
        return strong
    if isinstance(body, (Leq, Part)):
        rel = S.order if isinstance(body, Leq) else (S.parthood or frozenset())
        weak = body.weak

        def related(env):
            x, y = f(env), g(env)
            if x is UNDEFINED or y is UNDEFINED:
                return weak
            return (x, y) in rel
        return related
    raise TypeError(f"not an atom: {body!r}")


def _scan(S, f: Formula, index: int, start: int, stop: int):
    """(first failing position, failure count) over assignment positions [start, stop)."""
    test = _compile_body(S, f.body, index)
    n = len(S.carrier)
    first, count = None, 0
    for pos in range(start, stop):
        assignment = {}
        rest = pos
        for var in reversed(f.variables):
            rest, r = divmod(rest, n)
            assignment[var] = S.carrier[r]
        if not test(assignment):
            count += 1
            if first is None:
                first = pos
    return first, count


def _assignment_at(S, f: Formula, pos: int) -> Dict[str, str]:
    n = len(S.carrier)
    out = {}
    for var in reversed(f.variables):
        pos, r = divmod(pos, n)
        out[var] = S.carrier[r]
    return {v: out[v] for v in f.variables}


def check_formula(S: FiniteStructure, f: Formula, index: int = 0, workers: int = 1) -> CheckReport:
    """Evaluate ``f`` on every assignment; the witness is the first failure
    in lexicographic carrier order, whatever the number of workers."""
    total = len(S.carrier) ** len(f.variables)
    if workers <= 1 or total < 2:
        first, count = _scan(S, f, index, 0, total)
    else:
        bounds = [total * i // workers for i in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _scan(S, f, index, bounds[i], bounds[i + 1]), range(workers)))
        firsts = [p[0] for p in parts if p[0] is not None]
        first = min(firsts) if firsts else None
        count = sum(p[1] for p in parts)
    witness = None if first is None else _assignment_at(S, f, first)
    return CheckReport(f.name, first is None, witness, total, count, index, str(f))


def check_axiom_set(S: FiniteStructure, formulas: Iterable[Formula], index: int = 0) -> List[CheckReport]:
    return [check_formula(S, f, index) for f in formulas]
