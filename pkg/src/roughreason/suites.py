"""Named axiom systems, structure classification and small-model enumeration.

How the equality signs in the axioms are read:

* ``ω=`` is :class:`~roughreason.partial.WEq`.
* A plain ``=`` or order/parthood atom in a premise or inside a biconditional
  is strict (both sides must be defined).
* A plain ``=`` or order/parthood atom in a conclusion is read with
  ω-semantics (vacuous when a side is undefined), so that total structures get
  the classical meaning and partial ones are judged only where defined.

Suites group their axioms; each group has an operator-index policy for the
``l``/``u`` families: ``once`` (no family symbols), ``all`` (every index) or
``some`` (one index must satisfy the whole group).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .partial import (
    App, And, CheckReport, Defined, FiniteStructure, Formula, Iff, Implies, K, Leq,
    Operation, Or, Part, StrongEq, V, WEq, check_formula, evaluate,
)

__all__ = [
    "AxiomGroup", "AxiomSuite", "SuiteReport", "GroupReport", "Verdict", "SUITES",
    "IMPLICATION_PROPERTIES", "implication_axioms", "implication_suite", "get_suite",
    "run_suite", "classify_structure", "implication_property_table",
    "pawlak_structure", "chain_structure", "EnumerationTask", "EnumerationResult",
    "EnumerationBoundError", "PartitionError", "enumerate_models",
]


# ---------------------------------------------------------------------------
# Term helpers

a, b, c, e, x = V("a"), V("b"), V("c"), V("e"), V("x")
BOT, TOP = K("bot"), K("top")


def l(t):
    return App("l", (t,))


def u(t):
    return App("u", (t,))


def vee(s, t):
    return App("vee", (s, t))


def wedge(s, t):
    return App("wedge", (s, t))


def leq(s, t):
    return Leq(s, t)


def leqw(s, t):
    return Leq(s, t, weak=True)


def P(s, t):
    return Part(s, t)


def Pw(s, t):
    return Part(s, t, weak=True)


def _f(name, variables, body) -> Formula:
    return Formula(name, tuple(v.name for v in variables), body)


# ---------------------------------------------------------------------------
# Suite data model


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class AxiomGroup:
    name: str
    axioms: Tuple[Formula, ...]
    policy: str = "once"  # once | all | some

    def __post_init__(self):
        if self.policy not in ("once", "all", "some"):
            raise ValueError(f"unknown index policy {self.policy!r}")
        object.__setattr__(self, "axioms", tuple(self.axioms))


@dataclass(frozen=True)
class AxiomSuite:
    name: str
    groups: Tuple[AxiomGroup, ...]
    needs_parthood: bool = False

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        names = [f.name for g in self.groups for f in g.axioms]
        if len(names) != len(set(names)):
            raise ValueError(f"suite {self.name}: repeated axiom names")

    @property
    def axioms(self) -> List[Formula]:
        return [f for g in self.groups for f in g.axioms]

    @property
    def operations(self) -> set:
        return set().union(*(f.operations for f in self.axioms))

    @property
    def constants(self) -> set:
        return set().union(*(f.constants for f in self.axioms))

    def select(self, names: Iterable[str]) -> "AxiomSuite":
        """Sub-suite with only the named axioms (group structure kept)."""
        wanted = set(names)
        unknown = wanted - {f.name for f in self.axioms}
        if unknown:
            raise KeyError(f"suite {self.name} has no axioms {sorted(unknown)}")
        groups = []
        for g in self.groups:
            kept = tuple(f for f in g.axioms if f.name in wanted)
            if kept:
                groups.append(AxiomGroup(g.name, kept, g.policy))
        return AxiomSuite(self.name, tuple(groups), self.needs_parthood)

    def missing_signature(self, S: FiniteStructure) -> List[str]:
        missing = [op for op in sorted(self.operations) if not S.has_operation(op)]
        missing += [f"constant {k}" for k in sorted(self.constants) if k not in S.constants]
        if self.needs_parthood and S.parthood is None:
            missing.append("parthood")
        return missing


# ---------------------------------------------------------------------------
# Axioms

def _order_axioms() -> Tuple[Formula, ...]:
    return (
        _f("qo-refl", [a], leq(a, a)),
        _f("qo-trans", [a, b, c], Implies(And(leq(a, b), leq(b, c)), leq(a, c))),
        _f("bounded", [a], And(leq(BOT, a), leq(a, TOP))),
    )


def _pwl_axioms() -> Tuple[Formula, ...]:
    return (
        _f("wpl1", [a, b, c], And(
            WEq(wedge(a, a), a), WEq(a, vee(a, a)),
            WEq(wedge(wedge(a, b), c), wedge(a, wedge(b, c))),
        )),
        _f("wpl2", [a, b, c], WEq(vee(vee(a, b), c), vee(a, vee(b, c)))),
        _f("wpl3", [a, b], And(
            WEq(vee(wedge(a, b), a), a),
            WEq(wedge(a, b), wedge(b, a)),
            WEq(vee(a, b), vee(b, a)),
        )),
    )


def _rcqo_axioms(prefix: str = "") -> Tuple[Formula, ...]:
    p = prefix
    return (
        _f(p + "wl12", [a, b], Implies(
            Or(StrongEq(vee(a, b), b), StrongEq(wedge(a, b), a)), leq(a, b))),
        _f(p + "wl34", [a, b, c], Implies(
            Or(StrongEq(vee(a, b), c), StrongEq(wedge(c, b), a)), leq(a, c))),
        _f(p + "qlu1", [x], And(
            WEq(l(l(x)), l(x)), leqw(l(x), x), leqw(x, u(x)), leqw(u(x), u(u(x))))),
        _f(p + "qlu-mo", [a, b], Implies(leq(a, b), And(leqw(l(a), l(b)), leqw(u(a), u(b))))),
        _f(p + "qlu23", [a, b], And(
            WEq(vee(u(a), u(b)), u(vee(a, b))),
            WEq(l(wedge(a, b)), wedge(l(a), l(b))),
        )),
        _f(p + "topbot", [], And(WEq(u(TOP), TOP), WEq(l(BOT), BOT), WEq(u(BOT), BOT))),
    )


def _negation_axioms(op: str = "n") -> Tuple[Formula, ...]:
    def n(t):
        return App(op, (t,))

    return (
        _f("N1", [], And(WEq(n(BOT), TOP), WEq(n(TOP), BOT))),
        _f("N2", [a, b], Implies(leq(a, b), leqw(n(b), n(a)))),
        _f("N3", [a], WEq(n(n(a)), a)),
        _f("N4", [a], Iff(
            Or(StrongEq(n(a), BOT), StrongEq(n(a), TOP)),
            Or(StrongEq(a, BOT), StrongEq(a, TOP)),
        )),
    )


IMPLICATION_PROPERTIES = (
    "FPA", "SPM", "BC1", "BC2", "BC3", "LNP", "EP", "OP", "IBL", "CB", "IP", "T3", "T4",
)


def implication_axioms(op: str = "imp", prefix: str = "") -> Dict[str, Formula]:
    """The implication properties for binary operation ``op``, keyed by name."""

    def i(s, t):
        return App(op, (s, t))

    bodies = {
        "FPA": ([a, b, c], Implies(leq(a, b), leqw(i(b, c), i(a, c)))),
        "SPM": ([a, b, c], Implies(leq(b, c), leqw(i(a, b), i(a, c)))),
        "BC1": ([], WEq(i(BOT, BOT), TOP)),
        "BC2": ([], WEq(i(TOP, TOP), TOP)),
        "BC3": ([], WEq(i(TOP, BOT), BOT)),
        "LNP": ([x], WEq(i(TOP, x), x)),
        "EP": ([a, b, c], WEq(i(a, i(b, c)), i(b, i(a, c)))),
        "OP": ([a, b], Iff(StrongEq(i(a, b), TOP), leq(a, b))),
        "IBL": ([a, b], WEq(i(a, i(a, b)), i(a, b))),
        "CB": ([a, b], leqw(b, i(a, b))),
        "IP": ([a], WEq(i(a, a), TOP)),
        "T3": ([a, b, c], WEq(i(a, i(b, c)), i(i(a, b), i(a, c)))),
        "T4": ([a, b], WEq(i(i(a, b), b), i(i(b, a), a))),
    }
    return {name: _f(prefix + name, vs, body) for name, (vs, body) in bodies.items()}


def _rqoai_groups() -> Tuple[AxiomGroup, ...]:
    def ot(s, t):
        return App("otimes", (s, t))

    def dot(s, t):
        return App("cdot", (s, t))

    def closed(t):
        return StrongEq(u(u(t)), u(t))

    sim = implication_axioms("imp_sim", "imsc:")
    neg = implication_axioms("imp_neg", "inegc:")
    return (
        AxiomGroup("rcl", _order_axioms() + _pwl_axioms() + _rcqo_axioms(), "all"),
        AxiomGroup("aggregation", (
            _f("wAasso1", [a, b, e], Implies(
                And(closed(a), closed(b), closed(e)),
                WEq(ot(a, ot(b, e)), ot(ot(a, b), e)))),
            # variables as printed in the source, e and c both free
            _f("wAsso2", [a, b, e, c], WEq(ot(a, ot(vee(b, e), a)), ot(ot(vee(a, b), c), c))),
            _f("cdot-comm", [a, b], WEq(dot(a, b), dot(b, a))),
            _f("cdot-assoc", [a, b, c], WEq(dot(dot(a, b), c), dot(a, dot(b, c)))),
            _f("cdot-unit", [a], WEq(dot(a, BOT), a)),
            _f("cdot-order", [a, b, c], Implies(leq(a, b), leqw(dot(a, c), dot(b, c)))),
            _f("otimes-comm", [a, b], WEq(ot(a, b), ot(b, a))),
            _f("otimes-unit", [a], WEq(ot(a, TOP), a)),
            _f("otimes-order", [a, b, c], Implies(leq(a, b), leqw(ot(a, c), ot(b, c)))),
        ), "once"),
        AxiomGroup("imsc", tuple(sim[k] for k in ("FPA", "SPM", "BC3", "IBL")), "once"),
        AxiomGroup("inegc", tuple(neg[k] for k in ("FPA", "IP", "SPM", "BC1", "BC2", "BC3")), "once"),
    )


def _er_groups() -> Tuple[AxiomGroup, ...]:
    return (
        AxiomGroup("rcl", _order_axioms() + _pwl_axioms() + _rcqo_axioms(), "all"),
        AxiomGroup("parthood", (
            _f("PT1", [x], P(x, x)),
            _f("PT2", [x, b], Implies(And(P(x, b), P(b, x)), StrongEq(x, b))),
        ), "once"),
        AxiomGroup("lattice-like", (
            _f("G1", [a, b], And(WEq(vee(a, b), vee(b, a)), WEq(wedge(a, b), wedge(b, a)))),
            _f("G2", [a, b], And(WEq(wedge(vee(a, b), a), a), WEq(vee(wedge(a, b), a), a))),
            _f("G3", [a, b, c], WEq(vee(wedge(a, b), c), wedge(vee(a, c), vee(b, c)))),
            _f("G4", [a, b, c], WEq(wedge(vee(a, b), c), vee(wedge(a, c), wedge(b, c)))),
            _f("G5", [a, b], And(
                Iff(leq(a, b), StrongEq(vee(a, b), b)),
                Iff(StrongEq(vee(a, b), b), StrongEq(wedge(a, b), a)),
            )),
        ), "once"),
        AxiomGroup("approximation", (
            _f("UL1", [a], And(Pw(l(a), a), WEq(l(l(a)), l(a)), Pw(u(a), u(u(a))))),
            _f("UL2", [a, b], Implies(P(a, b), And(Pw(l(a), l(b)), Pw(u(a), u(b))))),
            _f("UL3", [], And(
                WEq(l(BOT), BOT), WEq(u(BOT), BOT), Pw(l(TOP), TOP), Pw(u(TOP), TOP))),
        ), "some"),
        AxiomGroup("bounds", (_f("TB", [a], And(P(BOT, a), P(a, TOP))),), "once"),
    )


def implication_suite(op: str = "imp", properties: Sequence[str] = IMPLICATION_PROPERTIES,
                      name: Optional[str] = None) -> AxiomSuite:
    axioms = implication_axioms(op)
    chosen = tuple(axioms[p] for p in properties)
    return AxiomSuite(name or f"implication[{op}]", (AxiomGroup("implication", chosen, "once"),))


def _build_registry() -> Mapping[str, AxiomSuite]:
    neg = _negation_axioms()
    suites = [
        AxiomSuite("pwl", (AxiomGroup("pwl", _pwl_axioms()),)),
        AxiomSuite("negation", (AxiomGroup("negation", neg[:2]),)),
        AxiomSuite("strong-negation", (AxiomGroup("negation", neg),)),
        implication_suite("imp", ("FPA", "SPM", "BC1", "BC2", "BC3"), "implication-core"),
        implication_suite("imp", ("LNP", "EP", "OP", "IBL", "CB", "IP", "T3", "T4"),
                          "implication-extras"),
        AxiomSuite("rcqo", (AxiomGroup("rcqo", _order_axioms() + _pwl_axioms() + _rcqo_axioms(), "all"),)),
        AxiomSuite("rqoai", _rqoai_groups()),
        AxiomSuite("er-companion", _er_groups(), needs_parthood=True),
    ]
    return MappingProxyType({s.name: s for s in suites})


SUITES: Mapping[str, AxiomSuite] = _build_registry()


def get_suite(name: str, op: Optional[str] = None) -> AxiomSuite:
    """Registry lookup; implication suites can be retargeted to another operation."""
    if name.startswith("implication-") and op:
        base = SUITES[name]
        props = [f.name for f in base.axioms]
        return implication_suite(op, props, f"{name}[{op}]")
    try:
        return SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None


# ---------------------------------------------------------------------------
# Running suites


@dataclass(frozen=True)
class GroupReport:
    name: str
    policy: str
    holds: bool
    chosen_index: Optional[int]
    reports: Tuple[CheckReport, ...]

    def to_json(self):
        return {
            "name": self.name, "policy": self.policy, "holds": self.holds,
            "chosen_index": self.chosen_index,
            "reports": [r.to_json() for r in self.reports],
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["name"], d["policy"], d["holds"], d["chosen_index"],
                   tuple(CheckReport.from_json(r) for r in d["reports"]))


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    verdict: Verdict
    groups: Tuple[GroupReport, ...] = ()
    missing: Tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def failures(self) -> List[CheckReport]:
        """Failing checks of the groups that decided the verdict."""
        out = []
        for g in self.groups:
            if not g.holds:
                out.extend(r for r in g.reports if not r.holds)
        return out

    def failed_axioms(self) -> List[str]:
        seen = []
        for r in self.failures():
            if r.name not in seen:
                seen.append(r.name)
        return seen

    def to_json(self):
        return {
            "suite": self.suite, "verdict": self.verdict.value,
            "groups": [g.to_json() for g in self.groups], "missing": list(self.missing),
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["suite"], Verdict(d["verdict"]),
                   tuple(GroupReport.from_json(g) for g in d["groups"]), tuple(d["missing"]))


def _run_group(S: FiniteStructure, group: AxiomGroup, workers: int) -> GroupReport:
    if group.policy == "once":
        reports = tuple(check_formula(S, f, 0, workers) for f in group.axioms)
        return GroupReport(group.name, group.policy, all(r.holds for r in reports), None, reports)
    reports = []
    chosen = None
    for i in range(S.n_families):
        batch = [check_formula(S, f, i, workers) for f in group.axioms]
        reports.extend(batch)
        if chosen is None and all(r.holds for r in batch):
            chosen = i
    if group.policy == "all":
        ok = all(r.holds for r in reports)
    else:
        ok = chosen is not None
    return GroupReport(group.name, group.policy, ok, chosen, tuple(reports))


def run_suite(S: FiniteStructure, suite, workers: int = 1) -> SuiteReport:
    if isinstance(suite, str):
        suite = get_suite(suite)
    missing = suite.missing_signature(S)
    if missing:
        return SuiteReport(suite.name, Verdict.NOT_APPLICABLE, (), tuple(missing))
    groups = tuple(_run_group(S, g, workers) for g in suite.groups)
    verdict = Verdict.HOLDS if all(g.holds for g in groups) else Verdict.FAILS
    return SuiteReport(suite.name, verdict, groups)


def classify_structure(S: FiniteStructure) -> Dict[str, Verdict]:
    """Verdict of every registered suite; implication suites are also run on
    each of ``imp_neg``/``imp_sim`` that the structure carries."""
    out = {}
    for name, suite in SUITES.items():
        out[name] = run_suite(S, suite).verdict
        if name.startswith("implication-"):
            for op in ("imp_neg", "imp_sim"):
                if op in S.ops:
                    key = f"{name}[{op}]"
                    out[key] = run_suite(S, get_suite(name, op)).verdict
    return out


def implication_property_table(S: FiniteStructure, op: str) -> Dict[str, bool]:
    S.operation(op)  # raises UnknownOperationError
    if S.operation(op).arity != 2:
        raise ValueError(f"{op} is not binary")
    axioms = implication_axioms(op)
    return {name: check_formula(S, axioms[name]).holds for name in IMPLICATION_PROPERTIES}


# ---------------------------------------------------------------------------
# Reference structures


class PartitionError(ValueError):
    pass


def _set_name(s: Iterable) -> str:
    items = sorted(s, key=str)
    return "{" + " ".join(map(str, items)) + "}"


def pawlak_structure(universe: Iterable, partition: Iterable[Iterable]) -> FiniteStructure:
    """Power set of ``universe`` with the classical lower/upper approximations
    of the equivalence given by ``partition``."""
    U = list(dict.fromkeys(universe))
    if len(U) > 4:
        raise PartitionError("the universe may have at most 4 elements")
    for item in U:
        text = str(item)
        if not text or any(ch in text for ch in ", {}"):
            raise PartitionError(f"unusable element name {item!r}")
    blocks = [frozenset(bl) for bl in partition]
    if any(not bl for bl in blocks):
        raise PartitionError("empty block")
    seen = set()
    for bl in blocks:
        if bl & seen:
            raise PartitionError("blocks overlap")
        seen |= bl
    if seen != set(U):
        raise PartitionError("blocks do not cover the universe")

    subsets = [frozenset(s) for k in range(len(U) + 1) for s in itertools.combinations(U, k)]
    name = {s: _set_name(s) for s in subsets}
    carrier = [name[s] for s in subsets]

    def lower(s):
        return frozenset().union(*[bl for bl in blocks if bl <= s])

    def upper(s):
        return frozenset().union(*[bl for bl in blocks if bl & s])

    incl = [(name[s], name[t]) for s in subsets for t in subsets if s <= t]
    ops = {
        "vee": Operation("vee", 2, {(name[s], name[t]): name[s | t] for s in subsets for t in subsets}),
        "wedge": Operation("wedge", 2, {(name[s], name[t]): name[s & t] for s in subsets for t in subsets}),
    }
    return FiniteStructure(
        carrier=carrier, order=incl, parthood=incl, ops=ops,
        constants={"bot": name[frozenset()], "top": name[frozenset(U)]},
        lower=(Operation("l", 1, {(name[s],): name[lower(s)] for s in subsets}),),
        upper=(Operation("u", 1, {(name[s],): name[upper(s)] for s in subsets}),),
    )


def chain_structure(size: int, lattice: bool = True) -> FiniteStructure:
    """Chain ``0 < 1 < ... < size-1`` with max/min as join/meet."""
    carrier = [str(i) for i in range(size)]
    order = [(p, q) for p in carrier for q in carrier if int(p) <= int(q)]
    ops = {}
    if lattice:
        ops["vee"] = Operation("vee", 2, {(p, q): max(p, q, key=int) for p in carrier for q in carrier})
        ops["wedge"] = Operation("wedge", 2, {(p, q): min(p, q, key=int) for p in carrier for q in carrier})
    return FiniteStructure(
        carrier=carrier, order=order, parthood=order, ops=ops,
        constants={"bot": carrier[0], "top": carrier[-1]},
    )


# ---------------------------------------------------------------------------
# Model enumeration


class EnumerationBoundError(ValueError):
    pass


ARITIES = {"vee": 2, "wedge": 2, "otimes": 2, "cdot": 2, "imp": 2, "imp_neg": 2,
           "imp_sim": 2, "n": 1, "l": 1, "u": 1}
MAX_SIZE_BINARY = 3
MAX_SIZE_UNARY = 5


@dataclass(frozen=True)
class EnumerationTask:
    """Search space: every table for the ``free`` operations on a fixed base.

    ``l`` and ``u`` stand for the single operator family of index 0.  The
    base defaults to the lattice chain of the given size.
    """

    size: int
    suite: str
    free: Tuple[str, ...] = ("l", "u")
    base: Optional[FiniteStructure] = None
    partial: frozenset = frozenset()
    count_only: bool = True
    arities: Mapping[str, int] = field(default_factory=dict)

    def arity(self, op: str) -> int:
        if op in self.arities:
            return self.arities[op]
        if op in ARITIES:
            return ARITIES[op]
        raise ValueError(f"unknown arity for free operation {op!r}")

    def check_bounds(self):
        if self.size < 1:
            raise EnumerationBoundError("size must be at least 1")
        if not self.free:
            raise EnumerationBoundError("nothing to enumerate")
        limit = MAX_SIZE_BINARY if any(self.arity(op) > 1 for op in self.free) else MAX_SIZE_UNARY
        if self.size > limit:
            raise EnumerationBoundError(
                f"size {self.size} exceeds the bound {limit} for this search")
        if self.base is not None and len(self.base.carrier) != self.size:
            raise EnumerationBoundError("base structure has a different size")


@dataclass
class EnumerationResult:
    count: int
    models: Optional[List[FiniteStructure]]
    nodes: int = 0


class _Unassigned(Exception):
    pass


class _DraftTable(dict):
    """Operation table under construction; reading an open cell aborts."""

    def __init__(self, open_cells):
        super().__init__()
        self.open = open_cells

    def get(self, key, default=None):
        if key in self.open:
            raise _Unassigned
        return super().get(key, default)


def _cells(task: EnumerationTask, carrier) -> List[Tuple[str, Tuple[str, ...]]]:
    return [(op, args) for op in task.free
            for args in itertools.product(carrier, repeat=task.arity(op))]


def _assemble(base: FiniteStructure, task: EnumerationTask, tables: Mapping[str, Mapping]) -> FiniteStructure:
    ops = dict(base.ops)
    lower, upper = list(base.lower), list(base.upper)
    for op in task.free:
        operation = Operation(op, task.arity(op), tables[op])
        if op == "l":
            lower[:1] = [operation]
        elif op == "u":
            upper[:1] = [operation]
        else:
            ops[op] = operation
    return base.replace(ops=ops, lower=tuple(lower), upper=tuple(upper))


def _raw_structure(base: FiniteStructure, task: EnumerationTask, tables) -> FiniteStructure:
    """Assemble without validation (draft tables hold open cells)."""
    S = object.__new__(FiniteStructure)
    ops = dict(base.ops)
    lower, upper = list(base.lower), list(base.upper)
    for op in task.free:
        operation = Operation(op, task.arity(op), tables[op])
        if op == "l":
            lower[:1] = [operation]
        elif op == "u":
            upper[:1] = [operation]
        else:
            ops[op] = operation
    for name, value in (
        ("carrier", base.carrier), ("order", base.order), ("parthood", base.parthood),
        ("ops", ops), ("constants", base.constants), ("lower", tuple(lower)),
        ("upper", tuple(upper)), ("predicates", base.predicates),
    ):
        object.__setattr__(S, name, value)
    return S


def _refuted(S: FiniteStructure, suite: AxiomSuite) -> bool:
    """True when some axiom instance already fails whatever the open cells become."""
    for group in suite.groups:
        indices = [0] if group.policy == "once" else range(S.n_families)
        failing_indices = 0
        for i in indices:
            if _group_refuted_at(S, group, i):
                if group.policy != "some":
                    return True
                failing_indices += 1
        if group.policy == "some" and S.n_families and failing_indices == S.n_families:
            return True
    return False


def _group_refuted_at(S, group: AxiomGroup, index: int) -> bool:
    for f in group.axioms:
        for values in itertools.product(S.carrier, repeat=len(f.variables)):
            try:
                if not evaluate(S, f.body, dict(zip(f.variables, values)), index):
                    return True
            except _Unassigned:
                continue
    return False


def _base_for(task: EnumerationTask) -> FiniteStructure:
    base = task.base if task.base is not None else chain_structure(task.size)
    if ("l" in task.free) != ("u" in task.free) and base.n_families == 0:
        raise ValueError("free 'l' and 'u' need each other unless the base has a family")
    return base


def enumerate_models(task: EnumerationTask, prune: bool = True) -> EnumerationResult:
    """Count (and optionally collect) every structure over the free tables that
    satisfies the suite.  Generation order is the product order of cell values
    in carrier order, UNDEFINED last where partiality is allowed.

    ``prune=False`` tries every complete assignment; ``prune=True`` backtracks
    cell by cell and cuts branches with an already-determined failing instance.
    Both produce the same models in the same order.
    """
    task.check_bounds()
    suite = get_suite(task.suite)
    base = _base_for(task)
    cells = _cells(task, base.carrier)

    def values_for(op):
        vals: List[Optional[str]] = list(base.carrier)
        if op in task.partial:
            vals.append(None)
        return vals

    models: Optional[List[FiniteStructure]] = None if task.count_only else []
    count = 0
    nodes = 0

    def accept(assignment):
        nonlocal count
        tables: Dict[str, Dict] = {op: {} for op in task.free}
        for (op, args), v in zip(cells, assignment):
            tables[op][args] = v
        S = _assemble(base, task, tables)
        if run_suite(S, suite).holds:
            count += 1
            if models is not None:
                models.append(S)

    if not prune:
        for assignment in itertools.product(*(values_for(op) for op, _ in cells)):
            nodes += 1
            accept(assignment)
        return EnumerationResult(count, models, nodes)

    drafts = {op: _DraftTable({args for o, args in cells if o == op}) for op in task.free}
    S_draft = _raw_structure(base, task, drafts)
    chosen: List[Optional[str]] = []

    def search(k: int):
        nonlocal nodes
        nodes += 1
        if k == len(cells):
            accept(chosen)
            return
        op, args = cells[k]
        table = drafts[op]
        table.open.discard(args)
        for v in values_for(op):
            table[args] = v
            chosen.append(v)
            if not _refuted(S_draft, suite):
                search(k + 1)
            chosen.pop()
        del table[args]
        table.open.add(args)

    if not _refuted(S_draft, suite):
        search(0)
    return EnumerationResult(count, models, nodes)
