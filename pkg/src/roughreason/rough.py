"""Rough spaces over verified solution corpora.

Solutions are ordered by how far they are from their canonical (proper)
solution: ``S <= T`` when both aim at the same canonical solution and ``S``
carries at least as much defect severity as ``T``.  Every subdomain gets its
own pair of partial operators: ``u_<tag>`` repairs one unit of severity and
``l_<tag>`` keeps only fully correct solutions, sending the rest to ``bot``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ._undefined import UNDEFINED
from .partial import FiniteStructure, Operation, StructureError
from .verifier import DEFAULT_RUBRIC, DefectLedger, Rubric, read_solution, verify_solution

__all__ = [
    "BOT", "TOP", "SUBDOMAIN_TAGS", "CorpusError", "DefectClass", "RoughOperator",
    "RoughSpace", "Trajectory", "Corpus", "build_space", "apply_operator",
    "iterate_operator", "induced_structure", "load_corpus", "sample_corpus", "sample_corpus_path",
]

BOT, TOP = "bot", "top"
SUBDOMAIN_TAGS = {"equational": "eq", "graphical": "graph"}


class CorpusError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class DefectClass:
    target: str
    severity: int

    def __post_init__(self):
        if self.severity < 0:
            raise ValueError("severity is non-negative")


@dataclass(frozen=True)
class RoughOperator:
    name: str
    subdomain: str
    table: Mapping[str, Optional[str]]

    def __call__(self, element: str):
        value = self.table.get(element)
        return UNDEFINED if value is None else value


@dataclass(frozen=True)
class RoughSpace:
    elements: Tuple[str, ...]
    classes: Mapping[str, DefectClass]  # every element except bot and top
    subdomains: Mapping[str, str]
    operators: Mapping[str, RoughOperator]
    ledgers: Mapping[str, DefectLedger] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("classes", "subdomains", "operators", "ledgers"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))
        self._check()

    def leq(self, s: str, t: str) -> bool:
        if s == BOT or t == TOP:
            return True
        if s == TOP or t == BOT:
            return False
        cs, ct = self.classes[s], self.classes[t]
        return cs.target == ct.target and cs.severity >= ct.severity

    def severity(self, element: str) -> Optional[int]:
        c = self.classes.get(element)
        return None if c is None else c.severity

    def _check(self):
        for e in self.elements:
            if not self.leq(e, e):
                raise StructureError(f"order is not reflexive at {e}")
        for a in self.elements:
            for b in self.elements:
                if not self.leq(a, b):
                    continue
                for c in self.elements:
                    if self.leq(b, c) and not self.leq(a, c):
                        raise StructureError(f"order is not transitive at {a}, {b}, {c}")
        for op in self.operators.values():
            for e, v in op.table.items():
                if e not in self.elements or (v is not None and v not in self.elements):
                    raise StructureError(f"{op.name} maps outside the space: {e} -> {v}")
                if v is not None and e not in (BOT, TOP) and self.subdomains.get(e) != op.subdomain:
                    raise StructureError(f"{op.name} is defined outside {op.subdomain}: {e}")

    def with_operator(self, name: str, subdomain: str,
                      mapping: Union[Mapping[str, Optional[str]], Callable[[str], Optional[str]]]
                      ) -> "RoughSpace":
        """A copy with operator ``name`` replaced or added (used to plug in
        alternative repair mechanisms, or deliberately broken ones)."""
        if callable(mapping):
            mapping = {e: mapping(e) for e in self.elements}
        ops = dict(self.operators)
        ops[name] = RoughOperator(name, subdomain, MappingProxyType(dict(mapping)))
        return RoughSpace(self.elements, self.classes, self.subdomains, ops, self.ledgers)

    def representative(self, cls: DefectClass) -> Optional[str]:
        for e in self.elements:
            if self.classes.get(e) == cls:
                return e
        return None


def _repair_id(target: str, severity: int) -> str:
    return target if severity == 0 else f"{target}~{severity}"


def build_space(ledgers: Sequence[DefectLedger], canonical: Sequence[str] = (),
                targets: Optional[Mapping[str, str]] = None,
                subdomains: Optional[Mapping[str, str]] = None) -> RoughSpace:
    """Assemble the space, adding a synthetic repair stage ``<target>~<k>``
    for every severity between a corpus solution and its target."""
    targets = dict(targets or {})
    by_id = {lg.solution: lg for lg in ledgers}
    if len(by_id) != len(ledgers):
        raise CorpusError("solution ids must be unique")
    for sid in targets:
        if sid not in by_id and sid not in canonical:
            raise CorpusError(f"ledger missing for {sid}")
    tags: Dict[str, str] = {}
    for lg in ledgers:
        tags[lg.solution] = lg.subdomain
    for cid in canonical:
        tags.setdefault(cid, (subdomains or {}).get(cid, "equational"))
    for sid, tag in (subdomains or {}).items():
        if sid in by_id and by_id[sid].subdomain != tag:
            raise CorpusError(f"{sid} is tagged {tag} but its script is {by_id[sid].subdomain}")
    for cid in canonical:
        if cid in by_id and by_id[cid].total_severity:
            raise CorpusError(f"canonical solution {cid} has defects")

    classes: Dict[str, DefectClass] = {cid: DefectClass(cid, 0) for cid in canonical}
    for lg in ledgers:
        sid = lg.solution
        if sid in classes:
            continue
        target = targets.get(sid)
        if target is None:
            if lg.total_severity == 0:
                target = sid
            else:
                same = [c for c in canonical if tags[c] == lg.subdomain]
                if len(same) != 1:
                    raise CorpusError(f"no canonical target for {sid}")
                target = same[0]
        if target != sid and target not in canonical:
            raise CorpusError(f"unknown target class {target!r} for {sid}")
        if tags.get(target) != lg.subdomain:
            raise CorpusError(f"{sid} and its target {target} are in different subdomains")
        classes[sid] = DefectClass(target, lg.total_severity)
        tags.setdefault(target, lg.subdomain)
        classes.setdefault(target, DefectClass(target, 0))

    present = set(classes.values())
    for cls in sorted(present):
        for k in range(1, cls.severity):
            stage = DefectClass(cls.target, k)
            if stage not in present:
                sid = _repair_id(cls.target, k)
                classes[sid] = stage
                tags[sid] = tags[cls.target]

    body = sorted(classes, key=lambda e: (classes[e].target, -classes[e].severity, e))
    elements = (BOT, *body, TOP)
    reps = {}
    for e in body:
        reps.setdefault(classes[e], e)
    for cls in list(reps):
        if cls.severity == 0:
            reps[cls] = cls.target

    used = sorted({tags[e] for e in body}, key=list(SUBDOMAIN_TAGS).index) or ["equational"]
    operators = {}
    for sub in used:
        tag = SUBDOMAIN_TAGS[sub]
        upper = {BOT: BOT, TOP: TOP}
        lower = {BOT: BOT, TOP: TOP}
        for e in body:
            if tags[e] != sub:
                continue
            c = classes[e]
            upper[e] = reps[DefectClass(c.target, max(c.severity - 1, 0))]
            lower[e] = e if c.severity == 0 else BOT
        operators[f"u_{tag}"] = RoughOperator(f"u_{tag}", sub, MappingProxyType(upper))
        operators[f"l_{tag}"] = RoughOperator(f"l_{tag}", sub, MappingProxyType(lower))
    return RoughSpace(elements, classes, tags, operators, by_id)


def _operator(space: RoughSpace, name: str) -> RoughOperator:
    try:
        return space.operators[name]
    except KeyError:
        raise KeyError(f"unknown operator {name!r}; known: {sorted(space.operators)}") from None


def apply_operator(space: RoughSpace, name: str, element: str):
    op = _operator(space, name)
    if element not in space.elements:
        raise KeyError(f"{element!r} is not an element of the space")
    return op(element)


@dataclass(frozen=True)
class Trajectory:
    start: str
    operator: str
    elements: Tuple[str, ...]
    fixpoint_at: Optional[int] = None
    undefined_at: Optional[int] = None

    @property
    def final(self) -> str:
        return self.elements[-1]

    def to_json(self):
        return {
            "start": self.start, "operator": self.operator, "elements": list(self.elements),
            "fixpoint_at": self.fixpoint_at, "undefined_at": self.undefined_at,
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["start"], d["operator"], tuple(d["elements"]), d["fixpoint_at"], d["undefined_at"])

    def __str__(self):
        text = " -> ".join(self.elements)
        if self.undefined_at is not None:
            return text + " -> UNDEFINED"
        if self.fixpoint_at is not None:
            return text + f" (fixpoint at step {self.fixpoint_at})"
        return text


def iterate_operator(space: RoughSpace, name: str, element: str, k: int) -> Trajectory:
    if k < 0:
        raise ValueError("k must be non-negative")
    path = [element]
    apply_operator(space, name, element)  # validates name and element
    for step in range(k):
        nxt = apply_operator(space, name, path[-1])
        if nxt is UNDEFINED:
            return Trajectory(element, name, tuple(path), undefined_at=step)
        if nxt == path[-1]:
            return Trajectory(element, name, tuple(path), fixpoint_at=step)
        path.append(nxt)
    return Trajectory(element, name, tuple(path))


def induced_structure(space: RoughSpace) -> FiniteStructure:
    """The quotient of the space by order-equivalence, as a partial algebra.

    Join and meet are the larger and smaller of two comparable classes and
    undefined for incomparable ones; parthood is the order; the l/u families
    are the installed operator pairs, one family per subdomain.
    """
    cls_of = {}
    names: List[str] = []
    for e in space.elements:
        for n in names:
            if space.leq(e, n) and space.leq(n, e):
                cls_of[e] = n
                break
        else:
            names.append(e)
            cls_of[e] = e
    order = {(a, b) for a in names for b in names if space.leq(a, b)}
    vee, wedge = {}, {}
    for a in names:
        for b in names:
            if (a, b) in order:
                vee[(a, b)], wedge[(a, b)] = b, a
            elif (b, a) in order:
                vee[(a, b)], wedge[(a, b)] = a, b

    def quotient(op: RoughOperator, letter: str) -> Operation:
        table = {}
        for e in space.elements:
            v = op.table.get(e)
            img = None if v is None else cls_of[v]
            key = (cls_of[e],)
            if key in table and table[key] != img:
                raise StructureError(f"{op.name} does not respect order-equivalence at {e}")
            table[key] = img
        return Operation(letter, 1, table)

    lower, upper = [], []
    for sub, tag in SUBDOMAIN_TAGS.items():
        if f"u_{tag}" in space.operators:
            upper.append(quotient(space.operators[f"u_{tag}"], "u"))
            lower.append(quotient(space.operators[f"l_{tag}"], "l"))
    return FiniteStructure(
        carrier=tuple(names), order=frozenset(order), parthood=frozenset(order),
        ops={"vee": Operation("vee", 2, vee), "wedge": Operation("wedge", 2, wedge)},
        constants={"bot": BOT, "top": TOP}, lower=tuple(lower), upper=tuple(upper),
    )


# ---------------------------------------------------------------------------
# Corpora on disk


@dataclass(frozen=True)
class Corpus:
    ledgers: Tuple[DefectLedger, ...]
    canonical: Tuple[str, ...] = ()
    targets: Mapping[str, str] = field(default_factory=dict)
    subdomains: Mapping[str, str] = field(default_factory=dict)
    rubric: Rubric = DEFAULT_RUBRIC

    def space(self) -> RoughSpace:
        return build_space(self.ledgers, self.canonical, self.targets, self.subdomains)


def load_corpus(directory, rubric: Optional[Rubric] = None) -> Corpus:
    """Read ``*.sol`` scripts and an optional ``manifest.json`` from a directory.

    An explicit ``rubric`` wins over the manifest's ``"rubric"`` entry.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"{directory} is not a directory")
    manifest = {}
    mpath = directory / "manifest.json"
    if mpath.exists():
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
        unknown = set(manifest) - {"canonical", "targets", "subdomains", "rubric"}
        if unknown:
            raise CorpusError(f"unknown manifest keys {sorted(unknown)}")
    if rubric is None:
        rubric = Rubric.from_json(manifest["rubric"]) if "rubric" in manifest else DEFAULT_RUBRIC
    scripts = [read_solution(p) for p in sorted(directory.glob("*.sol"))]
    ledgers = tuple(verify_solution(s, rubric) for s in scripts)
    return Corpus(
        ledgers, tuple(manifest.get("canonical", ())), dict(manifest.get("targets", {})),
        dict(manifest.get("subdomains", {})), rubric,
    )


def sample_corpus_path() -> Path:
    return Path(str(resources.files("roughreason") / "data" / "sample_corpus"))


def sample_corpus(rubric: Optional[Rubric] = None) -> Corpus:
    """The bundled corpus of worked solutions to 2x + 3 = 4x + 1."""
    return load_corpus(sample_corpus_path(), rubric)
