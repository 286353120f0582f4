"""Checking student solutions of linear equations step by step.

A step is *sound* when the claimed equation is what the declared rule
produces from the previous equation, comparing each side as an expanded
polynomial (sides may be swapped), or failing that, when it keeps both the
previous solution set and the solution set of the rule's genuine output.
It is *mislabeled* when it keeps the solution set but is reproduced by a
different rule of the vocabulary (or by none where the declared rule would
change the solutions), and *unsound* when the solution set changes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .terms import (
    DivisionByZeroError, Equation, MultiVariableError, NonLinearError, Num, Op,
    SolutionSet, Term, TermSyntaxError, addends, eval_term, expand, parse_equation,
    parse_term, poly_to_term, print_term, solution_set, variables,
)

__all__ = [
    "RULES", "RuleApplication", "StepRecord", "SolutionScript", "StepVerdict",
    "DefectLedger", "Rubric", "DEFAULT_RUBRIC", "RuleError", "ArgumentNotPresent",
    "ScriptSyntaxError", "apply_rule", "transpose_candidates", "check_step",
    "verify_solution", "parse_solution", "read_solution", "ledger_markdown",
]

# keyword -> needs argument
RULES: Dict[str, bool] = {
    "given": False, "add": True, "subtract": True, "multiply": True, "divide": True,
    "cancel": True, "transpose": True, "simplify": False, "conclude": False,
}
DIVIDE_FAMILY = ("divide", "cancel")
# transpose may omit its argument: the verifier then tries every top-level addend
OPTIONAL_ARGUMENT = ("transpose",)


class RuleError(ValueError):
    pass


class ArgumentNotPresent(RuleError):
    pass


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    argument: Optional[Term] = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise RuleError(f"unknown rule {self.rule!r}")
        needs = RULES[self.rule]
        if self.argument is not None and not needs:
            raise RuleError(f"{self.rule} takes no argument")
        if self.argument is None and needs and self.rule not in OPTIONAL_ARGUMENT:
            raise RuleError(f"{self.rule} needs an argument")

    @classmethod
    def parse(cls, text: str) -> "RuleApplication":
        text = text.strip()
        if not text:
            raise RuleError("missing rule")
        word, _, rest = text.partition(" ")
        rest = rest.strip()
        return cls(word.lower(), parse_term(rest) if rest else None)

    def __str__(self):
        if self.argument is None:
            return self.rule
        return f"{self.rule} {print_term(self.argument)}"


# ---------------------------------------------------------------------------
# Rule application


def _sum(terms: Sequence[Tuple[int, Term]]) -> Term:
    if not terms:
        return Num(0)
    sign, first = terms[0]
    out = first if sign > 0 else Op("neg", (first,))
    for sign, t in terms[1:]:
        out = Op("+" if sign > 0 else "-", (out, t))
    return out


def _constant_value(t: Term) -> Fraction:
    if variables(t):
        raise RuleError(f"argument {print_term(t)} must be a constant")
    v = eval_term(t)
    if not isinstance(v, Fraction):
        raise RuleError(f"argument {print_term(t)} has no rational value")
    return v


def _divide_side(side: Term, k: Fraction, t: Term) -> Term:
    """Divide every addend by k, simplifying the addend when it is linear."""
    parts = []
    for sign, addend in addends(side):
        try:
            q = {m: c / k for m, c in expand(addend).items()}
        except (NonLinearError, DivisionByZeroError):
            parts.append((sign, Op("/", (addend, t))))
            continue
        if not q:
            parts.append((1, Num(0)))
        for m in sorted(q, key=lambda m: -len(m)):
            c = q[m] * sign
            parts.append((1 if c > 0 else -1, poly_to_term({m: abs(c)})))
    return _sum(parts)


def _transpose(e: Equation, index: int, side: str) -> Equation:
    """Move the ``index``-th top-level addend of ``side`` across the equals sign."""
    here = addends(e.lhs if side == "lhs" else e.rhs)
    there = e.rhs if side == "lhs" else e.lhs
    sign, moved = here[index]
    rest = here[:index] + here[index + 1:]
    new_here = _sum(rest)
    new_there = Op("-" if sign > 0 else "+", (there, moved))
    return Equation(new_here, new_there) if side == "lhs" else Equation(new_there, new_here)


def _whole_side_transpose(e: Equation, side: str) -> Equation:
    if side == "lhs":
        return Equation(Num(0), Op("-", (e.rhs, e.lhs)))
    return Equation(Op("-", (e.lhs, e.rhs)), Num(0))


def _matches_addend(sign: int, addend: Term, t: Term) -> bool:
    if addend == t:
        return True
    if isinstance(t, Op) and t.symbol == "neg" and sign < 0 and addend == t.args[0]:
        return True
    return False


def transpose_candidates(e: Equation, t: Optional[Term] = None) -> List[Equation]:
    """Every equation a single transposition can produce; restricted to the
    argument ``t`` when given (matched as an addend or as a whole side)."""
    out = []
    for side in ("lhs", "rhs"):
        whole = e.lhs if side == "lhs" else e.rhs
        terms = addends(whole)
        if t is not None and whole == t and len(terms) > 1:
            out.append(_whole_side_transpose(e, side))
        for i, (sign, addend) in enumerate(terms):
            if t is None or _matches_addend(sign, addend, t):
                out.append(_transpose(e, i, side))
    return out


def apply_rule(e: Equation, r: RuleApplication) -> Equation:
    """The equation rule ``r`` genuinely produces from ``e``."""
    rule, t = r.rule, r.argument
    if rule in ("given", "conclude"):
        raise RuleError(f"{rule} does not transform an equation")
    if rule == "add":
        return Equation(Op("+", (e.lhs, t)), Op("+", (e.rhs, t)))
    if rule == "subtract":
        return Equation(Op("-", (e.lhs, t)), Op("-", (e.rhs, t)))
    if rule == "multiply":
        return Equation(Op("*", (e.lhs, t)), Op("*", (e.rhs, t)))
    if rule in DIVIDE_FAMILY:
        k = _constant_value(t)
        if k == 0:
            raise DivisionByZeroError("division by zero is undefined")
        return Equation(_divide_side(e.lhs, k, t), _divide_side(e.rhs, k, t))
    if rule == "transpose":
        if t is None:
            raise RuleError("transpose needs an argument to produce a single equation")
        found = transpose_candidates(e, t)
        if not found:
            raise ArgumentNotPresent(f"{print_term(t)} is not an addend of {e}")
        return found[0]
    # simplify: each side expanded and collected
    return Equation(poly_to_term(expand(e.lhs)), poly_to_term(expand(e.rhs)))


# ---------------------------------------------------------------------------
# Step checking


def _sides(e: Equation):
    return expand(e.lhs), expand(e.rhs)


def _same_sides(x: Equation, y: Equation) -> bool:
    """Side-by-side polynomial equality, allowing the sides to be swapped."""
    xl, xr = _sides(x)
    yl, yr = _sides(y)
    return (xl, xr) == (yl, yr) or (xl, xr) == (yr, yl)


def _safe_solutions(e: Equation) -> Optional[SolutionSet]:
    try:
        return solution_set(e)
    except (NonLinearError, MultiVariableError, DivisionByZeroError):
        return None


def _psub(p, q):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, Fraction(0)) - c
    return {m: c for m, c in out.items() if c != 0}


def _scale_factor(p, q) -> Optional[Fraction]:
    """k with q == k·p, or None."""
    if not p:
        return None if q else Fraction(1)
    m0 = next(iter(p))
    k = q.get(m0, Fraction(0)) / p[m0]
    if {m: c * k for m, c in p.items() if c * k != 0} == q:
        return k
    return None


def _fmt_q(q: Fraction) -> str:
    s = str(abs(q))
    return ("-" if q < 0 else "") + s


def identify_rule(prev: Equation, claimed: Equation) -> Optional[str]:
    """Name the vocabulary rule that reproduces ``claimed`` side by side, if any."""
    pl, pr = _sides(prev)
    for cl, cr in (_sides(claimed), _sides(claimed)[::-1]):
        if (cl, cr) == (pl, pr):
            return "simplify"
        dl, dr = _psub(cl, pl), _psub(cr, pr)
        if dl and dl == dr:
            t = poly_to_term(dl)
            return f"add {print_term(t)}"
        kl, kr = _scale_factor(pl, cl), _scale_factor(pr, cr)
        if not pl and not cl:
            kl = kr
        if not pr and not cr:
            kr = kl
        if kl is not None and kl == kr and kl not in (0, 1):
            if kl.numerator == 1 or (kl.numerator == -1):
                return f"divide {_fmt_q(1 / kl)}"
            return f"multiply {_fmt_q(kl)}"
    for cand in transpose_candidates(prev):
        if _same_sides(cand, claimed):
            return "transpose"
    return None


@dataclass(frozen=True)
class Rubric:
    """Severity weights for unsound and mislabeled steps."""

    unsound_base: int = 1
    untouched_addend_weight: int = 1
    mislabeled: int = 0

    @classmethod
    def from_json(cls, d) -> "Rubric":
        unknown = set(d) - {"unsound_base", "untouched_addend_weight", "mislabeled"}
        if unknown:
            raise ValueError(f"unknown rubric keys {sorted(unknown)}")
        r = cls(**d)
        if r.unsound_base < 1 or r.untouched_addend_weight < 0 or r.mislabeled != 0:
            raise ValueError("rubric must keep unsound steps >= 1 and mislabeled steps at 0")
        return r

    @classmethod
    def load(cls, path) -> "Rubric":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_json(self):
        return {
            "unsound_base": self.unsound_base,
            "untouched_addend_weight": self.untouched_addend_weight,
            "mislabeled": self.mislabeled,
        }


DEFAULT_RUBRIC = Rubric()


@dataclass(frozen=True)
class StepVerdict:
    classification: str  # sound | mislabeled | unsound
    severity: int
    diagnosis: str = ""
    corrected: Optional[str] = None

    def __post_init__(self):
        if self.classification == "sound" and self.severity != 0:
            raise ValueError("sound steps have severity 0")
        if self.classification == "mislabeled" and (self.severity != 0 or not self.diagnosis):
            raise ValueError("mislabeled steps have severity 0 and a diagnosis")
        if self.classification == "unsound" and self.severity < 1:
            raise ValueError("unsound steps have severity >= 1")

    def to_json(self):
        return {
            "classification": self.classification, "severity": self.severity,
            "diagnosis": self.diagnosis, "corrected": self.corrected,
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["classification"], d["severity"], d["diagnosis"], d["corrected"])


def _untouched_addends(prev: Equation, claimed: Equation) -> int:
    count = 0
    for p_side, c_side in ((prev.lhs, claimed.lhs), (prev.rhs, claimed.rhs)):
        pool = [_signed_poly(s, t) for s, t in addends(c_side)]
        for s, t in addends(p_side):
            poly = _signed_poly(s, t)
            if poly and poly in pool:
                pool.remove(poly)
                count += 1
    return count


def _signed_poly(sign, t):
    try:
        p = expand(t)
    except (NonLinearError, DivisionByZeroError):
        return None
    return {m: sign * c for m, c in p.items()}


def check_step(prev: Equation, claimed: Equation, r: RuleApplication,
               rubric: Rubric = DEFAULT_RUBRIC) -> StepVerdict:
    if r.rule == "given":
        raise RuleError("'given' may only open a solution")
    before = solution_set(prev)
    after = _safe_solutions(claimed)

    if r.rule == "conclude":
        if after == before:
            return StepVerdict("sound", 0)
        return StepVerdict("unsound", rubric.unsound_base,
                           f"conclusion {after} does not match {before}", None)

    if r.rule == "transpose" and r.argument is None:
        genuine = transpose_candidates(prev)
    else:
        genuine = [apply_rule(prev, r)]
    if any(_same_sides(g, claimed) for g in genuine):
        return StepVerdict("sound", 0, corrected=str(genuine[0]) if genuine else None)

    corrected = str(genuine[0]) if genuine else None
    if after is not None and after == before:
        other = identify_rule(prev, claimed)
        if other is not None:
            return StepVerdict("mislabeled", rubric.mislabeled,
                               f"declared {r}, but the step is {other}", corrected)
        genuine_sets = {_safe_solutions(g) for g in genuine}
        if before in genuine_sets:
            return StepVerdict("sound", 0, "accepted: solution set preserved", corrected)
        return StepVerdict("mislabeled", rubric.mislabeled,
                           f"declared {r}; rule outside vocabulary", corrected)

    if r.rule in DIVIDE_FAMILY:
        untouched = _untouched_addends(prev, claimed)
        severity = rubric.unsound_base + rubric.untouched_addend_weight * untouched
        diagnosis = (f"{r} applied to part of the equation: "
                     f"{untouched} addend(s) left undivided")
    else:
        severity = rubric.unsound_base
        diagnosis = f"{r} does not give {claimed}"
    return StepVerdict("unsound", severity, diagnosis, corrected)


# ---------------------------------------------------------------------------
# Scripts


@dataclass(frozen=True)
class StepRecord:
    equation: Optional[Equation]
    rule: Optional[RuleApplication]
    text: str = ""
    remark: str = ""
    line: int = 0


@dataclass(frozen=True)
class SolutionScript:
    id: str
    subdomain: str
    steps: Tuple[StepRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.subdomain not in ("equational", "graphical"):
            raise ValueError(f"unknown subdomain {self.subdomain!r}")
        if not self.steps:
            raise ValueError("a solution needs a 'given' line")
        first = self.steps[0]
        if first.rule is None or first.rule.rule != "given":
            raise ValueError("the first step must be 'given'")

    @property
    def given(self) -> Equation:
        return self.steps[0].equation


_LINE_RE = re.compile(r"^\s*(?P<key>[a-z]+)\s*:\s*(?P<body>.*?)\s*$")


def parse_solution(text: str, default_id: str = "solution") -> SolutionScript:
    """Parse the line format::

        id: S1                      (optional header)
        subdomain: equational       (optional header; or graphical)
        given: 2x+3 = 4x+1
        step: x+3 = 2x+1 ; cancel 2
        note: free text             (graphical scripts)

    ``#`` starts a comment.  A step may chain equations with ``and so``;
    the last one is the claimed equation.
    """
    sid, subdomain = default_id, "equational"
    steps: List[StepRecord] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ScriptSyntaxError("expected 'key: value'", lineno)
        key, body = m.group("key"), m.group("body")
        try:
            if key == "id":
                if steps:
                    raise ScriptSyntaxError("headers must precede 'given'", lineno)
                sid = body
            elif key == "subdomain":
                if steps:
                    raise ScriptSyntaxError("headers must precede 'given'", lineno)
                if body not in ("equational", "graphical"):
                    raise ScriptSyntaxError(f"unknown subdomain {body!r}", lineno)
                subdomain = body
            elif key == "given":
                if steps:
                    raise ScriptSyntaxError("'given' must come first and only once", lineno)
                steps.append(StepRecord(parse_equation(body), RuleApplication("given"), body, line=lineno))
            elif key == "step":
                if not steps:
                    raise ScriptSyntaxError("'step' before 'given'", lineno)
                if subdomain == "graphical":
                    raise ScriptSyntaxError("graphical scripts use 'note' lines", lineno)
                eq_text, sep, rule_text = body.rpartition(";")
                if not sep:
                    raise ScriptSyntaxError("expected '<equation> ; <rule>'", lineno)
                chain = [p.strip() for p in re.split(r"\band so\b", eq_text)]
                equation = parse_equation(chain[-1])
                remark = " and so ".join(chain[:-1])
                steps.append(StepRecord(equation, RuleApplication.parse(rule_text),
                                        eq_text.strip(), remark, lineno))
            elif key == "note":
                if not steps:
                    raise ScriptSyntaxError("'note' before 'given'", lineno)
                steps.append(StepRecord(None, None, body, line=lineno))
            else:
                raise ScriptSyntaxError(f"unknown key {key!r}", lineno)
        except (TermSyntaxError, RuleError) as exc:
            raise ScriptSyntaxError(str(exc), lineno) from None
    if not steps:
        raise ScriptSyntaxError("missing 'given' line", max(1, len(text.splitlines())))
    return SolutionScript(sid, subdomain, tuple(steps))


def read_solution(path) -> SolutionScript:
    path = Path(path)
    return parse_solution(path.read_text(encoding="utf-8"), default_id=path.stem)


# ---------------------------------------------------------------------------
# Ledgers


@dataclass(frozen=True)
class DefectLedger:
    solution: str
    subdomain: str
    verifiable: bool
    verdicts: Tuple[Optional[StepVerdict], ...] = ()
    final_answer: Optional[SolutionSet] = None
    true_answer: Optional[SolutionSet] = None
    steps: Tuple[str, ...] = ()
    rules: Tuple[str, ...] = ()

    @property
    def total_severity(self) -> int:
        return sum(v.severity for v in self.verdicts if v is not None)

    @property
    def severities(self) -> Tuple[int, ...]:
        return tuple(0 if v is None else v.severity for v in self.verdicts)

    @property
    def correct_answer(self) -> Optional[bool]:
        if not self.verifiable:
            return None
        return self.final_answer == self.true_answer

    def flagged(self) -> List[int]:
        """1-based positions of steps that are not sound."""
        return [i + 1 for i, v in enumerate(self.verdicts)
                if v is not None and v.classification != "sound"]

    def to_json(self):
        return {
            "solution": self.solution, "subdomain": self.subdomain,
            "verifiable": self.verifiable,
            "steps": list(self.steps), "rules": list(self.rules),
            "verdicts": [None if v is None else v.to_json() for v in self.verdicts],
            "total_severity": self.total_severity,
            "final_answer": None if self.final_answer is None else self.final_answer.to_json(),
            "true_answer": None if self.true_answer is None else self.true_answer.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        return cls(
            d["solution"], d["subdomain"], d["verifiable"],
            tuple(None if v is None else StepVerdict.from_json(v) for v in d["verdicts"]),
            None if d["final_answer"] is None else SolutionSet.from_json(d["final_answer"]),
            None if d["true_answer"] is None else SolutionSet.from_json(d["true_answer"]),
            tuple(d["steps"]), tuple(d["rules"]),
        )


def verify_solution(s: SolutionScript, rubric: Rubric = DEFAULT_RUBRIC) -> DefectLedger:
    texts = tuple(st.text for st in s.steps)
    rules = tuple("" if st.rule is None else str(st.rule) for st in s.steps)
    if s.subdomain != "equational":
        return DefectLedger(s.id, s.subdomain, False, steps=texts, rules=rules)
    verdicts: List[StepVerdict] = [StepVerdict("sound", 0)]
    prev = s.given
    for st in s.steps[1:]:
        verdicts.append(check_step(prev, st.equation, st.rule, rubric))
        prev = st.equation
    return DefectLedger(
        s.id, s.subdomain, True, tuple(verdicts),
        _safe_solutions(prev), solution_set(s.given), texts, rules,
    )


def ledger_markdown(ledgers: Sequence[DefectLedger]) -> str:
    out = []
    for lg in ledgers:
        out.append(f"### {lg.solution} ({lg.subdomain})")
        out.append("")
        if not lg.verifiable:
            out.append("not verifiable: graphical reasoning is recorded, not checked")
            out.append("")
            continue
        out.append("| step | equation | rule | verdict | severity | diagnosis |")
        out.append("|---|---|---|---|---|---|")
        for i, (text, rule, v) in enumerate(zip(lg.steps, lg.rules, lg.verdicts), 1):
            out.append(f"| {i} | {text} | {rule} | {v.classification} | {v.severity} | {v.diagnosis} |")
        out.append("")
        out.append(f"total severity {lg.total_severity}; final answer {lg.final_answer}, "
                   f"true solution {lg.true_answer}")
        out.append("")
    return "\n".join(out)
