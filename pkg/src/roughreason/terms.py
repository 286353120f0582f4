"""Terms and equations of school algebra over exact rationals.

The signature has binary ``+ - * /`` (fraction bars and ``÷`` are the same
node), unary sign operators ``pos``/``neg`` and ``sqrt``, and the numeric
constants.  ``≥`` is rewritten to ``≤`` while parsing.

Concrete syntax::

    2x + 3 = 4x + 1        juxtaposition is multiplication
    -(2/4)x                prefix sign; 2/4 is a rational literal (1/2)
    √(4) × sqrt(9)         √ and sqrt are synonyms
    x ÷ 0                  ÷ and / are synonyms (between non-literals)

Evaluation is exact (``fractions.Fraction``).  Division by zero and square
roots without a rational value give ``UNDEFINED``, which propagates
strictly through every operation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from ._undefined import UNDEFINED

__all__ = [
    "SIGNATURE", "Var", "Num", "Op", "Term", "Equation", "Inequality",
    "LinearNormalForm", "SolutionSet",
    "TermSyntaxError", "UnknownSymbolError", "UnboundVariableError",
    "NonLinearError", "MultiVariableError", "DivisionByZeroError",
    "parse_term", "parse_equation", "parse_relation", "print_term",
    "eval_term", "holds", "variables", "addends", "expand", "poly_to_term",
    "normalize_linear", "solution_set",
]

# symbol -> arity
SIGNATURE: Dict[str, int] = {
    "+": 2, "-": 2, "*": 2, "/": 2,
    "pos": 1, "neg": 1, "sqrt": 1,
}


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(TermSyntaxError):
    pass


class UnboundVariableError(KeyError):
    pass


class NonLinearError(ValueError):
    pass


class MultiVariableError(ValueError):
    pass


class DivisionByZeroError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if len(self.name) != 1 or not self.name.isalpha():
            raise ValueError(f"variables are single letters, got {self.name!r}")

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True)
class Num:
    """Non-negative rational constant; negative numbers are ``neg`` nodes."""

    value: Fraction

    def __post_init__(self):
        value = Fraction(self.value)
        if value < 0:
            raise ValueError("constants are non-negative; wrap in Op('neg', ...)")
        object.__setattr__(self, "value", value)

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True)
class Op:
    symbol: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        arity = SIGNATURE.get(self.symbol)
        if arity is None:
            raise ValueError(f"unknown operation symbol {self.symbol!r}")
        args = tuple(self.args)
        if len(args) != arity:
            raise ValueError(f"{self.symbol!r} takes {arity} argument(s), got {len(args)}")
        object.__setattr__(self, "args", args)

    def __str__(self):
        return print_term(self)


Term = Union[Var, Num, Op]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def swapped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def __str__(self):
        return f"{print_term(self.lhs)} = {print_term(self.rhs)}"


@dataclass(frozen=True)
class Inequality:
    """``lhs ≤ rhs``; the only order predicate kept after parsing."""

    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{print_term(self.lhs)} ≤ {print_term(self.rhs)}"


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<rat>\d+\s*/\s*\d+)
  | (?P<num>\d+)
  | (?P<sqrt>sqrt|√)
  | (?P<rel><=|>=|≤|≥)
  | (?P<eq>=)
  | (?P<add>\+|⊕)
  | (?P<sub>-|−|⊖)
  | (?P<mul>\*|×|·)
  | (?P<div>/|÷)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<var>[A-Za-z])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> List[_Tok]:
    toks: List[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise UnknownSymbolError(f"unknown symbol {text[pos]!r}", pos)
        kind = m.lastgroup
        raw = m.group()
        if kind == "rat" and int(raw.split("/")[1]) == 0:
            # a literal zero denominator stays a real division (undefined)
            kind, raw = "num", m.group().split("/")[0].rstrip()
        if kind != "ws":
            toks.append(_Tok(kind, raw, pos))
        pos += len(raw)
    toks.append(_Tok("eof", "", len(text)))
    return toks


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        if not text or not text.strip():
            raise TermSyntaxError("empty input", 0)
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_end(self):
        if self.tok.kind != "eof":
            raise TermSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)

    def expr(self) -> Term:
        left = self.term()
        while self.tok.kind in ("add", "sub") and self.tok.text not in ("⊕", "⊖"):
            sym = "+" if self.advance().kind == "add" else "-"
            left = Op(sym, (left, self.term()))
        return left

    def term(self) -> Term:
        left = self.prefix()
        while True:
            kind = self.tok.kind
            if kind in ("mul", "div"):
                self.advance()
                left = Op("*" if kind == "mul" else "/", (left, self.prefix()))
            elif kind in ("num", "rat", "var", "lp", "sqrt"):
                left = Op("*", (left, self.prefix()))
            else:
                return left

    def prefix(self) -> Term:
        tok = self.tok
        if tok.kind in ("add", "sub"):
            self.advance()
            return Op("pos" if tok.kind == "add" else "neg", (self.prefix(),))
        if tok.kind == "sqrt":
            self.advance()
            return Op("sqrt", (self.prefix(),))
        return self.atom()

    def atom(self) -> Term:
        tok = self.advance()
        if tok.kind == "num":
            return Num(Fraction(int(tok.text)))
        if tok.kind == "rat":
            num, den = (int(s) for s in tok.text.split("/"))
            return Num(Fraction(num, den))
        if tok.kind == "var":
            return Var(tok.text)
        if tok.kind == "lp":
            inner = self.expr()
            if self.tok.kind != "rp":
                raise TermSyntaxError("expected ')'", self.tok.pos)
            self.advance()
            return inner
        if tok.kind == "eof":
            raise TermSyntaxError("unexpected end of input", tok.pos)
        raise TermSyntaxError(f"unexpected {tok.text!r}", tok.pos)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    p.expect_end()
    return t


def parse_relation(text: str) -> Union[Equation, Inequality]:
    """Parse ``s = t``, ``s ≤ t`` or ``s ≥ t`` (the last becomes ``t ≤ s``)."""
    p = _Parser(text)
    lhs = p.expr()
    tok = p.advance()
    if tok.kind not in ("eq", "rel"):
        raise TermSyntaxError("expected '=', '≤' or '≥'", tok.pos)
    rhs = p.expr()
    p.expect_end()
    if tok.kind == "eq":
        return Equation(lhs, rhs)
    if tok.text in ("<=", "≤"):
        return Inequality(lhs, rhs)
    return Inequality(rhs, lhs)


def parse_equation(text: str) -> Equation:
    rel = parse_relation(text)
    if not isinstance(rel, Equation):
        raise TermSyntaxError("expected an equation", 0)
    return rel


# ---------------------------------------------------------------------------
# Printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "pos": 3, "neg": 3, "sqrt": 3}
_BIN_TEXT = {"+": " + ", "-": " - ", "*": " × ", "/": " ÷ "}


def _prec(t: Term) -> int:
    return _PREC[t.symbol] if isinstance(t, Op) else 4


def _fmt_num(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _juxtaposable(left: Term, right: Term) -> bool:
    right_ok = isinstance(right, Var) or (isinstance(right, Op) and right.symbol == "sqrt")
    left_ok = (
        isinstance(left, (Num, Var))
        or (isinstance(left, Op) and left.symbol == "sqrt")
        or (isinstance(left, Op) and left.symbol == "neg" and isinstance(left.args[0], Num))
    )
    return right_ok and left_ok


def print_term(t: Term) -> str:
    if isinstance(t, Num):
        return _fmt_num(t.value)
    if isinstance(t, Var):
        return t.name
    if t.symbol == "sqrt":
        return f"√({print_term(t.args[0])})"
    if t.symbol in ("pos", "neg"):
        (a,) = t.args
        inner = print_term(a)
        if _prec(a) < 3:
            inner = f"({inner})"
        return ("+" if t.symbol == "pos" else "-") + inner
    left, right = t.args
    p = _PREC[t.symbol]
    ls = print_term(left)
    rs = print_term(right)
    if _prec(left) < p:
        ls = f"({ls})"
    if _prec(right) <= p:
        rs = f"({rs})"
    if t.symbol == "*" and _juxtaposable(left, right):
        return ls + rs
    return ls + _BIN_TEXT[t.symbol] + rs


# ---------------------------------------------------------------------------
# Evaluation


def _rational_sqrt(q: Fraction):
    if q < 0:
        return UNDEFINED
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        return UNDEFINED
    return Fraction(rn, rd)


def eval_term(t: Term, env: Optional[Mapping[str, Fraction]] = None):
    """Exact value of ``t`` under ``env``, or ``UNDEFINED``."""
    env = env or {}
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        try:
            return Fraction(env[t.name])
        except KeyError:
            raise UnboundVariableError(t.name) from None
    vals = [eval_term(a, env) for a in t.args]
    if any(v is UNDEFINED for v in vals):
        return UNDEFINED
    s = t.symbol
    if s == "+":
        return vals[0] + vals[1]
    if s == "-":
        return vals[0] - vals[1]
    if s == "*":
        return vals[0] * vals[1]
    if s == "/":
        return UNDEFINED if vals[1] == 0 else vals[0] / vals[1]
    if s == "pos":
        return vals[0]
    if s == "neg":
        return -vals[0]
    return _rational_sqrt(vals[0])


def holds(rel: Union[Equation, Inequality], env=None):
    """Truth of a relation; ``UNDEFINED`` when either side is."""
    a, b = eval_term(rel.lhs, env), eval_term(rel.rhs, env)
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    return a == b if isinstance(rel, Equation) else a <= b


def variables(t) -> set:
    if isinstance(t, (Equation, Inequality)):
        return variables(t.lhs) | variables(t.rhs)
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Num):
        return set()
    out = set()
    for a in t.args:
        out |= variables(a)
    return out


def addends(t: Term) -> List[Tuple[int, Term]]:
    """Top-level signed summands: ``2x + 3 - y`` -> [(+1, 2x), (+1, 3), (-1, y)]."""
    if isinstance(t, Op) and t.symbol in ("+", "-"):
        left, right = t.args
        sign = 1 if t.symbol == "+" else -1
        return addends(left) + [(sign * s, a) for s, a in addends(right)]
    return [(1, t)]


# ---------------------------------------------------------------------------
# Polynomial expansion

Poly = Dict[Tuple[str, ...], Fraction]


def _padd(p: Poly, q: Poly, k: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, Fraction(0)) + k * c
    return {m: c for m, c in out.items() if c != 0}


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return {m: c for m, c in out.items() if c != 0}


def _constant(p: Poly) -> Optional[Fraction]:
    if not p:
        return Fraction(0)
    if set(p) == {()}:
        return p[()]
    return None


def expand(t: Term) -> Poly:
    """Multivariate polynomial of ``t`` with exact coefficients.

    Raises DivisionByZeroError for a zero divisor, NonLinearError for a
    non-constant divisor or a square root that is not a rational constant.
    """
    if isinstance(t, Num):
        return {(): t.value} if t.value else {}
    if isinstance(t, Var):
        return {(t.name,): Fraction(1)}
    s = t.symbol
    if s == "pos":
        return expand(t.args[0])
    if s == "neg":
        return {m: -c for m, c in expand(t.args[0]).items()}
    if s == "sqrt":
        c = _constant(expand(t.args[0]))
        if c is None:
            raise NonLinearError(f"square root of a variable term in {print_term(t)}")
        r = _rational_sqrt(c)
        if r is UNDEFINED:
            raise NonLinearError(f"{print_term(t)} is not a rational constant")
        return {(): r} if r else {}
    p, q = expand(t.args[0]), expand(t.args[1])
    if s == "+":
        return _padd(p, q)
    if s == "-":
        return _padd(p, q, -1)
    if s == "*":
        return _pmul(p, q)
    c = _constant(q)
    if c is None:
        raise NonLinearError(f"division by a variable term in {print_term(t)}")
    if c == 0:
        raise DivisionByZeroError(f"division by zero in {print_term(t)}")
    return {m: v / c for m, v in p.items()}


def _monomial_term(m: Tuple[str, ...], c: Fraction) -> Term:
    """|c|·m, with the sign left to the caller."""
    mag = abs(c)
    if not m:
        return Num(mag)
    body: Term = Var(m[0])
    for v in m[1:]:
        body = Op("*", (body, Var(v)))
    return body if mag == 1 else Op("*", (Num(mag), body))


def poly_to_term(p: Poly) -> Term:
    """Render a polynomial canonically: highest degree first, constant last."""
    if not p:
        return Num(0)
    keys = sorted(p, key=lambda m: (-len(m), m))
    out: Optional[Term] = None
    for m in keys:
        c = p[m]
        mono = _monomial_term(m, c)
        if out is None:
            if c > 0:
                out = mono
            elif isinstance(mono, Op) and mono.symbol == "*" and isinstance(mono.args[0], Num):
                out = Op("*", (Op("neg", (mono.args[0],)), mono.args[1]))
            else:
                out = Op("neg", (mono,))
        else:
            out = Op("+" if c > 0 else "-", (out, mono))
    return out


# ---------------------------------------------------------------------------
# Linear normal form and solution sets


@dataclass(frozen=True)
class LinearNormalForm:
    """``coefficient·variable + constant = 0`` with a non-negative leading part."""

    variable: Optional[str]
    coefficient: Fraction
    constant: Fraction

    @property
    def degenerate(self) -> bool:
        return self.coefficient == 0

    def to_equation(self) -> Equation:
        p: Poly = {}
        if self.coefficient and self.variable:
            p[(self.variable,)] = self.coefficient
        if self.constant:
            p[()] = self.constant
        return Equation(poly_to_term(p), Num(0))

    def __str__(self):
        return str(self.to_equation())


def normalize_linear(e: Equation) -> LinearNormalForm:
    p = _padd(expand(e.lhs), expand(e.rhs), -1)
    if any(len(m) > 1 for m in p):
        raise NonLinearError(f"{e} is not linear")
    live = sorted({m[0] for m in p if m})
    if len(live) > 1:
        raise MultiVariableError(f"{e} has variables {', '.join(live)}")
    if live:
        var: Optional[str] = live[0]
    else:
        syntactic = sorted(variables(e))
        var = syntactic[0] if len(syntactic) == 1 else None
    c = p.get((var,), Fraction(0)) if var else Fraction(0)
    d = p.get((), Fraction(0))
    if c < 0 or (c == 0 and d < 0):
        c, d = -c, -d
    return LinearNormalForm(var, c, d)


@dataclass(frozen=True)
class SolutionSet:
    kind: str  # "empty" | "single" | "all"
    value: Optional[Fraction] = None

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def all(cls):
        return cls("all")

    @classmethod
    def single(cls, value) -> "SolutionSet":
        return cls("single", Fraction(value))

    def __str__(self):
        if self.kind == "empty":
            return "∅"
        if self.kind == "all":
            return "all"
        return "{" + _fmt_signed(self.value) + "}"

    def to_json(self):
        if self.kind == "single":
            return {"kind": "single", "value": _fmt_signed(self.value)}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, d) -> "SolutionSet":
        if d["kind"] == "single":
            return cls.single(Fraction(d["value"]))
        return cls(d["kind"])


def _fmt_signed(q: Fraction) -> str:
    return ("-" if q < 0 else "") + _fmt_num(abs(q))


def solution_set(e: Equation) -> SolutionSet:
    nf = normalize_linear(e)
    if nf.degenerate:
        return SolutionSet.all() if nf.constant == 0 else SolutionSet.empty()
    return SolutionSet.single(-nf.constant / nf.coefficient)


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Op):
        for a in t.args:
            yield from iter_subterms(a)
