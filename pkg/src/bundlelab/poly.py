"""Graded polynomial ring Q[x0..xn] with degrevlex order, forms, and text I/O.

Monomials are plain exponent tuples.  A :class:`Polynomial` may be
inhomogeneous (the affine fiber oracle needs that); a :class:`Form` is
homogeneous and always knows its degree, including when it is zero.

Text grammar::

    form := ['-'] term (('+'|'-') term)* ['@' integer]
    term := [integer ('/' integer)?] ('*'? var)*
    var  := 'x' index ('^' exponent)?

The zero form must be written ``0@d``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from bundlelab.errors import NonHomogeneous, ParseError
from bundlelab.exact import Matrix

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class GradedRing:
    """Q[x0, ..., xn], the homogeneous coordinate ring of P^n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"projective dimension must be >= 1, got {self.n}")

    @property
    def nvars(self) -> int:
        return self.n + 1

    def var(self, i: int) -> Form:
        if not 0 <= i <= self.n:
            raise ValueError(f"no variable x{i} in a ring with {self.nvars} variables")
        e = [0] * self.nvars
        e[i] = 1
        return Form(self, {tuple(e): Fraction(1)}, 1)

    def one(self) -> Form:
        return Form(self, {(0,) * self.nvars: Fraction(1)}, 0)

    def zero(self, degree: int) -> Form:
        return Form(self, {}, degree)

    def constant(self, c) -> Form:
        c = Fraction(c)
        return Form(self, {(0,) * self.nvars: c} if c else {}, 0)

    def monomial(self, exps: Monomial, coeff=1) -> Form:
        return Form(self, {tuple(exps): Fraction(coeff)}, sum(exps))


def degrevlex_key(m: Monomial) -> tuple:
    """Sort key: larger key means larger monomial (x0 > x1 > ... > xn)."""
    return (sum(m), tuple(-e for e in reversed(m)))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _basis(nvars: int, d: int) -> tuple[Monomial, ...]:
    if d < 0:
        return ()

    def gen(k, rest):
        if k == 1:
            yield (rest,)
            return
        for e in range(rest, -1, -1):
            for tail in gen(k - 1, rest - e):
                yield (e,) + tail

    return tuple(sorted(gen(nvars, d), key=degrevlex_key, reverse=True))


@lru_cache(maxsize=None)
def _basis_index(nvars: int, d: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(_basis(nvars, d))}


def monomial_basis(ring: GradedRing, d: int) -> list[Monomial]:
    """All degree-d monomials in descending degrevlex order (empty for d < 0)."""
    return list(_basis(ring.nvars, d))


def basis_index(ring: GradedRing, d: int) -> dict[Monomial, int]:
    return _basis_index(ring.nvars, d)


def graded_dim(n: int, d: int) -> int:
    """dim S_d = C(n+d, n), zero for negative d."""
    return comb(n + d, n) if d >= 0 else 0


class Polynomial:
    """Polynomial with rational coefficients; terms map monomials to nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms: Mapping[Monomial, Fraction]):
        self.ring = ring
        self.terms = {tuple(m): Fraction(c) for m, c in terms.items() if c}

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def _combine(self, other, sign):
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + sign * c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return terms

    def __add__(self, other):
        return Polynomial(self.ring, self._combine(other, 1))

    def __sub__(self, other):
        return Polynomial(self.ring, self._combine(other, -1))

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def _product_terms(self, other):
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return terms

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(self.ring, self._product_terms(other))
        c = Fraction(other)
        return Polynomial(self.ring, {m: c * v for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __str__(self):
        return format_terms(self.sorted_terms()) if self.terms else "0"

    def __repr__(self):
        return f"Polynomial({self})"

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v *= Fraction(x) ** e
            total += v
        return total


class Form(Polynomial):
    """Homogeneous polynomial of a fixed degree (the zero form keeps its degree)."""

    __slots__ = ("degree",)

    def __init__(self, ring: GradedRing, terms: Mapping[Monomial, Fraction], degree: int):
        super().__init__(ring, terms)
        for m in self.terms:
            if sum(m) != degree:
                raise NonHomogeneous(f"term of degree {sum(m)} in a form of degree {degree}")
        self.degree = degree

    @classmethod
    def from_polynomial(cls, p: Polynomial, degree: int | None = None) -> Form:
        degs = sorted({sum(m) for m in p.terms})
        if len(degs) > 1:
            raise NonHomogeneous(f"polynomial mixes degrees {degs[0]} and {degs[1]}", degs[:2])
        if not degs and degree is None:
            raise ValueError("degree of the zero polynomial must be given")
        return cls(p.ring, p.terms, degs[0] if degs else degree)

    def __add__(self, other):
        if isinstance(other, Form) and other.degree == self.degree:
            return Form(self.ring, self._combine(other, 1), self.degree)
        return Polynomial.__add__(self, other)

    def __sub__(self, other):
        if isinstance(other, Form) and other.degree == self.degree:
            return Form(self.ring, self._combine(other, -1), self.degree)
        return Polynomial.__sub__(self, other)

    def __neg__(self):
        return Form(self.ring, {m: -c for m, c in self.terms.items()}, self.degree)

    def __mul__(self, other):
        if isinstance(other, Form):
            return Form(self.ring, self._product_terms(other), self.degree + other.degree)
        if isinstance(other, Polynomial):
            return Polynomial.__mul__(self, other)
        c = Fraction(other)
        return Form(self.ring, {m: c * v for m, v in self.terms.items()}, self.degree)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Form:
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.ring == other.ring and self.degree == other.degree and self.terms == other.terms
        return Polynomial.__eq__(self, other)

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.terms.items())))

    def __str__(self):
        return format_terms(self.sorted_terms()) if self.terms else f"0@{self.degree}"

    def __repr__(self):
        return f"Form({self})"

    def coefficient_vector(self) -> list[Fraction]:
        """Coefficients against ``monomial_basis(ring, degree)``."""
        idx = basis_index(self.ring, self.degree)
        v = [Fraction(0)] * len(idx)
        for m, c in self.terms.items():
            v[idx[m]] = c
        return v


def multiplication_matrix(g: Form, d: int) -> Matrix:
    """Matrix of S_d -> S_{d + deg g}, f -> g*f, in canonical monomial bases."""
    ring = g.ring
    src = monomial_basis(ring, d)
    tgt = basis_index(ring, d + g.degree)
    cols = []
    for mu in src:
        col = [Fraction(0)] * len(tgt)
        for m, c in g.terms.items():
            col[tgt[mono_mul(m, mu)]] += c
        cols.append(col)
    if not src:
        return Matrix.zeros(len(tgt), 0)
    return Matrix(cols, len(tgt)).transpose()


# --- printing -------------------------------------------------------------

def _format_monomial(m: Monomial) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def format_terms(terms: Iterable[tuple[Monomial, Fraction]]) -> str:
    out = []
    for k, (m, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        body = str(abs(c))
        mono = _format_monomial(m)
        if mono:
            body = f"{body}*{mono}"
        if k == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# --- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x)|(?P<op>[-+*/^@]))")


def _tokens(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        kind = mt.lastgroup
        start = mt.start(kind)
        toks.append((kind, mt.group(kind), start))
        pos = mt.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: GradedRing):
        self.text = text
        self.ring = ring
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_int(self, what: str) -> int:
        kind, val, pos = self.take()
        if kind != "int":
            raise ParseError(f"expected {what}", pos)
        return int(val)

    def parse(self):
        terms: dict[Monomial, Fraction] = {}
        raw_degrees: list[int] = []
        sign = 1
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        while True:
            coeff, mono = self.term()
            raw_degrees.append(sum(mono))
            c = terms.get(mono, 0) + sign * coeff
            if c:
                terms[mono] = c
            else:
                terms.pop(mono, None)
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
                continue
            break
        annotation = None
        kind, val, pos = self.peek()
        if kind == "op" and val == "@":
            self.take()
            neg = False
            k2, v2, p2 = self.peek()
            if k2 == "op" and v2 == "-":
                self.take()
                neg = True
            annotation = self.expect_int("degree after '@'")
            if neg:
                annotation = -annotation
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return terms, annotation

    def term(self):
        kind, val, pos = self.peek()
        coeff = Fraction(1)
        have_coeff = False
        if kind == "int":
            self.take()
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                _, _, dpos = self.peek()
                den = self.expect_int("denominator")
                if den == 0:
                    raise ParseError("zero denominator", dpos)
                coeff = Fraction(num, den)
            else:
                coeff = Fraction(num)
            have_coeff = True
        exps = [0] * self.ring.nvars
        nvars_seen = 0
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                nxt = self.toks[self.i + 1]
                if nxt[0] != "var":
                    raise ParseError("expected variable after '*'", nxt[2])
                self.take()
                continue
            if kind != "var":
                break
            self.take()
            ipos = self.peek()[2]
            idx = self.expect_int("variable index")
            if idx >= self.ring.nvars:
                raise ParseError(
                    f"unknown variable x{idx} (ring has x0..x{self.ring.n})", ipos)
            e = 1
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "^":
                self.take()
                e = self.expect_int("exponent")
            exps[idx] += e
            nvars_seen += 1
        if not have_coeff and not nvars_seen:
            raise ParseError("expected a term", pos)
        return coeff, tuple(exps)


def parse_polynomial(text: str, ring: GradedRing) -> Polynomial:
    """Parse any polynomial (homogeneity not required)."""
    terms, annotation = _Parser(text, ring).parse()
    if annotation is not None and terms:
        raise ParseError("degree annotation is only meaningful on forms", text.index("@"))
    return Polynomial(ring, terms)


def parse_form(text: str, ring: GradedRing) -> Form:
    """Parse a homogeneous form; the zero form needs an explicit ``0@d``."""
    terms, annotation = _Parser(text, ring).parse()
    degs = sorted({sum(m) for m in terms})
    if len(degs) > 1:
        raise NonHomogeneous(
            f"non-homogeneous input: terms of degree {degs[0]} and {degs[1]}", degs[:2])
    if not degs:
        if annotation is None:
            raise ParseError("zero form has ambiguous degree; write it as 0@d", 0)
        return Form(ring, {}, annotation)
    if annotation is not None and annotation != degs[0]:
        raise NonHomogeneous(
            f"annotated degree {annotation} but terms have degree {degs[0]}",
            [annotation, degs[0]])
    return Form(ring, terms, degs[0])
