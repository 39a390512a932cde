"""Homogeneous unimodular rows.

A row (f_0, ..., f_r) of forms in x_0..x_n is unimodular over the quadric
ring Q[x, y]/(sum x_i y_i - 1) exactly when the f_i have no common zero in P^n.
That ring is never built: every verdict here is decided in Q[x] and only
interpreted over the quadric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Sequence

import numpy as np

from bundlelab.errors import (
    BudgetExhausted,
    InfiniteFiber,
    NotUnimodular,
    PreconditionError,
    RowLengthMismatch,
    TooFewForms,
    ValidationError,
)
from bundlelab.graded import GradedMap
from bundlelab.groebner import INFINITE, affine_quotient_dimension, projective_zero_locus_empty
from bundlelab.poly import Form, GradedRing, Polynomial, parse_form
from bundlelab.sheaf import BundlePresentation, validate_presentation

DEFAULT_BUDGET = 200


@dataclass(frozen=True)
class HomogeneousRow:
    ring: GradedRing
    forms: tuple[Form, ...]

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        if len(self.forms) < 2:
            raise ValidationError(f"a row needs at least 2 forms, got {len(self.forms)}")
        for i, f in enumerate(self.forms):
            if f.ring != self.ring:
                raise ValidationError(f"form {i} lives in a different ring")
            if not f.terms:
                raise ValidationError(f"form {i} is zero")
            if f.degree < 1:
                raise ValidationError(f"form {i} has degree {f.degree}; degrees must be >= 1")

    @classmethod
    def parse(cls, n: int, texts: Sequence[str]) -> HomogeneousRow:
        ring = GradedRing(n)
        return cls(ring, [parse_form(t, ring) for t in texts])

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(f.degree for f in self.forms)

    def __len__(self) -> int:
        return len(self.forms)

    def to_dict(self) -> dict:
        return {"n": self.n, "forms": [str(f) for f in self.forms]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> HomogeneousRow:
        try:
            return cls.parse(int(doc["n"]), [str(s) for s in doc["forms"]])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed row document: {exc}") from exc


def is_unimodular(row: HomogeneousRow) -> bool:
    return projective_zero_locus_empty(list(row.forms), row.ring)


@dataclass(frozen=True)
class CompletabilityVerdict:
    status: str  # Completable | NotCompletable | NotUnimodular
    degree_product: int
    n_factorial: int
    citation: str
    n: int

    def __str__(self) -> str:
        if self.status == "NotUnimodular":
            return f"NotUnimodular (the forms share a zero in P^{self.n})"
        rel = "divides" if self.status == "Completable" else "does not divide"
        return f"{self.status} ({self.n}! {rel} {self.degree_product}) [{self.citation}]"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "degree_product": self.degree_product,
            "n_factorial": self.n_factorial,
            "citation": self.citation,
        }


def _is_monomial_row(row: HomogeneousRow) -> bool:
    """Each form a pure power of a different variable, all variables used."""
    seen = set()
    for f in row.forms:
        if len(f.terms) != 1:
            return False
        (m,) = f.terms
        support = [i for i, e in enumerate(m) if e]
        if len(support) != 1:
            return False
        seen.add(support[0])
    return len(seen) == row.ring.nvars == len(row.forms)


def completability(row: HomogeneousRow) -> CompletabilityVerdict:
    """n! criterion for a unimodular row of length n + 1 over the quadric ring."""
    n = row.n
    if len(row) != n + 1:
        raise RowLengthMismatch(f"completability needs n + 1 = {n + 1} forms, got {len(row)}")
    dprod = prod(row.degrees)
    nf = factorial(n)
    if not is_unimodular(row):
        return CompletabilityVerdict("NotUnimodular", dprod, nf, "", n)
    divides = dprod % nf == 0
    if _is_monomial_row(row):
        cite = "Suslin" if divides else "Swan-Towber"
    else:
        cite = "Mohan Kumar" if divides else "Swan"
    return CompletabilityVerdict("Completable" if divides else "NotCompletable", dprod, nf, cite, n)


def _require_square_unimodular(row: HomogeneousRow) -> None:
    if len(row) != row.n + 1:
        raise RowLengthMismatch(f"expected n + 1 = {row.n + 1} forms, got {len(row)}")
    if not is_unimodular(row):
        raise NotUnimodular("the forms share a zero in P^%d" % row.n)


def map_degree(row: HomogeneousRow) -> int:
    """Topological degree of the induced self-map of C^{n+1} minus the origin."""
    _require_square_unimodular(row)
    return prod(row.degrees)


def fiber_dimension(row: HomogeneousRow, point: Sequence) -> int:
    """Length of the fiber over ``point``: dim_Q Q[x]/(f_0 - a_0, ..., f_n - a_n)."""
    _require_square_unimodular(row)
    a = [Fraction(c) for c in point]
    if len(a) != len(row):
        raise ValidationError(f"point has {len(a)} coordinates, expected {len(row)}")
    if not any(a):
        raise ValidationError("the point must be nonzero")
    ring = row.ring
    polys = [Polynomial(ring, f.terms) - Polynomial(ring, ring.constant(c).terms)
             for f, c in zip(row.forms, a)]
    dim = affine_quotient_dimension(polys, ring)
    if dim == INFINITE:
        raise InfiniteFiber(f"fiber over {[str(c) for c in a]} is not finite")
    return dim


def row_bundle(row: HomogeneousRow) -> BundlePresentation:
    """Cokernel of O -> sum O(a_i) given by the column of forms."""
    n = row.n
    if len(row) < n + 1:
        raise TooFewForms(f"need at least n + 1 = {n + 1} forms for a bundle, got {len(row)}")
    if not is_unimodular(row):
        raise NotUnimodular(f"the forms share a zero in P^{n}")
    gmap = GradedMap(row.ring, [0], list(row.degrees), [[f] for f in row.forms])
    return validate_presentation(gmap)


# --- dropping a generator ----------------------------------------------------

def _drop(forms: Sequence[Form], ring: GradedRing) -> list[Form] | None:
    for i in range(len(forms) - 1, -1, -1):
        rest = list(forms[:i]) + list(forms[i + 1:])
        if projective_zero_locus_empty(rest, ring):
            return rest
    return None


def _small_rational(rng: np.random.Generator) -> Fraction:
    num = 0
    while num == 0:
        num = int(rng.integers(-5, 6))
    return Fraction(num, int(rng.integers(1, 6)))


def _random_linear(ring: GradedRing, rng: np.random.Generator) -> Form:
    while True:
        coeffs = rng.integers(-3, 4, size=ring.nvars)
        if coeffs.any():
            break
    g = ring.zero(1)
    for i, c in enumerate(coeffs):
        if c:
            g = g + ring.var(i) * ring.constant(int(c))
    return g


def reduce_generators(forms: Sequence[Form], seed: int, budget: int = DEFAULT_BUDGET) -> list[Form]:
    """Drop one form from a unimodular list of at least n + 2 forms.

    First every plain deletion is tried.  Then, for up to ``budget`` rounds,
    one elementary move f_k <- f_k + lambda * g^l * f_j is applied (g a random
    linear form, lambda a small random rational, l = deg f_k - deg f_j >= 0)
    and deletions are tried again.  Elementary moves keep the ideal, so the
    list stays unimodular throughout; generic choices eventually make a
    deletion possible.
    """
    forms = list(forms)
    if not forms:
        raise PreconditionError("no forms given")
    ring = forms[0].ring
    n = ring.n
    if len(forms) < n + 2:
        raise PreconditionError(f"need at least n + 2 = {n + 2} forms, got {len(forms)}")
    if not projective_zero_locus_empty(forms, ring):
        raise PreconditionError(f"the forms share a zero in P^{n}")
    out = _drop(forms, ring)
    if out is not None:
        return out
    rng = np.random.default_rng(seed)
    pairs = [(j, k) for k in range(len(forms)) for j in range(len(forms))
             if j != k and forms[j].degree <= forms[k].degree]
    if not pairs:
        raise PreconditionError("no pair of forms admits an elementary move")
    for _ in range(budget):
        j, k = pairs[int(rng.integers(len(pairs)))]
        lam = _small_rational(rng)
        g = _random_linear(ring, rng)
        l = forms[k].degree - forms[j].degree
        forms[k] = forms[k] + (g ** l) * forms[j] * ring.constant(lam)
        out = _drop(forms, ring)
        if out is not None:
            return out
    raise BudgetExhausted(f"no droppable form after {budget} randomized moves (seed {seed})")
