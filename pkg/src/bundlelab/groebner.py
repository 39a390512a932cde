"""Buchberger's algorithm (degrevlex, normal strategy, Gebauer-Moeller criteria).

Consumers: the projective emptiness test (the common zero locus of a list of
forms is empty iff the initial ideal contains a pure power of every variable)
and the zero-dimensional quotient count used as a Bezout fiber oracle.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from bundlelab.errors import GroebnerLimitError
from bundlelab.poly import (
    GradedRing,
    Monomial,
    Polynomial,
    degrevlex_key,
    mono_divides,
    mono_lcm,
)

log = logging.getLogger(__name__)

MAX_BASIS = 5000
MAX_DEGREE = 64
INFINITE = math.inf

_key = lru_cache(maxsize=1 << 16)(degrevlex_key)


def _lm(p: dict) -> Monomial:
    return max(p, key=_key)


def _monic(p: dict) -> dict:
    c = p[_lm(p)]
    if c == 1:
        return p
    return {m: v / c for m, v in p.items()}


def _sub_mul(f: dict, c: Fraction, shift: Monomial, g: dict) -> None:
    """f -= c * x^shift * g, in place."""
    for m, v in g.items():
        mm = tuple(a + b for a, b in zip(m, shift))
        w = f.get(mm, 0) - c * v
        if w:
            f[mm] = w
        else:
            del f[mm]


def _reduce(f: dict, reducers: Sequence[tuple[Monomial, dict]]) -> dict:
    """Full normal form of f by monic reducers given as (leading monomial, poly)."""
    f = dict(f)
    rem: dict = {}
    while f:
        m = _lm(f)
        c = f[m]
        for lm, g in reducers:
            if mono_divides(lm, m):
                _sub_mul(f, c, tuple(a - b for a, b in zip(m, lm)), g)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _s_poly(f: dict, lf: Monomial, g: dict, lg: Monomial) -> dict:
    lcm = mono_lcm(lf, lg)
    s = {}
    _sub_mul(s, Fraction(-1), tuple(a - b for a, b in zip(lcm, lf)), f)
    _sub_mul(s, Fraction(1), tuple(a - b for a, b in zip(lcm, lg)), g)
    return s


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


@dataclass(frozen=True)
class GroebnerBasis:
    ring: GradedRing
    elements: tuple[Polynomial, ...]
    order: str = "degrevlex"

    @property
    def leading_monomials(self) -> list[Monomial]:
        return [_lm(p.terms) for p in self.elements]

    def is_unit_ideal(self) -> bool:
        return any(sum(m) == 0 for m in self.leading_monomials)

    def reducers(self) -> list[tuple[Monomial, dict]]:
        return [(_lm(p.terms), p.terms) for p in self.elements]

    def __str__(self):
        return "{" + ", ".join(str(p) for p in self.elements) + "}"


def buchberger(polys: Sequence[Polynomial], ring: GradedRing | None = None, *,
               max_basis: int = MAX_BASIS, max_degree: int = MAX_DEGREE) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``polys``."""
    if ring is None:
        if not polys:
            raise ValueError("ring is required for an empty generator list")
        ring = polys[0].ring
    basis: list[dict] = []
    lms: list[Monomial] = []
    active: list[int] = []
    pairs: list[tuple[int, int]] = []

    def update(h: int) -> None:
        nonlocal active, pairs
        lh = lms[h]
        cands = [(h, g) for g in active]
        kept = []
        while cands:
            _, g1 = cands.pop(0)
            l1 = mono_lcm(lh, lms[g1])
            if _coprime(lh, lms[g1]) or not any(
                mono_divides(mono_lcm(lh, lms[g2]), l1) for _, g2 in itertools.chain(cands, kept)
            ):
                kept.append((h, g1))
        new = [(g, h) for _, g in kept if not _coprime(lh, lms[g])]
        survivors = []
        for g1, g2 in pairs:
            l12 = mono_lcm(lms[g1], lms[g2])
            if (not mono_divides(lh, l12) or mono_lcm(lms[g1], lh) == l12
                    or mono_lcm(lh, lms[g2]) == l12):
                survivors.append((g1, g2))
        pairs = survivors + new
        active = [g for g in active if not mono_divides(lh, lms[g])] + [h]

    def add(p: dict) -> None:
        p = _monic(p)
        basis.append(p)
        lms.append(_lm(p))
        if len(basis) > max_basis:
            raise GroebnerLimitError(f"Groebner basis exceeded {max_basis} elements")
        if max(sum(m) for m in p) > max_degree:
            raise GroebnerLimitError(f"Groebner basis element exceeded degree {max_degree}")
        update(len(basis) - 1)

    for p in polys:
        if p.terms:
            add(dict(p.terms))

    while pairs:
        best = min(pairs, key=lambda ij: (
            sum(mono_lcm(lms[ij[0]], lms[ij[1]])), _key(mono_lcm(lms[ij[0]], lms[ij[1]])), ij))
        pairs.remove(best)
        i, j = best
        s = _s_poly(basis[i], lms[i], basis[j], lms[j])
        h = _reduce(s, [(lms[g], basis[g]) for g in active])
        if h:
            add(h)

    # inputs are added unreduced, so an earlier leading monomial can still be
    # a multiple of a later one; keep a minimal basis, then inter-reduce tails
    minimal = []
    for g in active:
        lg = lms[g]
        if any(mono_divides(lms[h], lg) and (lms[h] != lg or h < g) for h in active if h != g):
            continue
        minimal.append((lg, basis[g]))
    reduced = []
    for k, (lm, p) in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        tail = _reduce({m: c for m, c in p.items() if m != lm}, others)
        tail[lm] = p[lm]
        reduced.append(_monic(tail))
    reduced.sort(key=lambda p: _key(_lm(p)), reverse=True)
    return GroebnerBasis(ring, tuple(Polynomial(ring, p) for p in reduced))


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of f on division by gb; zero iff f lies in the ideal."""
    if f.ring != gb.ring:
        raise ValueError("polynomial and basis live in different rings")
    return Polynomial(gb.ring, _reduce(f.terms, gb.reducers()))


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    return Polynomial(f.ring, _s_poly(f.terms, _lm(f.terms), g.terms, _lm(g.terms)))


def is_groebner(gb: GroebnerBasis) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    red = gb.reducers()
    for (l1, p1), (l2, p2) in itertools.combinations(red, 2):
        if _reduce(_s_poly(p1, l1, p2, l2), red):
            return False
    return True


def is_reduced(gb: GroebnerBasis) -> bool:
    red = gb.reducers()
    for k, (lm, p) in enumerate(red):
        if p[lm] != 1:
            return False
        for k2, (lm2, _) in enumerate(red):
            if k2 != k and any(mono_divides(lm2, m) for m in p):
                return False
    return True


def _pure_powers(gb: GroebnerBasis) -> dict[int, int]:
    """Smallest pure power exponent of each variable among leading monomials."""
    out: dict[int, int] = {}
    for m in gb.leading_monomials:
        support = [i for i, e in enumerate(m) if e]
        if not support:
            return {i: 0 for i in range(gb.ring.nvars)}
        if len(support) == 1:
            i = support[0]
            out[i] = min(out.get(i, m[i]), m[i])
    return out


def projective_zero_locus_empty(forms: Sequence[Polynomial], ring: GradedRing | None = None,
                                **limits) -> bool:
    """True iff the forms have no common zero in P^n (over the algebraic closure).

    An empty list is the degenerate case: the locus is all of P^n.
    """
    if not forms:
        log.warning("empty form list: zero locus is all of P^n")
        return False
    gb = buchberger(forms, ring, **limits)
    return len(_pure_powers(gb)) == gb.ring.nvars


def missing_pure_powers(forms: Sequence[Polynomial], **limits) -> list[int]:
    """Variables with no pure power in the initial ideal (witness of a common zero)."""
    gb = buchberger(forms, **limits)
    pp = _pure_powers(gb)
    return [i for i in range(gb.ring.nvars) if i not in pp]


def standard_monomials(gb: GroebnerBasis) -> list[Monomial] | None:
    """Monomials outside the initial ideal, or None when there are infinitely many."""
    pp = _pure_powers(gb)
    if len(pp) < gb.ring.nvars:
        return None
    lms = gb.leading_monomials
    box = [range(pp[i]) for i in range(gb.ring.nvars)]
    return [m for m in itertools.product(*box) if not any(mono_divides(l, m) for l in lms)]


def affine_quotient_dimension(polys: Sequence[Polynomial], ring: GradedRing | None = None,
                              **limits) -> int | float:
    """dim_Q Q[x]/I, or ``INFINITE`` when the quotient is not finite-dimensional."""
    gb = buchberger(polys, ring, **limits)
    std = standard_monomials(gb)
    return INFINITE if std is None else len(std)
