import logging
from fractions import Fraction

import numpy as np
import pytest

from bundlelab.errors import GroebnerLimitError
from bundlelab.exact import rank_rows
from bundlelab.groebner import (
    INFINITE,
    affine_quotient_dimension,
    buchberger,
    is_groebner,
    is_reduced,
    missing_pure_powers,
    normal_form,
    projective_zero_locus_empty,
)
from bundlelab.poly import Form, GradedRing, monomial_basis, mono_mul, basis_index, parse_form, parse_polynomial

R1, R2 = GradedRing(1), GradedRing(2)


def P(ring, *texts):
    return [parse_polynomial(t, ring) for t in texts]


def strs(gb):
    return [str(p) for p in gb.elements]


def test_buchberger_examples():
    assert strs(buchberger(P(R2, "x0", "x1"))) == ["1*x0", "1*x1"]
    assert strs(buchberger(P(R1, "x0^2 - x1^2", "x0^2 + x1^2"))) == ["1*x0^2", "1*x1^2"]
    gb = buchberger(P(R2, "x0*x1 - x2^2", "x1^2"))
    assert is_groebner(gb) and is_reduced(gb)
    assert strs(gb) == ["1*x2^4", "1*x1*x2^2", "1*x0*x1 - 1*x2^2", "1*x1^2"]


def test_normal_form_examples():
    gb = buchberger(P(R2, "x0"))
    assert normal_form(P(R2, "x0")[0], gb).is_zero()
    gb = buchberger(P(R2, "x0", "x1"))
    assert str(normal_form(P(R2, "x2")[0], gb)) == "1*x2"
    gb = buchberger(P(R1, "x0^2 + x1^2"))
    assert normal_form(P(R1, "x0^2*x1 + x1^3")[0], gb).is_zero()


def test_unit_ideal():
    gb = buchberger(P(R1, "x0 - 1", "x0"))
    assert strs(gb) == ["1"] and gb.is_unit_ideal()


def test_emptiness_examples(caplog):
    F = lambda *t: [parse_form(s, R2) for s in t]
    assert projective_zero_locus_empty(F("x0", "x1", "x2"))
    assert not projective_zero_locus_empty(F("x0", "x1"))
    assert missing_pure_powers(F("x0", "x1")) == [2]
    assert projective_zero_locus_empty(F("x0^2", "x1^2", "x2^2"))
    with caplog.at_level(logging.WARNING):
        assert not projective_zero_locus_empty([], R2)
    assert "empty form list" in caplog.text


def test_quotient_dimension_examples():
    assert affine_quotient_dimension(P(R1, "x0 - 1", "x1")) == 1
    assert affine_quotient_dimension(P(R1, "x0^2 - 1", "x1^3 - 2")) == 6
    assert affine_quotient_dimension(P(R1, "x0")) == INFINITE


def test_limits_fail_loudly():
    with pytest.raises(GroebnerLimitError):
        buchberger(P(R2, "x0*x1 - x2^2", "x1^2"), max_basis=2)
    with pytest.raises(GroebnerLimitError):
        buchberger(P(R2, "x0*x1 - x2^2", "x1^2"), max_degree=3)


# --- random instances -----------------------------------------------------------

def random_forms(rng, ring, count, max_degree=2):
    out = []
    while len(out) < count:
        d = int(rng.integers(1, max_degree + 1))
        mons = monomial_basis(ring, d)
        coeffs = rng.integers(-2, 3, size=len(mons)) * (rng.random(len(mons)) < 0.5)
        terms = {m: Fraction(int(c)) for m, c in zip(mons, coeffs) if c}
        if terms:
            out.append(Form(ring, terms, d))
    return out


def macaulay_empty(forms, ring):
    """Independent emptiness oracle: I_N = S_N for N = (n+1)(dmax-1)+1."""
    dmax = max(f.degree for f in forms)
    N = (ring.n + 1) * (dmax - 1) + 1
    idx = basis_index(ring, N)
    rows = []
    for f in forms:
        for mu in monomial_basis(ring, N - f.degree):
            v = [0] * len(idx)
            for m, c in f.terms.items():
                v[idx[mono_mul(m, mu)]] += c
            rows.append(v)
    return rank_rows(rows, len(idx)) == len(idx)


INSTANCES = []
_rng = np.random.default_rng(2024)
for _ in range(60):
    _ring = GradedRing(int(_rng.integers(1, 3)))
    INSTANCES.append(random_forms(_rng, _ring, int(_rng.integers(2, 5))))


def test_random_instances_are_not_all_alike():
    verdicts = {projective_zero_locus_empty(fs) for fs in INSTANCES}
    assert verdicts == {True, False}


@pytest.mark.parametrize("forms", INSTANCES, ids=[str(i) for i in range(len(INSTANCES))])
def test_random_instance(forms):
    ring = forms[0].ring
    gb = buchberger(forms)
    assert is_groebner(gb) and is_reduced(gb)
    empty = projective_zero_locus_empty(forms)
    # cross-oracles: affine quotient finiteness and Macaulay-matrix saturation
    assert empty == (affine_quotient_dimension(forms) != INFINITE)
    assert empty == macaulay_empty(forms, ring)
    # generator order does not matter
    assert strs(buchberger(list(reversed(forms)))) == strs(gb)
    # every generator reduces to zero
    assert all(normal_form(f, gb).is_zero() for f in forms)


@pytest.mark.parametrize("k", range(10))
def test_emptiness_invariant_under_linear_recombination(k):
    rng = np.random.default_rng(k)
    ring = GradedRing(2)
    d = 2
    forms = []
    while len(forms) < 3:
        forms = random_forms(rng, ring, 3, max_degree=1)
        forms = [f for f in forms if f.degree == 1] + [f * f for f in forms if f.degree == 1]
        forms = [f for f in forms if f.degree == d][:3]
    while True:
        A = rng.integers(-2, 3, size=(3, 3))
        if round(np.linalg.det(A)) != 0:
            break
    mixed = [sum((forms[i] * ring.constant(int(A[i, j])) for i in range(3)), ring.zero(d))
             for j in range(3)]
    assert projective_zero_locus_empty(mixed) == projective_zero_locus_empty(forms)
