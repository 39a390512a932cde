from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from bundlelab.errors import NonHomogeneous, ParseError
from bundlelab.exact import rank
from bundlelab.poly import (
    Form,
    GradedRing,
    degrevlex_key,
    graded_dim,
    monomial_basis,
    multiplication_matrix,
    parse_form,
    parse_polynomial,
)

R2 = GradedRing(2)


def test_parse_examples():
    f = parse_form("x0^2 + 2*x1*x2", R2)
    assert f.degree == 2 and len(f.terms) == 2
    with pytest.raises(ParseError):
        parse_form("x0 - x0", R2)
    with pytest.raises(NonHomogeneous) as info:
        parse_form("x0 + x1*x2", R2)
    assert info.value.degrees == [1, 2]


def test_zero_form_annotation():
    z = parse_form("0@3", R2)
    assert z.degree == 3 and not z.terms
    assert str(z) == "0@3"
    assert parse_form("0@-2", R2).degree == -2
    assert parse_form("x0 - x0 @1", R2).degree == 1


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as info:
        parse_form("x0 + + x1", R2)
    assert info.value.position == 5
    with pytest.raises(ParseError):
        parse_form("x3", R2)
    with pytest.raises(ParseError):
        parse_form("x0 +", R2)
    with pytest.raises(ParseError):
        parse_form("1/0*x0", R2)


def test_printer_canonical():
    f = parse_form("2*x1*x2 - 1/3*x0*x1 + x0^2", R2)
    assert str(f) == "1*x0^2 - 1/3*x0*x1 + 2*x1*x2"
    assert str(parse_form("-x2", R2)) == "-1*x2"
    assert str(parse_form("7", R2)) == "7"


def test_degrevlex_order():
    # x0^2 > x0x1 > x1^2 > x0x2 > x1x2 > x2^2
    assert monomial_basis(R2, 2) == [(2, 0, 0), (1, 1, 0), (0, 2, 0),
                                     (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    assert degrevlex_key((0, 0, 3)) < degrevlex_key((1, 1, 1))


def test_monomial_basis_examples():
    assert len(monomial_basis(R2, 2)) == 6
    assert monomial_basis(R2, 0) == [(0, 0, 0)]
    assert monomial_basis(R2, -1) == []


@pytest.mark.parametrize("n", range(1, 5))
def test_monomial_basis_counts(n):
    ring = GradedRing(n)
    for d in range(0, 9):
        direct = [m for m in _all_exponents(n + 1, d)]
        assert sorted(monomial_basis(ring, d)) == sorted(direct)
        assert len(monomial_basis(ring, d)) == comb(n + d, n) == graded_dim(n, d)


def _all_exponents(k, d):
    if k == 1:
        yield (d,)
        return
    for e in range(d + 1):
        for rest in _all_exponents(k - 1, d - e):
            yield (e,) + rest


def test_multiplication_matrix_examples():
    R1 = GradedRing(1)
    m = multiplication_matrix(parse_form("x0", R1), 1)
    assert m.shape == (3, 2) and rank(m) == 2
    z = multiplication_matrix(parse_form("0@1", R1), 2)
    assert z.shape == (4, 3) and z.is_zero()
    m = multiplication_matrix(parse_form("x0 + x1", R1), 0)
    assert m.shape == (2, 1) and m.column(0) == (1, 1)


@st.composite
def forms(draw, ring=R2, max_degree=3):
    d = draw(st.integers(0, max_degree))
    mons = monomial_basis(ring, d)
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(mons), max_size=len(mons)))
    return Form(ring, {m: Fraction(c) for m, c in zip(mons, coeffs) if c}, d)


@given(forms(), forms(), st.integers(0, 2))
def test_multiplication_matrix_composes(g, h, d):
    lhs = multiplication_matrix(g * h, d)
    rhs = multiplication_matrix(g, d + h.degree) @ multiplication_matrix(h, d)
    assert lhs == rhs


@given(forms(), st.integers(0, 3))
def test_multiplication_is_injective(g, d):
    if not g.terms:
        return
    m = multiplication_matrix(g, d)
    assert rank(m) == m.ncols


@given(forms())
def test_print_parse_roundtrip(f):
    assert parse_form(str(f), R2) == f


@given(forms(), forms())
def test_ring_axioms(f, g):
    assert f * g == g * f
    if f.degree == g.degree:
        assert (f + g) - g == f


def test_polynomial_parse_inhomogeneous():
    p = parse_polynomial("x0^2 - 1", GradedRing(1))
    assert not p.is_homogeneous()
    assert p.evaluate([1, 5]) == 0
