import numpy as np
import pytest

from bundlelab import sheaf as S
from bundlelab.errors import (
    BudgetExhausted,
    NotUnimodular,
    PreconditionError,
    RowLengthMismatch,
    TooFewForms,
    ValidationError,
)
from bundlelab.groebner import projective_zero_locus_empty
from bundlelab.poly import GradedRing, parse_form
from bundlelab.rows import (
    HomogeneousRow,
    completability,
    fiber_dimension,
    is_unimodular,
    map_degree,
    reduce_generators,
    row_bundle,
)

from corpus import SQUARE_ROWS, row
from rowgen import bezout_row, hard_tuple, random_point


def test_row_type_checks():
    with pytest.raises(ValidationError):
        row(2, ["x0"])
    with pytest.raises(ValidationError):
        HomogeneousRow(GradedRing(2), [parse_form("x0", GradedRing(2)), parse_form("3", GradedRing(2))])
    with pytest.raises(ValidationError):
        HomogeneousRow(GradedRing(2), [parse_form("x0", GradedRing(2)), parse_form("0@1", GradedRing(2))])
    r = row(2, ["x0^2", "x1", "x2^3"])
    assert r.degrees == (2, 1, 3)
    assert HomogeneousRow.from_dict(r.to_dict()) == r


def test_unimodular_examples():
    assert is_unimodular(row(2, ["x0^2", "x1^3", "x2^5"]))
    assert not is_unimodular(row(2, ["x0*x1", "x1*x2", "x0*x2"]))
    assert is_unimodular(row(2, ["x0^2 + x1*x2", "x1", "x2"]))


def test_completability_examples():
    v = completability(row(2, ["x0", "x1", "x2"]))
    assert str(v) == "NotCompletable (2! does not divide 1) [Swan-Towber]"
    v = completability(row(2, ["x0^2", "x1", "x2"]))
    assert (v.status, v.citation) == ("Completable", "Suslin")
    v = completability(row(2, ["x0^2 + x1*x2", "x1", "x2"]))
    assert (v.status, v.citation, v.degree_product) == ("Completable", "Mohan Kumar", 2)
    v = completability(row(2, ["x0 + x1", "x1", "x2"]))
    assert (v.status, v.citation) == ("NotCompletable", "Swan")
    assert completability(row(2, ["x0*x1", "x1*x2", "x0*x2"])).status == "NotUnimodular"
    with pytest.raises(RowLengthMismatch):
        completability(row(2, ["x0", "x1"]))


@pytest.mark.parametrize("seed", range(6))
def test_completability_invariant_under_permutation_and_recombination(seed):
    rng = np.random.default_rng(seed)
    n, forms, _ = list(SQUARE_ROWS.values())[seed]
    r = row(n, forms)
    base = completability(r).status
    perm = [forms[int(i)] for i in rng.permutation(len(forms))]
    assert completability(row(n, perm)).status == base
    # recombine forms of equal degree by an invertible constant matrix
    ring = r.ring
    fs = list(r.forms)
    by_deg = {}
    for i, f in enumerate(fs):
        by_deg.setdefault(f.degree, []).append(i)
    for d, idx in by_deg.items():
        k = len(idx)
        while True:
            A = rng.integers(-2, 3, size=(k, k))
            if round(np.linalg.det(A)) != 0:
                break
        mixed = [sum((fs[idx[i]] * ring.constant(int(A[i, j])) for i in range(k)), ring.zero(d))
                 for j in range(k)]
        for j, i in enumerate(idx):
            fs[i] = mixed[j]
    assert completability(HomogeneousRow(ring, fs)).status == base


def test_map_degree_examples():
    assert map_degree(row(2, ["x0", "x1", "x2"])) == 1
    assert map_degree(row(1, ["x0^2", "x1^3"])) == 6
    assert map_degree(row(2, ["x0^2 + x1*x2", "x1", "x2"])) == 2
    with pytest.raises(NotUnimodular):
        map_degree(row(2, ["x0*x1", "x1*x2", "x0*x2"]))


def test_fiber_examples():
    assert fiber_dimension(row(1, ["x0", "x1"]), (1, 1)) == 1
    assert fiber_dimension(row(1, ["x0^2", "x1^3"]), (1, 2)) == 6
    assert fiber_dimension(row(2, ["x0^2", "x1", "x2"]), (1, 1, 1)) == 2
    with pytest.raises(ValidationError):
        fiber_dimension(row(1, ["x0", "x1"]), (0, 0))


@pytest.mark.parametrize("seed", range(8))
def test_fiber_matches_degree_at_three_points(seed):
    r = bezout_row(seed)
    rng = np.random.default_rng(seed)
    for _ in range(3):
        assert fiber_dimension(r, random_point(rng, len(r))) == map_degree(r)


def test_row_bundle_examples():
    p = row_bundle(row(2, ["x0", "x1", "x2"]))
    assert p.rank == 2 and S.e_invariant(p) == 1
    p = row_bundle(row(2, ["x0^2", "x1^2", "x2^2"]))
    assert p.rank == 2 and S.e_invariant(p) == 1
    with pytest.raises(TooFewForms):
        row_bundle(row(2, ["x0", "x1"]))
    with pytest.raises(NotUnimodular):
        row_bundle(row(2, ["x0*x1", "x1*x2", "x0*x2"]))


@pytest.mark.parametrize("name", sorted(SQUARE_ROWS))
def test_bridge_between_verdicts(name):
    n, forms, expected = SQUARE_ROWS[name]
    r = row(n, forms)
    status = completability(r).status
    assert status == expected
    on_y = S.pullback_verdicts(row_bundle(r)).on_Y
    assert {"Trivial": "Completable", "NotTrivial": "NotCompletable"}[on_y] == status


def test_reduce_examples():
    ring = GradedRing(2)
    F = lambda *t: [parse_form(s, ring) for s in t]
    out = reduce_generators(F("x0", "x1", "x2", "x0 + x1 + x2"), seed=0)
    assert out == F("x0", "x1", "x2")
    square = "x0^2 + 2*x0*x1 + x1^2 + 2*x0*x2 + 2*x1*x2 + x2^2"  # (x0 + x1 + x2)^2
    out = reduce_generators(F("x0^2", "x1^2", "x2^2", square), seed=0)
    assert len(out) == 3 and projective_zero_locus_empty(out, ring)
    with pytest.raises(PreconditionError):
        reduce_generators(F("x0", "x1"), seed=0)
    with pytest.raises(PreconditionError):
        reduce_generators(F("x0", "x1", "x0 + x1", "x0 - x1"), seed=0)


def test_reduce_hard_tuple_needs_moves_and_is_deterministic():
    forms = hard_tuple(0)
    with pytest.raises(BudgetExhausted):
        reduce_generators(forms, seed=5, budget=0)
    out = reduce_generators(forms, seed=5)
    assert len(out) == 3 and projective_zero_locus_empty(out, forms[0].ring)
    assert reduce_generators(forms, seed=5) == out
