import json

import numpy as np
import pytest

from bundlelab import sheaf as S
from bundlelab.errors import DegreeMismatch, NotInjective, RankNonpositive, ValidationError
from bundlelab.exact import rank, rank_rows
from bundlelab.graded import GradedMap
from bundlelab.poly import GradedRing, graded_dim, parse_form

from corpus import CORPUS, euler, presentation, random_presentation, row, rowb, split

R2 = GradedRing(2)


def e_oracle(p):
    """Minimal generators of coker(F_b -> F_a) number #a - rank(constant part of the map)."""
    m = len(p.source_twists)
    if not m:
        return 0
    zero = (0,) * p.ring.nvars
    const = [[f.terms.get(zero, 0) if f.degree == 0 else 0 for f in col]
             for col in zip(*p.map.entries)]
    return m - rank_rows(const, len(p.target_twists))


# --- line bundles -----------------------------------------------------------------

def test_line_cohomology_examples():
    assert S.line_cohomology(2, 0, 2) == 6
    assert S.line_cohomology(2, 2, -3) == 1
    assert all(S.line_cohomology(2, 1, k) == 0 for k in range(-10, 10))
    assert S.line_cohomology(1, 1, -2) == 1


def test_line_cohomology_serre_duality():
    for n in (1, 2, 3):
        for k in range(-8, 8):
            assert S.line_cohomology(n, n, k) == S.line_cohomology(n, 0, -k - n - 1)


# --- validation -------------------------------------------------------------------

def test_validate_examples():
    p = presentation(2, [-1], [0, 0, 0], [["x0"], ["x1"], ["x2"]])
    assert p.rank == 2
    with pytest.raises(NotInjective) as info:
        presentation(2, [-1], [0, 0], [["x0"], ["x1"]])
    assert info.value.witness["variables_without_pure_power"] == [2]
    with pytest.raises(DegreeMismatch):
        presentation(2, [-1], [0, 0, 0], [["x0"], ["0@1"], ["x1*x2"]])
    with pytest.raises(RankNonpositive):
        presentation(2, [0], [1], [["x0"]])


def test_negative_degree_entries_must_be_annotated_zero():
    p = presentation(2, [0, 2], [1, 1, 1, 2],
                     [["x0", "0@-1"], ["x1", "0@-1"], ["x2", "0@-1"], ["0@2", "1"]])
    assert p.rank == 2 and S.e_invariant(p) == 1
    with pytest.raises(DegreeMismatch):
        presentation(2, [0, 2], [1, 1, 1, 2],
                     [["x0", "0@1"], ["x1", "0@-1"], ["x2", "0@-1"], ["0@2", "1"]])


def test_all_minors_vanishing_is_reported():
    with pytest.raises(NotInjective) as info:
        presentation(2, [0, 0], [1, 1, 1], [["x0", "x0"], ["x1", "x1"], ["x2", "x2"]])
    assert info.value.witness == []


def test_presentation_file_roundtrip():
    for p in CORPUS.values():
        q = S.load_presentation(p.dumps())
        assert q.map == p.map
        assert json.loads(q.dumps()) == p.to_dict()


# --- cohomology ---------------------------------------------------------------------

def test_cohomology_examples():
    T = euler(2)
    table = S.cohomology_table(T, (-5, 3))
    assert table.h(0, 0) == 8
    assert table.h(1, -3) == 1
    assert table.h(-1, 0) == 0 and table.h(3, 0) == 0


def test_split_cohomology_is_sum_of_line_bundles():
    p = split(3, [1, -2, 0])
    table = S.cohomology_table(p)
    for (i, k), v in table.dims.items():
        assert v == sum(S.line_cohomology(3, i, a + k) for a in (1, -2, 0))


def test_cotangent_twist_cohomology():
    # T(-3) = Omega^1 on P^2: h^1 = 1, h^0 = h^2 = 0
    table = S.cohomology_table(euler(2, -3), (0, 0))
    assert [table.h(i, 0) for i in range(3)] == [0, 1, 0]


def test_euler_characteristic_examples():
    assert S.euler_characteristic(euler(2), 0) == 8
    assert S.euler_characteristic(split(2, [1, 1]), 0) == 6
    assert S.euler_characteristic(euler(2), -3) == -1 == S.expected_euler_characteristic(euler(2), -3)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_invariants(name):
    p = CORPUS[name]
    table = S.cohomology_table(p)
    for k in table.ks:
        assert S.euler_characteristic(p, k) == S.expected_euler_characteristic(p, k)
    e = S.e_invariant(p)
    assert e >= 0 and e == e_oracle(p)
    assert (S.horrocks_split(p) is not None) == table.middle_vanishes()
    assert S.complexity(p) == len(S.syzygy_resolution(p)) - 1
    # the support window really contains all middle cohomology
    lo, hi = table.k_range
    outside = S.cohomology_table(p, (lo - p.n - 3, lo - 1)), S.cohomology_table(p, (hi + 1, hi + 4))
    assert all(t.middle_vanishes() for t in outside)


@pytest.mark.parametrize("name", ["euler2(0)", "row2_squares", "two_columns2", "euler3+O(-1)"])
def test_twist_shift_equivariance(name):
    p = CORPUS[name]
    q = p.twist(1)
    tp, tq = S.cohomology_table(p, (-6, 4)), S.cohomology_table(q, (-7, 3))
    assert all(tp.h(i, k) == tq.h(i, k - 1) for i in range(p.n + 1) for k in tp.ks)
    assert S.e_invariant(p) == S.e_invariant(q)
    assert S.complexity(p) == S.complexity(q)
    assert S.pullback_verdicts(p) == S.pullback_verdicts(q)


def test_support_window_catches_cohomology_outside_naive_window():
    # h^1(E(k)) is nonzero for k in -6..-3, below min b - n - 1 = -3
    p = CORPUS["row2_squares"]
    lo, hi = S.support_window(p)
    table = S.cohomology_table(p, (lo, hi))
    assert [table.h(1, k) for k in range(-6, -2)] == [1, 3, 3, 1]
    assert lo <= -6


def test_cohomology_jobs_do_not_change_output():
    p = CORPUS["euler3(0)"]
    assert S.cohomology_table(p, jobs=1) == S.cohomology_table(p, jobs=3)


def test_p1_cohomology_and_section_guard():
    p = presentation(1, [0], [1, 1], [["x0"], ["x1"]])  # T_{P^1} = O(2)
    table = S.cohomology_table(p, (-5, 3))
    for k in table.ks:
        assert table.h(0, k) == S.line_cohomology(1, 0, 2 + k)
        assert table.h(1, k) == S.line_cohomology(1, 1, 2 + k)
    with pytest.raises(ValidationError):
        S.e_invariant(p)


# --- section module -----------------------------------------------------------------

def test_sections_module_examples():
    sl = S.sections_module(split(2, [0, 0]), (0, 1))
    assert sl.piece_dims == {0: 2, 1: 6}
    assert all(rank(sl.variable_actions[(l, 0)]) == 2 for l in range(3))
    T1 = euler(2, -1)
    assert S.sections_module(T1, (0, 0)).piece_dims == {0: 3}
    assert S.sections_module(T1, (0, 0)).piece_dims[0] == graded_dim(2, 0) * 3 - graded_dim(2, -1)
    assert S.sections_module(T1, (1, 0)).is_empty()


@pytest.mark.parametrize("name", ["euler2(0)", "row2_cubic", "two_columns2", "euler3(0)"])
def test_sections_module_structure(name):
    p = CORPUS[name]
    sl = S.sections_module(p, (-3, 2))
    assert sl.commutes()
    for k in sl.degrees:
        assert sl.piece_dims[k] == S.cohomology_table(p, (k, k)).h(0, k)


# --- e, splitting, resolutions ------------------------------------------------------

def test_e_examples():
    assert S.e_invariant(euler(2, -1)) == 1
    assert S.e_invariant(split(2, [3, -1])) == 0
    assert S.e_invariant(euler(2, -1).block_sum(euler(2, -1))) == 2


def test_horrocks_split_examples():
    assert S.horrocks_split(presentation(2, [0], [1, 1, 0], [["x0"], ["x1"], ["1"]])) == (1, 1)
    assert S.horrocks_split(euler(2)) is None
    assert sorted(S.horrocks_split(split(2, [2, 5]))) == [2, 5]


def test_minimal_three_term_examples():
    res = S.minimal_three_term(euler(2, -1))
    assert res.cover_twists == (0, 0, 0) and res.kernel_twists == (-1,)
    res = S.minimal_three_term(split(2, [1, 0]))
    assert res.kernel.is_zero() and res.kernel_twists == ()
    res = S.minimal_three_term(rowb(2, ["x0^2", "x1", "x2"]))
    assert res.cover_twists == (2, 1, 1) and len(res.kernel_twists) == 1


def test_syzygy_examples():
    assert S.syzygy_resolution(split(2, [0, 1])) == [(1, 0)]
    assert S.syzygy_resolution(euler(2)) == [(1, 1, 1), (0,)]
    assert S.syzygy_resolution(rowb(2, ["x0", "x1", "x2"])) == [(1, 1, 1), (0,)]


@pytest.mark.parametrize("forms", [["x0", "x1", "x2"], ["x0^2", "x1", "x2"], ["x0^3", "x1^2", "x2"],
                                   ["x0^2 + x1*x2", "x1", "x2"], ["x0", "x1", "x2", "x0*x1 + x2^2"]])
def test_row_degrees_are_recovered(forms):
    r = row(2, forms)
    assert sorted(S.recovered_row_degrees(rowb(2, forms))) == sorted(r.degrees)


def test_complexity_examples():
    assert S.complexity(split(2, [0, 3])) == 0
    assert S.complexity(euler(2)) == 1
    assert S.complexity(euler(3)) == 1


def test_indecomposability_examples():
    assert S.indecomposability_certificate(rowb(2, ["x0", "x1", "x2"])) is not None
    cert = S.indecomposability_certificate(euler(3))
    assert cert.rank == 3 and cert.e == 1
    assert S.indecomposability_certificate(split(2, [0, 0])) is None


def test_pullback_verdict_examples():
    v = S.pullback_verdicts(rowb(2, ["x0", "x1", "x2"]))
    assert (v.on_X, v.on_Y) == ("NotTrivial", "NotTrivial")
    v = S.pullback_verdicts(rowb(2, ["x0^2", "x1", "x2"]))
    assert (v.on_X, v.on_Y) == ("NotTrivial", "Trivial")
    v = S.pullback_verdicts(split(2, [1, 4]))
    assert (v.on_X, v.on_Y) == ("Trivial", "Trivial")
    v = S.pullback_verdicts(CORPUS["euler2+euler2(1)"])
    assert v.on_Y_label() == "StablyTrivial(2)"
    assert all(v.citations.values())


@pytest.mark.parametrize("seed", range(15))
def test_e_additive_on_random_pairs(seed):
    rng = np.random.default_rng([7, seed])
    p, q = random_presentation(rng), random_presentation(rng)
    s = p.block_sum(q)
    assert S.e_invariant(s) == S.e_invariant(p) + S.e_invariant(q) == e_oracle(s)
