"""Vector bundles on P^n presented as cokernels 0 -> sum O(b_j) -> sum O(a_i) -> E -> 0.

Cohomology comes from the long exact sequence of the presentation.  Sums of
line bundles have no middle cohomology, so for n >= 2 everything reduces to
two ranks per twist k: the H^0 map in degree k, and the H^n map, which by
Serre duality is the transpose of the dual map sum S(-a_i) -> sum S(-b_j) in
degree D = -k-n-1.  In particular H^i(E(k)) = 0 for 1 <= i <= n-2 and the only
possible middle cohomology sits in H^{n-1}.

The section module M_E = sum_k H^0(E(k)) is the cokernel module of the H^0
maps (n >= 2), handled degreewise by :mod:`bundlelab.graded`.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Sequence

from bundlelab.errors import (
    DegreeMismatch,
    NotInjective,
    RankNonpositive,
    ValidationError,
    WindowInsufficient,
)
from bundlelab.graded import (
    CokernelPieces,
    FreeModule,
    GradedMap,
    GradedModuleSlice,
    GradedPieces,
    KernelPieces,
    image_rows,
)
from bundlelab.groebner import missing_pure_powers, projective_zero_locus_empty
from bundlelab.exact import rank_rows
from bundlelab.parallel import parallel_map
from bundlelab.poly import Form, GradedRing, graded_dim, parse_form

log = logging.getLogger(__name__)

__all__ = [
    "BundlePresentation",
    "CohomologyTable",
    "GradedMap",
    "GradedModuleSlice",
    "IndecomposabilityCertificate",
    "PullbackVerdicts",
    "ThreeTermResolution",
    "cohomology_table",
    "complexity",
    "e_invariant",
    "euler_characteristic",
    "expected_euler_characteristic",
    "horrocks_split",
    "indecomposability_certificate",
    "line_cohomology",
    "minimal_generator_twists",
    "minimal_three_term",
    "pullback_verdicts",
    "regularity_bound",
    "sections_module",
    "support_window",
    "syzygy_resolution",
    "validate_presentation",
]

WINDOW_BUDGET = 10
CONFIRM_DEGREES = 1
DUAL_SCAN_BUDGET = 200


# --- line bundles -----------------------------------------------------------

def line_cohomology(n: int, i: int, k: int) -> int:
    """h^i(O(k)) on P^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if i == 0:
        return comb(n + k, n) if k >= 0 else 0
    if i == n:
        return comb(-k - 1, n) if k <= -n - 1 else 0
    return 0


def _chi_line(n: int, d: int) -> int:
    # chi(O(d)) = (d+1)(d+2)...(d+n)/n!, valid for every integer d
    return prod(d + j for j in range(1, n + 1)) // factorial(n)


# --- presentations ----------------------------------------------------------

@dataclass(frozen=True)
class BundlePresentation:
    """A graded map certified injective as a bundle map; E is its cokernel."""

    map: GradedMap
    witness: str = field(default="", compare=False)

    @property
    def ring(self) -> GradedRing:
        return self.map.ring

    @property
    def n(self) -> int:
        return self.map.ring.n

    @property
    def rank(self) -> int:
        return len(self.map.target_twists) - len(self.map.source_twists)

    @property
    def source_twists(self) -> tuple[int, ...]:
        return self.map.source_twists

    @property
    def target_twists(self) -> tuple[int, ...]:
        return self.map.target_twists

    def twist(self, k: int) -> BundlePresentation:
        return BundlePresentation(self.map.twist(k), self.witness)

    def block_sum(self, other: BundlePresentation) -> BundlePresentation:
        return BundlePresentation(self.map.block_sum(other.map), "block sum of presentations")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "source_twists": list(self.source_twists),
            "target_twists": list(self.target_twists),
            "matrix": [[str(f) for f in row] for row in self.map.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def graded_map_from_dict(doc: dict) -> GradedMap:
    try:
        ring = GradedRing(int(doc["n"]))
        src = [int(b) for b in doc["source_twists"]]
        tgt = [int(a) for a in doc["target_twists"]]
        rows = doc["matrix"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed presentation document: {exc}") from exc
    if len(rows) != len(tgt):
        raise DegreeMismatch(f"matrix has {len(rows)} rows but {len(tgt)} target twists")
    entries = [[parse_form(s, ring) for s in row] for row in rows]
    return GradedMap(ring, src, tgt, entries)


def load_presentation(text: str) -> BundlePresentation:
    return validate_presentation(graded_map_from_dict(json.loads(text)))


def _determinant(mat: list[list[Form]]) -> Form:
    m = len(mat)
    if m == 1:
        return mat[0][0]
    total = None
    for j in range(m):
        f = mat[0][j]
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = f * _determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def maximal_minors(gmap: GradedMap) -> list[tuple[tuple[int, ...], Form]]:
    """Nonzero maximal minors, keyed by their row subsets."""
    t, m = gmap.shape
    out = []
    for rows in itertools.combinations(range(t), m):
        det = _determinant([list(gmap.entries[i]) for i in rows])
        if det.terms:
            out.append((rows, det))
    return out


def validate_presentation(gmap: GradedMap) -> BundlePresentation:
    """Certify that the map is injective on every fiber, so the cokernel is a bundle."""
    t, m = gmap.shape
    if t - m < 1:
        raise RankNonpositive(f"rank {t - m} (target {t} - source {m}) must be positive")
    if m == 0:
        return BundlePresentation(gmap, "no source: sum of line bundles")
    minors = maximal_minors(gmap)
    if not minors:
        raise NotInjective("every maximal minor vanishes identically", witness=[])
    forms = [f for _, f in minors]
    if not projective_zero_locus_empty(forms, gmap.ring):
        missing = missing_pure_powers(forms, ring=gmap.ring)
        witness = {
            "minor_rows": [list(r) for r, _ in minors],
            "variables_without_pure_power": missing,
        }
        raise NotInjective(
            f"maximal minors {[list(r) for r, _ in minors]} share a zero in P^{gmap.ring.n} "
            f"(no pure power of {', '.join(f'x{i}' for i in missing)} in their initial ideal)",
            witness=witness,
        )
    return BundlePresentation(gmap, f"{len(minors)} maximal minors with empty common zero locus")


# --- cohomology -------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyTable:
    n: int
    k_range: tuple[int, int]
    dims: dict[tuple[int, int], int]

    def h(self, i: int, k: int) -> int:
        if i < 0 or i > self.n:
            return 0
        return self.dims[(i, k)]

    @property
    def ks(self) -> range:
        return range(self.k_range[0], self.k_range[1] + 1)

    def middle_vanishes(self) -> bool:
        return all(self.dims[(i, k)] == 0 for i in range(1, self.n) for k in self.ks)

    def module_vanishes(self, i: int) -> bool:
        return all(self.dims[(i, k)] == 0 for k in self.ks)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k_range": list(self.k_range),
            "rows": {str(i): [self.dims[(i, k)] for k in self.ks] for i in range(self.n, -1, -1)},
        }

    def format(self) -> str:
        ks = list(self.ks)
        cells = [[str(k) for k in ks]] + [[str(self.dims[(i, k)]) for k in ks]
                                           for i in range(self.n, -1, -1)]
        labels = ["k"] + [f"h^{i}" for i in range(self.n, -1, -1)]
        width = max(len(c) for row in cells for c in row)
        lw = max(len(s) for s in labels)
        lines = []
        for label, row in zip(labels, cells):
            lines.append(label.ljust(lw) + " | " + " ".join(c.rjust(width) for c in row))
            if label == "k":
                lines.append("-" * len(lines[-1]))
        return "\n".join(lines)


def _h0_rank(p: BundlePresentation, k: int) -> int:
    tgt = FreeModule(p.ring, p.target_twists)
    if not p.source_twists:
        return 0
    return rank_rows(image_rows(p.map, tgt, k), tgt.dim(k))


def _dual_rank(p: BundlePresentation, degree: int) -> int:
    """Rank of the dual map sum S(-a_i) -> sum S(-b_j) in the given degree."""
    if not p.source_twists:
        return 0
    dual = p.map.transpose()
    tgt = FreeModule(p.ring, dual.target_twists)
    return rank_rows(image_rows(dual, tgt, degree), tgt.dim(degree))


def _cohomology_column(p: BundlePresentation, k: int) -> dict[int, int]:
    n = p.n
    h0F = sum(graded_dim(n, a + k) for a in p.target_twists)
    hnF = sum(line_cohomology(n, n, a + k) for a in p.target_twists)
    hnG = sum(line_cohomology(n, n, b + k) for b in p.source_twists)
    r0 = _h0_rank(p, k)
    rtop = _dual_rank(p, -k - n - 1) if hnG else 0
    col = {i: 0 for i in range(n + 1)}
    if n == 1:
        col[0] = (h0F - r0) + (hnG - rtop)
        col[1] = hnF - rtop
    else:
        col[0] = h0F - r0
        col[n - 1] = hnG - rtop
        col[n] = hnF - rtop
    return col


def _dual_vanishing_degree(p: BundlePresentation) -> int:
    """Least D >= max b_j from which the dual map is surjective in every degree."""
    n = p.n
    d = max(p.source_twists)
    for _ in range(DUAL_SCAN_BUDGET):
        target_dim = sum(graded_dim(n, d - b) for b in p.source_twists)
        if _dual_rank(p, d) == target_dim:
            return d
        d += 1
    raise WindowInsufficient(
        f"dual map not surjective within {DUAL_SCAN_BUDGET} degrees above {max(p.source_twists)}")


def middle_support(p: BundlePresentation) -> tuple[int, int] | None:
    """Interval of k outside which H^i(E(k)) = 0 for all 0 < i < n (None if empty).

    H^{n-1}(E(k)) is dual to the cokernel of the dual map in degree -k-n-1;
    that cokernel is a finite-length module generated in degrees b_j.
    """
    if not p.source_twists:
        return None
    n = p.n
    d_star = _dual_vanishing_degree(p)
    lo_d = min(p.source_twists)
    if d_star - 1 < lo_d:
        return None
    return (-(d_star - 1) - n - 1, -lo_d - n - 1)


def support_window(p: BundlePresentation) -> tuple[int, int]:
    """Twist window containing all middle cohomology.

    It is the hull of the line-bundle window [min b - n - 1, max a + n + 1],
    the rigorous middle support and the twist -max a - n - 1.
    """
    n = p.n
    twists = p.source_twists or p.target_twists
    lo = min(min(twists) - n - 1, -max(p.target_twists) - n - 1)
    hi = max(p.target_twists) + n + 1
    mid = middle_support(p)
    if mid is not None:
        lo = min(lo, mid[0])
        hi = max(hi, mid[1])
    return lo, hi


def cohomology_table(p: BundlePresentation, k_range: tuple[int, int] | None = None, *,
                     jobs: int = 1) -> CohomologyTable:
    """h^i(E(k)) for 0 <= i <= n and k in the (inclusive) window."""
    if k_range is None:
        k_range = support_window(p)
    lo, hi = k_range
    ks = list(range(lo, hi + 1))
    cols = parallel_map(_cohomology_column, [(p, k) for k in ks], jobs=jobs)
    dims = {}
    for k, col in zip(ks, cols):
        for i, v in col.items():
            dims[(i, k)] = v
    return CohomologyTable(p.n, (lo, hi), dims)


def expected_euler_characteristic(p: BundlePresentation, k: int) -> int:
    """sum_i chi(O(a_i+k)) - sum_j chi(O(b_j+k)), from the Hilbert polynomial."""
    n = p.n
    return (sum(_chi_line(n, a + k) for a in p.target_twists)
            - sum(_chi_line(n, b + k) for b in p.source_twists))


def euler_characteristic(p: BundlePresentation, k: int) -> int:
    """Alternating sum of the computed cohomology of E(k)."""
    col = _cohomology_column(p, k)
    return sum((-1) ** i * v for i, v in col.items())


# --- section module and generators -----------------------------------------

def _require_sections(p: BundlePresentation) -> None:
    if p.n < 2:
        raise ValidationError(
            "section-module computations need n >= 2 (on P^1 H^0 is not the cokernel module)")


def sections_module(p: BundlePresentation, window: tuple[int, int]) -> GradedModuleSlice:
    """M_E = sum_k H^0(E(k)) over the window, with the x_l actions."""
    _require_sections(p)
    lo, hi = window
    return CokernelPieces(p.map).slice(lo, hi)


def _generator_window(p: BundlePresentation) -> tuple[int, int]:
    return -max(p.target_twists), -min(p.target_twists)


def minimal_generator_twists(p: BundlePresentation) -> tuple[int, ...]:
    """Twists c of a minimal generating set of M_E (a generator in degree d gives c = -d)."""
    _require_sections(p)
    lo, hi = _generator_window(p)
    counts = sections_module(p, (lo - 1, hi)).generator_counts()
    out = []
    for d in range(lo, hi + 1):
        out += [-d] * counts[d]
    return tuple(sorted(out, reverse=True))


def e_invariant(p: BundlePresentation) -> int:
    """dim M_E / m M_E minus the rank."""
    e = len(minimal_generator_twists(p)) - p.rank
    assert e >= 0, e
    return e


def horrocks_split(p: BundlePresentation) -> tuple[int, ...] | None:
    """Splitting type (twists, descending) when E is a sum of line bundles, else None."""
    twists = minimal_generator_twists(p)
    if len(twists) != p.rank:
        return None
    return twists


def regularity_bound(p: BundlePresentation) -> int:
    """An m with E m-regular: H^i(E(m-i)) = 0 for all i > 0."""
    bound = -min(p.target_twists)
    if p.source_twists:
        bound = max(bound, -min(p.source_twists) - 1)
    return bound


@dataclass(frozen=True)
class ThreeTermResolution:
    """0 -> E' -> sum O(cover_twists) -> E -> 0 with H^0 surjective in every twist."""

    cover_twists: tuple[int, ...]
    kernel: GradedModuleSlice
    kernel_twists: tuple[int, ...]
    kernel_rank: int
    regularity: int = field(compare=False)
    _pieces: KernelPieces | None = field(default=None, compare=False, repr=False)


def _cover(module: GradedPieces, lo: int, hi: int) -> tuple[list[int], list[list]]:
    twists, images = [], []
    for d in range(lo, hi + 1):
        for g in module.generators(d):
            twists.append(-d)
            images.append(g)
    return twists, images


def _kernel_step(module: GradedPieces, gen_window: tuple[int, int], module_rank: int,
                 module_reg: int, budget: int) -> ThreeTermResolution:
    ring = module.ring
    n = ring.n
    twists, images = _cover(module, *gen_window)
    kernel = KernelPieces(module, twists, images)
    krank = len(twists) - module_rank
    if not twists:
        empty = GradedModuleSlice(ring, (0, -1), {}, {})
        return ThreeTermResolution((), empty, (), krank, module_reg, kernel)
    # E' is reg-regular (Castelnuovo-Mumford), so its section module is
    # generated in degrees <= reg; the loop only confirms that bound
    reg = max(-min(twists), module_reg + 1)
    hi = reg
    for _ in range(budget + 1):
        if all(kernel.generator_count(d) == 0 for d in range(hi + 1, hi + CONFIRM_DEGREES + 1)):
            break
        hi += 1
    else:
        raise WindowInsufficient(
            f"kernel generators did not stabilise within {budget} degrees above {reg}")
    # H^0 of the cover surjects onto the module; this is M_1(E') = 0
    lo = -max(twists) - 1
    for k in range(lo, hi + 1):
        if kernel.map_rank(k) != module.dim(k):
            raise AssertionError(f"cover is not surjective on sections in degree {k}")
    kslice = kernel.slice(lo, hi)
    counts = kslice.generator_counts()
    ktwists = tuple(sorted((-d for d, c in counts.items() for _ in range(c)), reverse=True))
    return ThreeTermResolution(tuple(sorted(twists, reverse=True)), kslice, ktwists, krank,
                               reg, kernel)


def minimal_three_term(p: BundlePresentation, *, budget: int = WINDOW_BUDGET) -> ThreeTermResolution:
    """Cover E by the minimal generators of M_E and compute the kernel module."""
    _require_sections(p)
    module = CokernelPieces(p.map)
    return _kernel_step(module, _generator_window(p), p.rank, regularity_bound(p), budget)


def syzygy_resolution(p: BundlePresentation, *, budget: int = WINDOW_BUDGET) -> list[tuple[int, ...]]:
    """Twist lists of E_1, E_2, ... in 0 -> E_s -> ... -> E_1 -> E -> 0."""
    _require_sections(p)
    steps = []
    module: GradedPieces = CokernelPieces(p.map)
    window = _generator_window(p)
    rank, reg = p.rank, regularity_bound(p)
    for _ in range(p.n):
        step = _kernel_step(module, window, rank, reg, budget)
        steps.append(step.cover_twists)
        e_image = len(step.cover_twists) - rank
        if step.kernel_rank != e_image:
            raise AssertionError("rank of kernel differs from e of the image")
        if step.kernel_rank == 0:
            if not step.kernel.is_zero():
                raise AssertionError("rank-zero kernel has nonzero sections")
            break
        module = step._pieces
        window = (step.kernel.window[0], step.kernel.window[1])
        rank, reg = step.kernel_rank, step.regularity
    return steps


# --- invariants built on the above -------------------------------------------

def middle_vanishing(p: BundlePresentation) -> dict[int, bool]:
    """Whether M_i(E) = 0, for 1 <= i <= n (M_n never vanishes for rank >= 1)."""
    n = p.n
    table = cohomology_table(p)
    flags = {i: table.module_vanishes(i) for i in range(1, n)}
    flags[n] = False
    return flags


def complexity(p: BundlePresentation) -> int:
    """min{i : M_j(E) = 0 for 1 <= j <= n - i} - 1."""
    flags = middle_vanishing(p)
    n = p.n
    for i in range(0, n + 1):
        if all(flags[j] for j in range(1, n - i + 1)):
            return i - 1
    raise AssertionError("unreachable: i = n is vacuous")


@dataclass(frozen=True)
class IndecomposabilityCertificate:
    rank: int
    e: int
    reason: str = ("e = 1 and rank = n: e is additive and a summand with e = 1 "
                   "has rank at least n, so no proper splitting exists")


def indecomposability_certificate(p: BundlePresentation) -> IndecomposabilityCertificate | None:
    """One-sided: present only when rank = n and e = 1."""
    if p.rank != p.n:
        return None
    e = e_invariant(p)
    if e != 1:
        return None
    return IndecomposabilityCertificate(p.rank, e)


@dataclass(frozen=True)
class PullbackVerdicts:
    """Triviality of the pullback to the punctured affine space X and the quadric Y."""

    on_X: str
    on_Y: str
    e: int
    rank: int
    stable_t: int | None = None
    row_degrees: tuple[int, ...] | None = None
    citations: dict = field(default_factory=dict)

    def on_Y_label(self) -> str:
        if self.on_Y == "StablyTrivial":
            return f"StablyTrivial({self.stable_t})"
        return self.on_Y

    def to_dict(self) -> dict:
        return {
            "on_X": self.on_X,
            "on_Y": self.on_Y_label(),
            "e": self.e,
            "rank": self.rank,
            "row_degrees": list(self.row_degrees) if self.row_degrees else None,
            "citations": dict(self.citations),
        }


CITE_SPLIT = "e = 0 iff E splits iff the pullback to X is trivial (Horrocks)"
CITE_SPLIT_Y = "split bundles pull back to trivial bundles"
CITE_HIGH_RANK = "e = 1 and rank >= n+1: drop a generator, pullback to Y is trivial"
CITE_N_FACTORIAL = "e = 1, rank = n: n! criterion on the row degrees (Mohan Kumar, Swan)"
CITE_STABLE = "three-term resolution splits on the affine quadric: trivial after adding O^e"


def pullback_verdicts(p: BundlePresentation, *, budget: int = WINDOW_BUDGET) -> PullbackVerdicts:
    n = p.n
    r = p.rank
    e = e_invariant(p)
    if e == 0:
        return PullbackVerdicts("Trivial", "Trivial", e, r,
                                citations={"on_X": CITE_SPLIT, "on_Y": CITE_SPLIT_Y})
    cites = {"on_X": CITE_SPLIT}
    if e == 1 and r >= n + 1:
        cites["on_Y"] = CITE_HIGH_RANK
        return PullbackVerdicts("NotTrivial", "Trivial", e, r, citations=cites)
    if e == 1 and r == n:
        degrees = recovered_row_degrees(p, budget=budget)
        cites["on_Y"] = CITE_N_FACTORIAL
        verdict = "Trivial" if prod(degrees) % factorial(n) == 0 else "NotTrivial"
        return PullbackVerdicts("NotTrivial", verdict, e, r, row_degrees=degrees, citations=cites)
    flags = middle_vanishing(p) if n > 2 else {}
    if all(flags[i] for i in range(1, n - 1)):
        cites["on_Y"] = CITE_STABLE
        return PullbackVerdicts("NotTrivial", "StablyTrivial", e, r, stable_t=e, citations=cites)
    cites["on_Y"] = "outside the hypotheses of every available criterion"
    return PullbackVerdicts("NotTrivial", "Unknown", e, r, citations=cites)


def recovered_row_degrees(p: BundlePresentation, *, budget: int = WINDOW_BUDGET) -> tuple[int, ...]:
    """For e = 1: degrees a_i = c_i - b of the forms in the minimal 0 -> O(b) -> sum O(c_i)."""
    res = minimal_three_term(p, budget=budget)
    if len(res.kernel_twists) != 1 or res.kernel_rank != 1:
        raise ValidationError(f"bundle has e = {res.kernel_rank}, not 1")
    b = res.kernel_twists[0]
    return tuple(sorted((c - b for c in res.cover_twists), reverse=True))
