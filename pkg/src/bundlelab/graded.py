"""Graded maps between sums of twisted free modules, and degreewise module pieces.

A graded S-module is handled one degree at a time.  Two concrete kinds occur:

* :class:`CokernelPieces` -- the section module of a presentation, F / im(phi);
  a basis of each piece is the set of non-pivot coordinates of the RREF of the
  image.
* :class:`KernelPieces` -- the kernel of a map from a free cover onto another
  module; a basis of each piece is the RREF null-space basis, and coordinates
  are read off the free columns.

Both expose the same small interface (``dim``, ``lifts``, ``coords``) so that
minimal generators, variable actions and slices are computed uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from bundlelab.errors import DegreeMismatch
from bundlelab.exact import Matrix, kernel_from_rref, rank_rows, rref_rows
from bundlelab.poly import Form, GradedRing, basis_index, mono_mul, monomial_basis


@dataclass(frozen=True)
class GradedMap:
    """Map from sum O(b_j) to sum O(a_i); entry (i, j) is a form of degree a_i - b_j."""

    ring: GradedRing
    source_twists: tuple[int, ...]
    target_twists: tuple[int, ...]
    entries: tuple[tuple[Form, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "source_twists", tuple(self.source_twists))
        object.__setattr__(self, "target_twists", tuple(self.target_twists))
        object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))
        if len(self.entries) != len(self.target_twists):
            raise DegreeMismatch(
                f"matrix has {len(self.entries)} rows but {len(self.target_twists)} target twists")
        for i, (a, row) in enumerate(zip(self.target_twists, self.entries)):
            if len(row) != len(self.source_twists):
                raise DegreeMismatch(
                    f"row {i} has {len(row)} entries but {len(self.source_twists)} source twists")
            for j, (b, f) in enumerate(zip(self.source_twists, row)):
                if f.ring != self.ring:
                    raise DegreeMismatch(f"entry ({i},{j}) lives in a different ring")
                if f.degree != a - b:
                    raise DegreeMismatch(
                        f"entry ({i},{j}) has degree {f.degree}, expected {a} - {b} = {a - b}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.target_twists), len(self.source_twists)

    def twist(self, k: int) -> GradedMap:
        return GradedMap(self.ring, [b + k for b in self.source_twists],
                         [a + k for a in self.target_twists], self.entries)

    def block_sum(self, other: GradedMap) -> GradedMap:
        if other.ring != self.ring:
            raise ValueError("block sum of maps over different rings")
        t1, s1 = self.shape
        t2, s2 = other.shape
        ring = self.ring
        rows = []
        for i in range(t1):
            a = self.target_twists[i]
            rows.append(list(self.entries[i]) + [ring.zero(a - b) for b in other.source_twists])
        for i in range(t2):
            a = other.target_twists[i]
            rows.append([ring.zero(a - b) for b in self.source_twists] + list(other.entries[i]))
        return GradedMap(ring, self.source_twists + other.source_twists,
                         self.target_twists + other.target_twists, rows)

    def transpose(self) -> GradedMap:
        """The dual map sum O(-a_i) -> sum O(-b_j)."""
        cols = [[self.entries[i][j] for i in range(len(self.target_twists))]
                for j in range(len(self.source_twists))]
        return GradedMap(self.ring, [-a for a in self.target_twists],
                         [-b for b in self.source_twists], cols)

    def column(self, j: int) -> list[Form]:
        return [row[j] for row in self.entries]


class FreeModule:
    """sum_i S(c_i): the degree-k piece is sum_i S_{c_i + k}, blocks in order."""

    def __init__(self, ring: GradedRing, twists: Sequence[int]):
        self.ring = ring
        self.twists = tuple(twists)
        self._offsets: dict[int, list[int]] = {}

    def offsets(self, k: int) -> list[int]:
        offs = self._offsets.get(k)
        if offs is None:
            offs = [0]
            for c in self.twists:
                offs.append(offs[-1] + len(monomial_basis(self.ring, c + k)))
            self._offsets[k] = offs
        return offs

    def dim(self, k: int) -> int:
        return self.offsets(k)[-1]

    def locate(self, k: int, idx: int) -> tuple[int, tuple[int, ...]]:
        """(block, monomial) of basis element ``idx`` in degree k."""
        offs = self.offsets(k)
        for b in range(len(self.twists)):
            if idx < offs[b + 1]:
                return b, monomial_basis(self.ring, self.twists[b] + k)[idx - offs[b]]
        raise IndexError(idx)

    def basis(self, k: int):
        for b, c in enumerate(self.twists):
            for mu in monomial_basis(self.ring, c + k):
                yield b, mu

    def multiply(self, vec: Sequence, k: int, mono: tuple[int, ...]) -> list:
        """x^mono * vec, taking degree k to degree k + deg(mono)."""
        dk = sum(mono)
        offs = self.offsets(k)
        offs2 = self.offsets(k + dk)
        out = [0] * offs2[-1]
        for b, c in enumerate(self.twists):
            src = monomial_basis(self.ring, c + k)
            tgt = basis_index(self.ring, c + k + dk)
            base, base2 = offs[b], offs2[b]
            for t, mu in enumerate(src):
                v = vec[base + t]
                if v:
                    out[base2 + tgt[mono_mul(mu, mono)]] += v
        return out

    def vector_to_forms(self, vec: Sequence, k: int) -> list[Form]:
        offs = self.offsets(k)
        forms = []
        for b, c in enumerate(self.twists):
            mons = monomial_basis(self.ring, c + k)
            terms = {m: vec[offs[b] + t] for t, m in enumerate(mons) if vec[offs[b] + t]}
            forms.append(Form(self.ring, terms, c + k))
        return forms


def image_rows(gmap: GradedMap, target: FreeModule, k: int) -> list[list]:
    """Images of the degree-k source basis, as rows in target coordinates (phi_k^T)."""
    ring = gmap.ring
    offs = target.offsets(k)
    ncols = offs[-1]
    nz = [[(i, f) for i, f in enumerate(gmap.column(j)) if f.terms]
          for j in range(len(gmap.source_twists))]
    rows = []
    for j, b in enumerate(gmap.source_twists):
        for mu in monomial_basis(ring, b + k):
            v = [0] * ncols
            for i, f in nz[j]:
                idx = basis_index(ring, gmap.target_twists[i] + k)
                base = offs[i]
                for m, c in f.terms.items():
                    v[base + idx[mono_mul(m, mu)]] += c
            rows.append(v)
    return rows


def map_rank(gmap: GradedMap, k: int, target: FreeModule | None = None) -> int:
    """Rank of H^0 of the map in degree k."""
    target = target or FreeModule(gmap.ring, gmap.target_twists)
    return rank_rows(image_rows(gmap, target, k), target.dim(k))


class GradedPieces:
    """Common interface of degreewise-computed graded modules."""

    ring: GradedRing
    ambient: FreeModule

    def dim(self, k: int) -> int:
        raise NotImplementedError

    def lifts(self, k: int) -> list[list]:
        """Basis of the degree-k piece as vectors of the ambient free module."""
        raise NotImplementedError

    def coords(self, k: int, vec: Sequence) -> list[Fraction]:
        """Coordinates of an ambient vector's class (or of a member) in the basis."""
        raise NotImplementedError

    def action(self, var: int, k: int) -> Matrix:
        """Multiplication by x_var from the degree-k piece to the degree-(k+1) piece."""
        e = [0] * self.ring.nvars
        e[var] = 1
        mono = tuple(e)
        cols = [self.coords(k + 1, self.ambient.multiply(v, k, mono)) for v in self.lifts(k)]
        rows_out = self.dim(k + 1)
        if not cols:
            return Matrix.zeros(rows_out, 0)
        if rows_out == 0:
            return Matrix([], len(cols))
        return Matrix(cols, rows_out).transpose()

    def _decomposable_rows(self, k: int) -> list[list]:
        """Coordinates in degree k of x_l * (basis of degree k-1), all l."""
        rows = []
        prev = self.lifts(k - 1)
        for var in range(self.ring.nvars):
            e = [0] * self.ring.nvars
            e[var] = 1
            mono = tuple(e)
            for v in prev:
                rows.append(self.coords(k, self.ambient.multiply(v, k - 1, mono)))
        return rows

    def generators(self, k: int) -> list[list]:
        """Ambient lifts of minimal generators living in degree k.

        They are the basis elements at the non-pivot coordinates of the RREF
        of the decomposable part m*N in degree k.
        """
        d = self.dim(k)
        if d == 0:
            return []
        rows, pivots = rref_rows(self._decomposable_rows(k), d)
        pivot_set = set(pivots)
        lifts = self.lifts(k)
        return [lifts[c] for c in range(d) if c not in pivot_set]

    def generator_count(self, k: int) -> int:
        d = self.dim(k)
        if d == 0:
            return 0
        return d - rank_rows(self._decomposable_rows(k), d)

    def slice(self, lo: int, hi: int) -> GradedModuleSlice:
        dims = {k: self.dim(k) for k in range(lo, hi + 1)}
        actions = {(var, k): self.action(var, k)
                   for k in range(lo, hi) for var in range(self.ring.nvars)}
        return GradedModuleSlice(self.ring, (lo, hi), dims, actions)


class CokernelPieces(GradedPieces):
    """Degree pieces of coker(sum S(b_j) -> sum S(a_i))."""

    def __init__(self, gmap: GradedMap):
        self.gmap = gmap
        self.ring = gmap.ring
        self.ambient = FreeModule(gmap.ring, gmap.target_twists)
        self._cache: dict[int, tuple] = {}

    def _piece(self, k: int):
        piece = self._cache.get(k)
        if piece is None:
            ncols = self.ambient.dim(k)
            rows, pivots = rref_rows(image_rows(self.gmap, self.ambient, k), ncols)
            pivot_row = {p: r for r, p in zip(rows, pivots)}
            free = [c for c in range(ncols) if c not in pivot_row]
            piece = (pivot_row, free, {c: t for t, c in enumerate(free)})
            self._cache[k] = piece
        return piece

    def image_rank(self, k: int) -> int:
        return len(self._piece(k)[0])

    def dim(self, k: int) -> int:
        return len(self._piece(k)[1])

    def lifts(self, k: int) -> list[list]:
        ncols = self.ambient.dim(k)
        out = []
        for c in self._piece(k)[1]:
            v = [0] * ncols
            v[c] = 1
            out.append(v)
        return out

    def coords(self, k: int, vec: Sequence) -> list[Fraction]:
        pivot_row, free, pos = self._piece(k)
        out = [Fraction(0)] * len(free)
        for q, x in enumerate(vec):
            if not x:
                continue
            t = pos.get(q)
            if t is not None:
                out[t] += x
            else:
                row = pivot_row[q]
                for t, c in enumerate(free):
                    if row[c]:
                        out[t] -= x * row[c]
        return out


class KernelPieces(GradedPieces):
    """Degree pieces of ker(cover -> target), where generator ``s`` of the
    cover maps to the ambient vector ``images[s]`` of ``target`` in degree
    ``-cover_twists[s]``."""

    def __init__(self, target: GradedPieces, cover_twists: Sequence[int], images: Sequence[list]):
        self.target = target
        self.ring = target.ring
        self.ambient = FreeModule(target.ring, cover_twists)
        self.images = list(images)
        self._cache: dict[int, tuple] = {}

    def map_columns(self, k: int) -> list[list[Fraction]]:
        """Target coordinates of the images of the cover's degree-k basis."""
        cols = []
        for s, c in enumerate(self.ambient.twists):
            gdeg = -c
            for mu in monomial_basis(self.ring, c + k):
                img = self.target.ambient.multiply(self.images[s], gdeg, mu)
                cols.append(self.target.coords(k, img))
        return cols

    def _piece(self, k: int):
        piece = self._cache.get(k)
        if piece is None:
            ncols = self.ambient.dim(k)
            cols = self.map_columns(k)
            nrows = self.target.dim(k)
            mat_rows = [[col[r] for col in cols] for r in range(nrows)]
            rows, pivots = rref_rows(mat_rows, ncols)
            basis = kernel_from_rref(rows, pivots, ncols)
            pivot_set = set(pivots)
            free = [c for c in range(ncols) if c not in pivot_set]
            piece = (basis, free, len(pivots))
            self._cache[k] = piece
        return piece

    def map_rank(self, k: int) -> int:
        return self._piece(k)[2]

    def dim(self, k: int) -> int:
        return len(self._piece(k)[0])

    def lifts(self, k: int) -> list[list]:
        return self._piece(k)[0]

    def coords(self, k: int, vec: Sequence) -> list[Fraction]:
        return [Fraction(vec[c]) for c in self._piece(k)[1]]


@dataclass(frozen=True)
class GradedModuleSlice:
    """Finite degree window of a graded module: piece dimensions and x_l actions.

    ``variable_actions[(l, d)]`` maps the degree-d piece to the degree-(d+1)
    piece; it is present for every d with d and d+1 in the window.
    """

    ring: GradedRing
    window: tuple[int, int]
    piece_dims: dict[int, int]
    variable_actions: dict[tuple[int, int], Matrix] = field(default_factory=dict)

    def __post_init__(self):
        for (var, d), mat in self.variable_actions.items():
            if mat.shape != (self.piece_dims[d + 1], self.piece_dims[d]):
                raise ValueError(f"action x{var} at degree {d} has shape {mat.shape}")

    @property
    def degrees(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def is_empty(self) -> bool:
        return self.window[0] > self.window[1]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.piece_dims.values())

    def total_dimension(self) -> int:
        return sum(self.piece_dims.values())

    def generator_counts(self) -> dict[int, int]:
        """Minimal generator count per degree.  The lowest degree of the window
        is counted in full, so the window must start where the module vanishes
        or begins."""
        out = {}
        for d in self.degrees:
            dim = self.piece_dims[d]
            if d - 1 < self.window[0] or dim == 0:
                out[d] = dim
                continue
            rows = []
            for var in range(self.ring.nvars):
                mat = self.variable_actions[(var, d - 1)]
                rows.extend(mat.column(j) for j in range(mat.ncols))
            out[d] = dim - rank_rows(rows, dim)
        return out

    def commutes(self) -> bool:
        for d in self.degrees:
            if d + 2 > self.window[1]:
                break
            for l1 in range(self.ring.nvars):
                for l2 in range(l1 + 1, self.ring.nvars):
                    a = self.variable_actions[(l2, d + 1)] @ self.variable_actions[(l1, d)]
                    b = self.variable_actions[(l1, d + 1)] @ self.variable_actions[(l2, d)]
                    if a != b:
                        return False
        return True
