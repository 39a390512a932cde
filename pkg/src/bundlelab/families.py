"""Families of rank-n bundles on P^n from unimodular rows of equal degree a.

Each member is a row of n + 1 forms of degree a with no common zero.  When
every prime p <= n divides a, n! divides a^{n+1}, so every member's bundle
pulls back trivially to the affine quadric; distinct spans of the rows give
pairwise non-isomorphic bundles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from bundlelab.errors import CertificationFailed, PreconditionError, SamplingExhausted, ValidationError
from bundlelab.exact import rref_rows
from bundlelab.parallel import parallel_map
from bundlelab.poly import Form, GradedRing, monomial_basis
from bundlelab.rows import HomogeneousRow, is_unimodular, row_bundle
from bundlelab.sheaf import e_invariant, pullback_verdicts

DEFAULT_BOX = 5
RETRY_CAP = 1000


def _primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def admissible_degree(n: int, a: int) -> bool:
    """True iff every prime p <= n divides a."""
    if n < 1 or a < 1:
        raise ValueError("n and a must be positive")
    ok = all(a % p == 0 for p in _primes_upto(n))
    if ok:
        assert a ** (n + 1) % factorial(n) == 0
    return ok


@dataclass(frozen=True)
class FamilySpec:
    n: int
    a: int
    count: int
    seed: int
    box: int = DEFAULT_BOX

    def __post_init__(self):
        if self.n < 1 or self.a < 1 or self.count < 1 or self.box < 1:
            raise ValidationError("n, a, count and box must all be positive")

    def grassmannian_dimension(self) -> int:
        """dim Gr_{n+1}(degree-a forms) = (n+1)(C(n+a, n) - n - 1)."""
        return (self.n + 1) * (comb(self.n + self.a, self.n) - self.n - 1)


Signature = tuple[tuple[Fraction, ...], ...]


def span_signature(row: HomogeneousRow) -> Signature:
    """RREF of the coefficient matrix of the forms: a canonical point of the Grassmannian."""
    ring = row.ring
    d = row.forms[0].degree
    if any(f.degree != d for f in row.forms):
        raise ValidationError("span signature needs forms of equal degree")
    ncols = len(monomial_basis(ring, d))
    rows, _ = rref_rows([f.coefficient_vector() for f in row.forms], ncols)
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class FamilyMember:
    row: HomogeneousRow
    span_signature: Signature = field(compare=False)
    index: int = field(default=-1, compare=False)

    @classmethod
    def of(cls, row: HomogeneousRow, index: int = -1) -> FamilyMember:
        return cls(row, span_signature(row), index)


def _candidate(n: int, a: int, box: int, seed: int, counter: int):
    """Row drawn from sub-seed (seed, counter), or None when it has a common zero."""
    ring = GradedRing(n)
    mons = monomial_basis(ring, a)
    rng = np.random.default_rng([seed, counter])
    coeffs = rng.integers(-box, box + 1, size=(n + 1, len(mons)))
    forms = []
    for row in coeffs:
        terms = {m: Fraction(int(c)) for m, c in zip(mons, row) if c}
        if not terms:
            return None
        forms.append(Form(ring, terms, a))
    row = HomogeneousRow(ring, forms)
    if not is_unimodular(row):
        return None
    return row, span_signature(row)


def sample_family(spec: FamilySpec, *, jobs: int = 1, retry_cap: int = RETRY_CAP,
                  stats: dict | None = None) -> list[FamilyMember]:
    """Rejection-sample ``spec.count`` unimodular rows with pairwise distinct spans.

    Candidate ``c`` uses the sub-seed (seed, c); candidates are accepted in
    counter order, so the output does not depend on ``jobs``.
    """
    if not admissible_degree(spec.n, spec.a):
        raise PreconditionError(
            f"degree {spec.a} is not admissible for n = {spec.n}: every prime <= n must divide it")
    members: list[FamilyMember] = []
    seen: set = set()
    counter = 0
    rejected = 0
    batch = max(1, jobs) * 4
    while len(members) < spec.count:
        if counter - len(members) >= retry_cap:
            raise SamplingExhausted(
                f"{counter - len(members)} rejected candidates exceed the cap {retry_cap}")
        args = [(spec.n, spec.a, spec.box, spec.seed, c) for c in range(counter, counter + batch)]
        results = parallel_map(_candidate, args, jobs=jobs)
        for c, res in zip(range(counter, counter + batch), results):
            counter = c + 1
            if res is None:
                rejected += 1
            elif res[1] not in seen:
                seen.add(res[1])
                members.append(FamilyMember(res[0], res[1], c))
            if len(members) == spec.count:
                break
    if stats is not None:
        stats.update(candidates=counter, rejected_not_unimodular=rejected)
    return members


@dataclass(frozen=True)
class FamilyCertificate:
    n: int
    a: int
    size: int
    grassmannian_dimension: int
    checks: tuple[str, ...] = (
        "rank n and e = 1 for every member (indecomposable)",
        "pairwise distinct spans (pairwise non-isomorphic bundles)",
        "pullback to the affine quadric is trivial for every member",
    )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "size": self.size,
            "grassmannian_dimension": self.grassmannian_dimension,
            "checks": list(self.checks),
        }


def _member_checks(row: HomogeneousRow) -> tuple[bool, int | None, str | None]:
    if not is_unimodular(row):
        return False, None, None
    p = row_bundle(row)
    return True, e_invariant(p), pullback_verdicts(p).on_Y


def certify_family(members: list[FamilyMember], *, jobs: int = 1) -> FamilyCertificate:
    if not members:
        raise CertificationFailed("empty family", check="(i)")
    n = members[0].row.n
    a = members[0].row.degrees[0]
    for idx, m in enumerate(members):
        if m.row.n != n or set(m.row.degrees) != {a} or len(m.row) != n + 1:
            raise CertificationFailed(f"member {idx} does not share n = {n}, a = {a}",
                                      check="shape", members=(idx,))
    results = parallel_map(_member_checks, [(m.row,) for m in members], jobs=jobs)
    for idx, (unimodular, e, on_y) in enumerate(results):
        if not unimodular:
            raise CertificationFailed(f"member {idx} is not unimodular", check="(i)",
                                      members=(idx,))
        if e != 1:
            raise CertificationFailed(f"member {idx} has e = {e}", check="(i)", members=(idx,))
    first: dict = {}
    for idx, m in enumerate(members):
        sig = span_signature(m.row)
        if sig in first:
            raise CertificationFailed(f"members {first[sig]} and {idx} span the same space",
                                      check="(ii)", members=(first[sig], idx))
        first[sig] = idx
    for idx, (_, _, on_y) in enumerate(results):
        if on_y != "Trivial":
            raise CertificationFailed(f"member {idx} has pullback verdict {on_y} on the quadric",
                                      check="(iii)", members=(idx,))
    dim = (n + 1) * (comb(n + a, n) - n - 1)
    return FamilyCertificate(n, a, len(members), dim)


# --- persistence --------------------------------------------------------------

def _fraction_str(x: Fraction) -> str:
    return str(x)


def family_to_dict(spec: FamilySpec, members: list[FamilyMember]) -> dict:
    return {
        "spec": {"n": spec.n, "a": spec.a, "count": spec.count, "seed": spec.seed, "box": spec.box},
        "grassmannian_dimension": spec.grassmannian_dimension(),
        "members": [
            {
                "index": m.index,
                "forms": [str(f) for f in m.row.forms],
                "signature": [[_fraction_str(x) for x in r] for r in m.span_signature],
            }
            for m in members
        ],
    }


def dumps_family(spec: FamilySpec, members: list[FamilyMember]) -> str:
    return json.dumps(family_to_dict(spec, members), indent=2) + "\n"


def family_from_dict(doc: dict) -> tuple[FamilySpec, list[FamilyMember]]:
    """Inverse of :func:`family_to_dict`; every stored invariant is re-checked."""
    try:
        s = doc["spec"]
        spec = FamilySpec(int(s["n"]), int(s["a"]), int(s["count"]), int(s["seed"]),
                          int(s.get("box", DEFAULT_BOX)))
        raw = doc["members"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed family document: {exc}") from exc
    if len(raw) != spec.count:
        raise ValidationError(f"document lists {len(raw)} members, spec says {spec.count}")
    members = []
    for idx, rec in enumerate(raw):
        row = HomogeneousRow.parse(spec.n, rec["forms"])
        if len(row) != spec.n + 1 or set(row.degrees) != {spec.a}:
            raise ValidationError(f"member {idx} does not consist of {spec.n + 1} forms of degree {spec.a}")
        if not is_unimodular(row):
            raise ValidationError(f"member {idx} is not unimodular")
        sig = span_signature(row)
        stored = tuple(tuple(Fraction(x) for x in r) for r in rec["signature"])
        if stored != sig:
            raise ValidationError(f"member {idx}: stored signature does not match its forms")
        members.append(FamilyMember(row, sig, int(rec.get("index", -1))))
    if len({m.span_signature for m in members}) != len(members):
        raise ValidationError("two members share a span")
    return spec, members


def loads_family(text: str) -> tuple[FamilySpec, list[FamilyMember]]:
    return family_from_dict(json.loads(text))
