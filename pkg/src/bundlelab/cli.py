"""The ``bundlelab`` command line.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 resource limit hit.
With ``--json`` every invocation prints exactly one JSON document.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from bundlelab import families, groebner, rows, sheaf
from bundlelab.errors import ResourceLimit, ValidationError
from bundlelab.poly import GradedRing, parse_form, parse_polynomial


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # every option is long, so "-x0 + x1" or "-5:3" is always a value
        self._negative_number_matcher = re.compile(r"^-[^-]")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(args, text: str, doc) -> None:
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc.strerror}") from exc


def _json_doc(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{what} must be a JSON object")
    return doc


def _parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", text)
    if not m:
        raise UsageError(f"--range expects LO:HI, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise UsageError(f"--range is empty: {lo} > {hi}")
    return lo, hi


# --- ideal ----------------------------------------------------------------------

def cmd_ideal(args) -> None:
    ring = GradedRing(args.n)
    if args.action == "empty":
        forms = [parse_form(s, ring) for s in args.forms]
        empty = groebner.projective_zero_locus_empty(forms, ring)
        _emit(args, "empty" if empty else "nonempty", {"empty": empty})
        return
    polys = [parse_polynomial(s, ring) for s in args.forms]
    if args.action == "gb":
        gb = groebner.buchberger(polys, ring)
        strs = [str(p) for p in gb.elements]
        _emit(args, "\n".join(strs), {"basis": strs})
    elif args.action == "nf":
        if args.poly is None:
            raise UsageError("ideal nf needs --poly")
        gb = groebner.buchberger(polys, ring)
        r = groebner.normal_form(parse_polynomial(args.poly, ring), gb)
        _emit(args, str(r), {"normal_form": str(r)})
    elif args.action == "qdim":
        d = groebner.affine_quotient_dimension(polys, ring)
        finite = d != groebner.INFINITE
        _emit(args, str(d) if finite else "infinite", {"dimension": d if finite else None})


# --- bundle ---------------------------------------------------------------------

def _presentation(args) -> sheaf.BundlePresentation:
    doc = _json_doc(_read(args.file), args.file)
    return sheaf.validate_presentation(sheaf.graded_map_from_dict(doc))


def cmd_bundle(args) -> None:
    p = _presentation(args)
    act = args.action
    if act == "validate":
        _emit(args, f"valid: rank {p.rank} ({p.witness})",
              {"valid": True, "rank": p.rank, "witness": p.witness})
    elif act == "cohomology":
        k_range = _parse_range(args.range) if args.range else None
        table = sheaf.cohomology_table(p, k_range, jobs=args.jobs)
        _emit(args, table.format(), table.to_dict())
    elif act == "e":
        e = sheaf.e_invariant(p)
        _emit(args, str(e), {"e": e})
    elif act == "split":
        tw = sheaf.horrocks_split(p)
        text = "not split" if tw is None else " ".join(f"O({t})" for t in tw)
        _emit(args, text, {"split": None if tw is None else list(tw)})
    elif act == "resolve":
        steps = sheaf.syzygy_resolution(p)
        lines = [f"E_{i}: " + " ".join(f"O({t})" for t in s) for i, s in enumerate(steps, 1)]
        _emit(args, "\n".join(lines), {"steps": [list(s) for s in steps]})
    elif act == "complexity":
        s = sheaf.complexity(p)
        _emit(args, str(s), {"complexity": s})
    elif act == "verdict":
        v = sheaf.pullback_verdicts(p)
        cert = sheaf.indecomposability_certificate(p)
        lines = [f"e: {v.e}", f"on_X: {v.on_X} [{v.citations['on_X']}]",
                 f"on_Y: {v.on_Y_label()} [{v.citations['on_Y']}]"]
        if v.row_degrees:
            lines.append("row degrees: " + " ".join(map(str, v.row_degrees)))
        lines.append("indecomposable: " + ("yes (rank n, e = 1)" if cert else "not certified"))
        doc = v.to_dict()
        doc["indecomposable"] = cert is not None
        _emit(args, "\n".join(lines), doc)


# --- row ------------------------------------------------------------------------

def _row(args) -> rows.HomogeneousRow:
    if args.file:
        if args.forms or args.n is not None:
            raise UsageError("give either --file or --n with forms, not both")
        return rows.HomogeneousRow.from_dict(_json_doc(_read(args.file), args.file))
    if args.n is None or not args.forms:
        raise UsageError("give --n N followed by the forms, or --file")
    return rows.HomogeneousRow.parse(args.n, args.forms)


def _point(text: str) -> list[Fraction]:
    try:
        return [Fraction(s.strip()) for s in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--at expects comma-separated rationals, got {text!r}") from exc


def cmd_row(args) -> None:
    row = _row(args)
    act = args.action
    if act == "check":
        u = rows.is_unimodular(row)
        _emit(args, "unimodular" if u else "not unimodular", {"unimodular": u})
    elif act == "complete":
        v = rows.completability(row)
        _emit(args, str(v), v.to_dict())
    elif act == "degree":
        d = rows.map_degree(row)
        _emit(args, str(d), {"degree": d})
    elif act == "fiber":
        if args.at is None:
            raise UsageError("row fiber needs --at a0,a1,...")
        d = rows.fiber_dimension(row, _point(args.at))
        _emit(args, str(d), {"fiber_dimension": d, "degree": rows.map_degree(row)})
    elif act == "bundle":
        p = rows.row_bundle(row)
        if args.out:
            _write(args.out, p.dumps())
            _emit(args, f"wrote {args.out}", {"written": args.out, "presentation": p.to_dict()})
        else:
            _emit(args, p.dumps().rstrip("\n"), {"presentation": p.to_dict()})
    elif act == "reduce":
        out = rows.reduce_generators(list(row.forms), seed=args.seed, budget=args.budget)
        strs = [str(f) for f in out]
        _emit(args, "\n".join(strs), {"forms": strs})


# --- family -----------------------------------------------------------------------

def _family_summary(spec, members) -> list[str]:
    lines = [f"n = {spec.n}, a = {spec.a}, seed = {spec.seed}, box = {spec.box}, "
             f"{len(members)} members",
             f"dim Gr = {spec.grassmannian_dimension()}"]
    for m in members:
        lines.append(f"[{m.index}] " + ", ".join(str(f) for f in m.row.forms))
    return lines


def cmd_family(args) -> None:
    if args.action == "gen":
        for flag in ("n", "a", "count"):
            if getattr(args, flag) is None:
                raise UsageError(f"family gen needs --{flag}")
        spec = families.FamilySpec(args.n, args.a, args.count, args.seed, args.box)
        members = families.sample_family(spec, jobs=args.jobs)
        text = families.dumps_family(spec, members)
        if args.out:
            _write(args.out, text)
            _emit(args, "\n".join([f"wrote {args.out}"] + _family_summary(spec, members)),
                  families.family_to_dict(spec, members))
        else:
            _emit(args, text.rstrip("\n"), families.family_to_dict(spec, members))
        return
    if not args.file:
        raise UsageError(f"family {args.action} needs --file")
    spec, members = families.loads_family(_read(args.file))
    if args.action == "show":
        _emit(args, "\n".join(_family_summary(spec, members)),
              families.family_to_dict(spec, members))
    elif args.action == "certify":
        cert = families.certify_family(members, jobs=args.jobs)
        lines = [f"certified: {cert.size} members, n = {cert.n}, a = {cert.a}"]
        lines += [f"  - {c}" for c in cert.checks]
        _emit(args, "\n".join(lines), {"certified": True, **cert.to_dict()})


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; the
    # subcommand copies must not overwrite a value given earlier
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit one JSON document")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes (output does not depend on it)")

    parser = _Parser(prog="bundlelab",
                     description="Vector bundles on P^n, unimodular rows and families.",
                     epilog="Forms are written like '2*x0^2 - 1/3*x1*x2'; the zero form "
                            "of degree d is '0@d'.")
    parser.add_argument("--json", action="store_true", help="emit one JSON document")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes (output does not depend on it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ideal", parents=[common], help="Groebner bases and zero loci")
    p.add_argument("action", choices=["gb", "nf", "empty", "qdim"])
    p.add_argument("--n", type=int, required=True, help="projective dimension")
    p.add_argument("--poly", help="polynomial to reduce (nf)")
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("bundle", parents=[common], help="bundles given by a presentation file")
    p.add_argument("action", choices=["validate", "cohomology", "e", "split", "resolve",
                                      "complexity", "verdict"])
    p.add_argument("--file", required=True, help="presentation file (JSON)")
    p.add_argument("--range", help="twist window LO:HI for cohomology")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("row", parents=[common], help="homogeneous unimodular rows")
    p.add_argument("action", choices=["check", "complete", "degree", "fiber", "bundle", "reduce"])
    p.add_argument("--n", type=int, help="projective dimension")
    p.add_argument("--file", help="row file (JSON)")
    p.add_argument("--at", help="point a0,a1,... for fiber")
    p.add_argument("--out", help="write the presentation here (bundle)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=rows.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_row)

    p = sub.add_parser("family", parents=[common], help="families with trivial pullback")
    p.add_argument("action", choices=["gen", "certify", "show"])
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=int, default=families.DEFAULT_BOX,
                   help="coefficients are drawn from [-box, box]")
    p.add_argument("--file", help="family file (JSON)")
    p.add_argument("--out", help="write the family here (gen)")
    p.set_defaults(func=cmd_family)
    return parser


def _take_forms(args, extra: list[str]) -> None:
    """Forms are the leftover positionals; they may sit anywhere among the options."""
    bad = [t for t in extra if t.startswith("--")]
    if bad:
        raise UsageError(f"unrecognized arguments: {' '.join(bad)}")
    if args.command in ("ideal", "row"):
        args.forms = extra
        if args.command == "ideal" and not extra:
            raise UsageError("ideal needs at least one polynomial")
    elif extra:
        raise UsageError(f"unrecognized arguments: {' '.join(extra)}")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    want_json = "--json" in argv
    try:
        args, extra = build_parser().parse_known_args(argv)
        _take_forms(args, extra)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        args.func(args)
        return 0
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except UsageError as exc:
        return _fail(want_json, "UsageError", str(exc), 1)
    except ValidationError as exc:
        return _fail(want_json, type(exc).__name__, str(exc), 2)
    except ResourceLimit as exc:
        return _fail(want_json, type(exc).__name__, str(exc), 3)


def _fail(want_json: bool, kind: str, message: str, code: int) -> int:
    if want_json:
        print(json.dumps({"error": {"type": kind, "message": message, "exit_code": code}},
                         sort_keys=True))
    print(f"error: {kind}: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
