"""Command line: validate, discover, reidemeister, survey.

Each command reads one JSON document (file path or '-' for stdin), writes one
JSON document to stdout and a short summary to stderr.
Exit codes: 0 ok, 2 invalid input, 3 inconsistency, 4 search bound exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter

from . import __version__
from .automorphisms import AutomorphismSpec, characteristic_subgroup, enumerate_automorphisms, validate_automorphism
from .errors import CounterexampleFound, InvalidInput, SolError
from .groups import (
    Family,
    GroupSpec,
    bieberbach_rule,
    check_relations,
    discover,
    parameter_space,
    torsion_element,
    validate_spec,
)
from .lattice import IntMat2
from .oracle import check_infinity_certificate, finite_quotient_count, window_class_count
from .reidemeister import INFINITY, reidemeister

R_INFINITY_FAMILIES = {Family.PI2_MINUS, Family.PI3, Family.PI4, Family.PI5, Family.PI7, Family.PI8}


def _read(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from None


def _split(doc):
    """Accept either a bare group spec or {"group": ..., "automorphism": ...}."""
    if isinstance(doc, dict) and "group" in doc:
        aut = doc.get("automorphism")
        return GroupSpec.from_json(doc["group"]), None if aut is None else AutomorphismSpec.from_json(aut)
    return GroupSpec.from_json(doc), None


def _quotient_json(q):
    return {
        "invariant_factors": list(q.invariant_factors),
        "rank_deficiency": q.rank_deficiency,
        "basis": [list(b) for b in q.basis],
        "coset_reps": [list(r) for r in q.coset_reps],
    }


def cmd_validate(doc, args):
    spec, aut = _split(doc)
    spec = validate_spec(spec)
    tor = torsion_element(spec)
    ch = characteristic_subgroup(spec)
    out = {
        "spec": spec.to_json(),
        "parameter_space": {k: _quotient_json(q) for k, q in parameter_space(spec).items()},
        "relations_hold": not check_relations(spec),
        "bieberbach": tor is None,
        "bieberbach_rule": bieberbach_rule(spec),
        "torsion_witness": None if tor is None else tor.to_json(),
        "characteristic_subgroup": {
            "generators": {n: g.to_json() for n, g in ch.generators},
            "index": ch.index,
            "matrix": ch.lattice_matrix.to_list(),
        },
    }
    summary = f"{spec.family.value}: valid, bieberbach={tor is None}"
    if aut is not None:
        aut = validate_automorphism(spec, aut)
        out["automorphism"] = {**aut.to_json(), "lattice_part": aut.lattice_part.to_json(), "type": aut.type_tag}
        summary += f", automorphism of type {aut.type_tag}"
    return out, summary


def cmd_discover(doc, args):
    raw = doc.get("A") if isinstance(doc, dict) else doc
    try:
        a = IntMat2.from_list(raw)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"expected a matrix as 4 integers: {exc}") from None
    out = discover(a, args.entry_bound)
    fams = ", ".join(f["family"] for f in out["constructible"])
    return out, f"constructible: {fams}"


def _window(arg):
    try:
        xb, zb = (int(s) for s in arg.split(","))
    except ValueError:
        raise InvalidInput(f"--window expects 'X,Z', got {arg!r}") from None
    return xb, zb


def cmd_reidemeister(doc, args):
    spec, aut = _split(doc)
    if aut is None:
        raise InvalidInput("reidemeister needs {'group': ..., 'automorphism': ...}")
    spec = validate_spec(spec)
    aut = validate_automorphism(spec, aut)
    v = reidemeister(spec, aut)
    out = {"spec": spec.to_json(), "automorphism": aut.to_json(), "verdict": v.to_json()}
    if not v.is_finite:
        out["certificate_checked"] = check_infinity_certificate(v.certificate, spec, aut)
    if args.oracle:
        xb, zb = _window(args.window)
        oracle = {"window": window_class_count(spec, aut, xb, zb).to_json()}
        consistent = True
        if spec.family in (Family.GAMMA_A, Family.PI1):
            q = finite_quotient_count(spec, aut, args.n)
            oracle["finite_quotient"] = {"n": args.n, "count": q}
            # quotient counts bound R from below
            consistent = not v.is_finite or q <= v.count
        oracle["consistent"] = consistent
        out["oracle"] = oracle
        if not consistent:
            raise CounterexampleFound(f"quotient oracle found {q} classes but the closed form gives {v.count}")
    r = v.count if v.is_finite else INFINITY
    return out, f"{spec.family.value}: type {v.type_tag}, R = {r} ({v.rule})"


def cmd_survey(doc, args):
    spec, _ = _split(doc)
    spec = validate_spec(spec)
    rows, hist = [], Counter()
    for aut in enumerate_automorphisms(spec, args.entry_bound, args.translation_bound):
        v = reidemeister(spec, aut)
        r = v.count if v.is_finite else INFINITY
        if not v.is_finite:
            check_infinity_certificate(v.certificate, spec, aut)
        hist[(aut.type_tag, aut.F.det(), str(r))] += 1
        rows.append({"automorphism": aut.to_json(), "type": aut.type_tag, "det_F": aut.F.det(), "R": r})
    finite = [row for row in rows if row["R"] != INFINITY]
    out = {
        "spec": spec.to_json(),
        "entry_bound": args.entry_bound,
        "translation_bound": args.translation_bound,
        "automorphisms": len(rows),
        "histogram": [
            {"type": t, "det_F": d, "R": int(r) if r != INFINITY else r, "count": c}
            for (t, d, r), c in sorted(hist.items())
        ],
        "entries": rows,
    }
    if spec.family in R_INFINITY_FAMILIES:
        out["all_infinite"] = not finite
        if finite:
            raise CounterexampleFound(f"{len(finite)} automorphisms with finite R in an R-infinity family")
    return out, f"{spec.family.value}: {len(rows)} automorphisms, {len(finite)} with finite R"


COMMANDS = {
    "validate": cmd_validate,
    "discover": cmd_discover,
    "reidemeister": cmd_reidemeister,
    "survey": cmd_survey,
}


def build_parser():
    p = argparse.ArgumentParser(prog="sol-reidemeister", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("input", nargs="?", default="-", help="JSON file, or - for stdin")
        s.add_argument("--quiet", action="store_true", help="no summary on stderr")
        s.add_argument("--timing", action="store_true", help="include wall time in the report")
        s.add_argument("--entry-bound", type=int, default=3)
        s.add_argument("--translation-bound", type=int, default=3)
        s.add_argument("--n", type=int, default=2, help="modulus for the finite-quotient oracle")
        s.add_argument("--window", default="6,3", help="window radii X,Z for the union-find oracle")
        s.add_argument("--oracle", action="store_true", help="cross-check with the oracles")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = {"command": args.command, "tool_version": __version__}
    code = 0
    try:
        doc = _read(args.input)
        report["input"] = doc
        results, summary = COMMANDS[args.command](doc, args)
        report["results"] = results
    except SolError as exc:
        code = exc.exit_code
        report["error"] = {"kind": exc.kind, "message": str(exc)}
        summary = f"error ({exc.kind}): {exc}"
    elapsed = time.perf_counter() - start
    if args.timing:
        report["timing"] = {"seconds": round(elapsed, 3)}
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    if not args.quiet:
        print(f"{summary} [{elapsed:.2f}s]", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
