"""Command-line front end: generate, exhaust, validate, curve-check.

Exit codes: 0 success, 1 a check failed, 2 precondition failure,
3 iteration limit reached, 4 search budget exceeded, 5 unreadable record,
6 nothing found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import arith
from .cm import CMType, ImprimitiveTypeError, UnsupportedFieldError, parse_cm_type, parse_field_spec, reflex
from .jacobian import order_check_details, parse_curve, twist_search
from .numfield import FieldElement, RamifiedPrimeError
from .weilgen import (
    BudgetExceeded,
    MaxItersExceeded,
    PreconditionError,
    WeilNumber,
    construct_pi,
    exhaustive_search,
    group_order,
    rho,
    rho_bound,
    validate_weil,
)

EXIT_OK, EXIT_FAILED, EXIT_PRECONDITION, EXIT_MAX_ITERS, EXIT_BUDGET, EXIT_PARSE, EXIT_NOT_FOUND = 0, 1, 2, 3, 4, 5, 6

_PRECONDITION_ERRORS = (PreconditionError, RamifiedPrimeError, UnsupportedFieldError, ImprimitiveTypeError)


def parse_factors(text: str | None) -> dict[int, int] | None:
    """``"2^2,3,5^3"`` -> {2: 2, 3: 1, 5: 3}."""
    if not text:
        return None
    out: dict[int, int] = {}
    for part in text.split(","):
        p, _, e = part.strip().partition("^")
        out[int(p)] = out.get(int(p), 0) + (int(e) if e else 1)
    return out


def weil_record(w: WeilNumber, seed=None) -> dict:
    spec = w.cm_type.spec
    return {
        "field": spec.spec_string(),
        "defining_polynomial": list(spec.field.poly),
        "cm_type": w.cm_type.labels,
        "q": str(w.q),
        "pi": {"coords": [str(c) for c in w.pi.num], "denominator": str(w.pi.den)},
        "group_order": str(w.group_order),
        "rho": round(w.rho, 6),
        "k": w.k,
        "r": str(w.r),
        "flags": dict(w.flags),
        "seed": seed,
        "iterations": w.iterations,
        "xi": [str(c) for c in w.xi.num],
    }


def record_to_weil(rec: dict) -> WeilNumber:
    """Rebuild a WeilNumber from a record; raises ValueError/KeyError/TypeError on bad input."""
    spec = parse_field_spec(rec["field"])
    if list(spec.field.poly) != [int(c) for c in rec["defining_polynomial"]]:
        raise ValueError("defining polynomial does not match the field")
    t = CMType(spec, frozenset(int(x) for x in rec["cm_type"]))
    pi = spec.field.element([int(c) for c in rec["pi"]["coords"]], int(rec["pi"].get("denominator", 1)))
    q, r, k = int(rec["q"]), int(rec["r"]), int(rec["k"])
    H = reflex(t).reflex_field
    xi = FieldElement(H.field, tuple(int(c) for c in rec.get("xi", [0] * H.degree)), 1)
    try:
        order = group_order(pi)
    except ValueError:
        order = 0
    rv = rho(spec.g, q, r) if q > 1 and r > 1 else 0.0
    return WeilNumber(pi, q, r, k, order, rv, dict(rec.get("flags", {})), xi, t, None, int(rec.get("iterations", 0)))


def _emit_rows(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(rows[0] if len(rows) == 1 else rows, indent=2) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        flat = [{k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in row.items()} for row in rows]
        writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        out.write(buf.getvalue())
    else:
        for row in rows:
            for key, val in row.items():
                out.write(f"{key}: {val}\n")


def _setup(args):
    spec = parse_field_spec(args.field)
    t = parse_cm_type(spec, args.cm_type)
    r = arith.parse_int(args.r)
    return spec, t, r


def cmd_generate(args, out) -> int:
    spec, t, r = _setup(args)
    factors = parse_factors(args.r_minus_one_factors)
    if factors is not None and _product(factors) != r - 1:
        raise PreconditionError("--r-minus-one-factors does not multiply to r - 1")
    w = construct_pi(t, args.k, r, args.seed, args.max_iters, threads=args.threads, r_minus_one_factors=factors)
    rec = weil_record(w, args.seed)
    rec["rho_bound"] = round(rho_bound(reflex(t), r), 6)
    _emit_rows([rec], args.format, out)
    return EXIT_OK


def _product(factors: dict[int, int]) -> int:
    n = 1
    for p, e in factors.items():
        n *= p**e
    return n


def cmd_exhaust(args, out) -> int:
    spec, t, r = _setup(args)
    rep = exhaustive_search(t, args.k, r, reference_root=args.reference_root, all_zetas=args.all_zetas,
                            budget=args.budget)
    winners = [weil_record(w) for w in rep.winners]
    if args.format == "csv":
        out.write(f"# prime_count={rep.prime_count}\n# min_q={rep.min_q}\n")
        out.write(f"# final_check_failures={rep.final_check_failures}\n# candidates={rep.candidates}\n")
        if winners:
            w = winners[0]
            out.write(f"# winner_group_order={w['group_order']}\n# winner_rho={w['rho']}\n")
        out.write("bin_start,count\n")
        for start, count in rep.rho_histogram:
            out.write(f"{start:.2f},{count}\n")
    else:
        doc = {
            "field": spec.spec_string(),
            "cm_type": t.labels,
            "r": str(r),
            "k": args.k,
            "reference_root": rep.reference_root,
            "zetas": list(rep.zetas),
            "candidates": rep.candidates,
            "prime_count": rep.prime_count,
            "min_q": None if rep.min_q is None else str(rep.min_q),
            "final_check_failures": rep.final_check_failures,
            "winners": winners,
            "rho_histogram": [{"bin_start": s, "count": c} for s, c in rep.rho_histogram],
        }
        if args.format == "json":
            out.write(json.dumps(doc, indent=2) + "\n")
        else:
            for key in ("field", "r", "k", "prime_count", "min_q", "final_check_failures"):
                out.write(f"{key}: {doc[key]}\n")
            for w in winners:
                out.write(f"winner: q={w['q']} group_order={w['group_order']} rho={w['rho']}\n")
    return EXIT_OK if rep.min_q is not None else EXIT_NOT_FOUND


def cmd_validate(args, out) -> int:
    try:
        text = sys.stdin.read() if args.record == "-" else open(args.record).read()
        w = record_to_weil(json.loads(text))
    except (OSError, ValueError, KeyError, TypeError, UnsupportedFieldError) as exc:
        print(f"error: cannot read record: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep = validate_weil(w)
    _emit_rows([{**rep.checks, "passed": rep.passed}], args.format, out)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_curve_check(args, out) -> int:
    rng = random.Random(args.seed)
    N = arith.parse_int(args.order)
    if args.twist_p is not None:
        q = arith.parse_int(args.q)
        a = twist_search(args.twist_p, N, q, args.a_bound, rng, args.trials)
        row = {"p": args.twist_p, "q": str(q), "order": str(N), "a": a}
        _emit_rows([row], args.format, out)
        return EXIT_OK if a is not None else EXIT_NOT_FOUND
    if not args.curve:
        raise PreconditionError("curve-check needs --curve or --twist-p")
    curve = parse_curve(args.curve)
    res = order_check_details(curve, N, args.trials, rng)
    row = {
        "curve": str(curve),
        "order": str(N),
        "passed": res.passed,
        "within_weil_bounds": res.within_weil_bounds,
        "trials": res.annihilated,
        "cofactor_witnesses": {str(k): v for k, v in res.cofactor_primes.items()},
    }
    _emit_rows([row], args.format, out)
    return EXIT_OK if res.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmweil", description="Abelian varieties with prescribed embedding degree.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        if field:
            p.add_argument("--field", required=True, help="cyclotomic:<m> or quartic:<a>,<b>,<d>")
            p.add_argument("--cm-type", default="auto", help="comma-separated embedding labels or 'auto'")
            p.add_argument("--r", required=True, help="prime subgroup order; decimal or 2^e+c / 2^e-c")
            p.add_argument("--k", type=int, required=True, help="embedding degree")

    g = sub.add_parser("generate", help="randomized construction of a Weil number")
    common(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--max-iters", type=int, default=None)
    g.add_argument("--r-minus-one-factors", default=None, help="factorization of r-1, e.g. 2^2,3,1021")

    e = sub.add_parser("exhaust", help="enumerate every residue assignment for small r")
    common(e)
    e.add_argument("--reference-root", type=int, default=None)
    e.add_argument("--all-zetas", action="store_true", help="enumerate every primitive k-th root of unity")
    e.add_argument("--budget", type=int, default=5 * 10**7)

    v = sub.add_parser("validate", help="re-run all checks on a generated record")
    common(v, field=False)
    v.add_argument("record", help="JSON record file, or - for stdin")

    c = sub.add_parser("curve-check", help="probabilistic Jacobian order check or twist search")
    common(c, field=False)
    c.add_argument("--curve", help="hyperelliptic:<q>:<f coefficients low to high>")
    c.add_argument("--order", required=True)
    c.add_argument("--trials", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--twist-p", type=int, default=None, help="search twists y^2 = x^p + a")
    c.add_argument("--q", default=None)
    c.add_argument("--a-bound", type=int, default=100)
    return parser


_COMMANDS = {"generate": cmd_generate, "exhaust": cmd_exhaust, "validate": cmd_validate, "curve-check": cmd_curve_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_PRECONDITION
    out = io.StringIO()
    try:
        code = _COMMANDS[args.command](args, out)
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MaxItersExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MAX_ITERS
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    # output only after success, so error paths never leave partial records
    sys.stdout.write(out.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
