"""Command-line entry point: verbdyn <subcommand> [flags]."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import arith
from .dynsys import INF, ScanReport
from .gf import GF, FieldError, is_prime_power, parse_field
from .words import WordError, parse

GRAMMAR = """\
word grammar: letters x, y, u (generators 1..3), exponents x^-2, products by
juxtaposition, brackets [a, b] for commutators, parentheses for grouping.
field elements: integers mod p, '#n' for the n-th packed element, or for
q = p^k a polynomial in z of degree < k such as 2z^2+z+1.
fields: --q 7, --q 2^3, lists --q 5,7,8 or ranges --q-range 4..49."""


class UsageError(ValueError):
    pass


# report output

def emit_report(report, fmt: str = "json", path: str | None = None, header: dict | None = None) -> str:
    """Serialise a ScanReport or a plain dict; write to path (or return text for stdout)."""
    if fmt not in ("json", "csv"):
        raise UsageError(f"unknown format {fmt!r}")
    if isinstance(report, ScanReport):
        if fmt == "csv":
            text = report.to_csv()
        else:
            d = report.to_dict()
            if header is not None:
                d = {"header": header, **d}
            text = json.dumps(d, indent=2) + "\n"
    else:
        if fmt == "csv":
            raise UsageError("csv output is only available for scan reports")
        d = dict(report)
        if header is not None:
            d = {"header": header, **d}
        text = json.dumps(d, indent=2, default=_default) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _default(o):
    if o == INF:
        return "inf"
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    return str(o)


# argument helpers

def parse_q_list(text: str) -> list[int]:
    qs = []
    for v in text.split(","):
        if v.strip():
            try:
                qs.append(parse_field(v).q)
            except (FieldError, ValueError):
                raise UsageError(f"bad field size {v.strip()!r} in --q") from None
    return qs


def parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a..b") from None


def q_values(args) -> list[int] | None:
    if getattr(args, "q_range", None):
        a, b = parse_range(args.q_range)
        return [q for q in range(max(a, 2), b + 1) if is_prime_power(q)]
    if getattr(args, "q", None):
        return parse_q_list(args.q)
    return None


def read_config(path: str) -> dict[str, str]:
    """Flat key = value file; '#' starts a comment; keys are flag names without dashes."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip().replace("_", "-")] = v.strip()
    return out


def config_argv(cfg: dict[str, str]) -> list[str]:
    argv = []
    for k, v in cfg.items():
        if k in ("subcommand", "config"):
            continue
        if v.lower() in ("true", "yes"):
            argv.append(f"--{k}")
        elif v.lower() in ("false", "no"):
            continue
        else:
            argv += [f"--{k}", v]
    return argv


# subcommands

def cmd_trace_poly(args) -> tuple[dict, int]:
    from .tracepoly import trace_of_word

    w = parse(args.word, args.gens)
    poly = trace_of_word(w)
    if args.format == "json":
        return {"word": args.word, "gens": args.gens, "trace": str(poly)}, 0
    print(str(poly))
    return None, 0


def cmd_fiber(args) -> tuple[dict, int]:
    from .fiber import fiber2, fiber3
    from .sl2 import SL2, on_Z

    qs = parse_q_list(args.q)
    if len(qs) != 1:
        raise UsageError("fiber needs a single --q")
    F = GF(qs[0])
    try:
        pt = tuple(F.parse_element(v.strip()) for v in args.triple.split(","))
    except (FieldError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    G = SL2(F)
    if len(pt) == 3:
        x, y = fiber2(F, pt)
        back = tuple(G.pi2(x, y))
        mats = {"x": G.render(x), "y": G.render(y)}
    elif len(pt) == 7:
        if not on_Z(F, pt):
            raise UsageError("point is not on the hypersurface")
        x, u, y = fiber3(F, pt)
        back = tuple(G.pi3(x, u, y))
        mats = {"x": G.render(x), "u": G.render(u), "y": G.render(y)}
    else:
        raise UsageError("--triple takes 3 or 7 field elements")
    ok = back == pt
    rep = {"q": F.q, "point": [F.render(v) for v in pt], **mats,
           "round_trip": [F.render(v) for v in back], "ok": ok}
    if args.format == "csv":
        raise UsageError("fiber output is json")
    return rep, 0 if ok else 1


def _scan_family(args) -> ScanReport:
    fam = args.family
    lo = args.p_min
    primes = [p for p in arith.primes_upto(args.p_max) if p >= lo]
    if fam == "torus":
        residue = None if args.residue == "none" else tuple(int(v) for v in args.residue.split(","))
        rep = arith.torus_scan(args.d, args.p_max, residue)
        rep.entries = [e for e in rep.entries if e[0] >= lo]
        return rep
    if fam == "split-field":
        return arith.poly_map_scan(arith.split_field_map(args.a, args.b), primes, label=f"split field a={args.a} b={args.b}")
    if fam == "fibred":
        return arith.poly_map_scan(arith.fibred_example_map(), primes, arith.fibred_example_forbidden,
                                   label="fibred (a, b) -> (a^2 b, b)")
    if fam == "poly":
        if not args.coeffs:
            raise UsageError("--family poly needs --coeffs c0,c1,...")
        H = arith.AffinePolyMap(1, (arith.univariate([int(v) for v in args.coeffs.split(",")]),))
        return arith.poly_map_scan(H, primes, label=f"x -> poly {args.coeffs}")
    if fam == "elliptic":
        E = arith.parse_curve(args.curve)
        ps = [p for p in primes if p > 3 and E.good(p)]
        from .dynsys import scan
        return scan(lambda p: arith.ec_dyn_system(E, args.d, p), ps, f"[{args.d}] on y^2 = x^3 + {E.a}x + {E.b}")
    raise UsageError(f"unknown family {fam!r}")


def cmd_scan(args):
    rep = _scan_family(args)
    return rep, 1 if rep.errors else 0


def cmd_torus(args):
    residue = None if args.residue == "none" else tuple(int(v) for v in args.residue.split(","))
    rep = arith.torus_scan(args.d, args.p_max, residue)
    bad = [p for p, r, _ in rep.entries if r is None or r.ell != arith.torus_a_p(args.d, p)]
    finite = {int(r.ell) for _, r, _ in rep.entries if r is not None and r.ell != INF}
    extra = {"prediction_mismatches": bad, "distinct_finite_values": len(finite)}
    return rep, extra, 1 if bad else 0


def cmd_elliptic(args):
    # each rule has its own default curve; --curve overrides both
    given = arith.parse_curve(args.curve) if args.curve else None
    E = given or arith.E0
    out: dict = {"curve": [E.a, E.b]}
    code = 0
    if args.p is not None:
        out["count"] = {"p": args.p, "points": arith.ec_count(E, args.p)}
    both = not (args.scan_divisibility or args.supersingular)
    if args.scan_divisibility or both:
        div = arith.e0_divisibility_scan(args.p_max, E)
        out["divisibility"] = {"checked": div.checked, "violations": div.violations[:20],
                               "c_values": sorted(div.c_values)}
        if div.violations:
            code = 1
    if args.supersingular or both:
        pm = args.p_max if args.supersingular else min(args.p_max, 2000)
        Ess = given or arith.CM_CURVE
        ss = arith.supersingular_scan(pm, Ess)
        out["supersingular"] = {"curve": [Ess.a, Ess.b], "p_max": pm, "exceptions": ss[:20]}
        if ss:
            code = 1
    if both:
        G = arith.matched_character_group()
        om = arith.omega(G)
        out["omega6"] = {"group": len(G), "omega": len(om), "equal": len(om) == len(G)}
        if len(om) != len(G):
            code = 1
    return out, code


def cmd_suzuki(args):
    from . import suzuki as sz

    G = sz.Suzuki(args.m)
    phi = parse(args.word, 2) if args.word else sz.bww_phi()
    props = sz.verify_properties(args.m, samples=args.samples, seed=args.seed)
    fam = sz.bww_family_check(args.m, phi)
    y = G.t_mat(0, 1)
    orb = sz.periodic_point_search(args.m, y, phi)
    code = 0
    res = {}
    for name, (ok, n, bad) in props.results.items():
        res[name] = {"passed": ok, "checked": n, "counterexample": bad}
        if not ok and name != "iii a+b":
            code = 1
    if fam["step1"] != fam["total"] or fam["step2"] != fam["total"]:
        code = 1
    if orb.witness is None:
        code = 1
    out = {"q": G.q, "properties": res, "product_rule": props.iii_reading,
           "family": {k: fam[k] for k in ("total", "step1", "step2")}, "orbit_scan": orb.to_dict()}
    return out, code


def cmd_casebook(args):
    from .casebook import CASES, run_case

    if args.all == bool(args.case):
        raise UsageError("casebook needs exactly one of --all or --case")
    names = list(CASES) if args.all else [args.case]
    qs = q_values(args)
    results = []
    for name in names:
        if name not in CASES:
            raise UsageError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
        results.append(run_case(name, qs, seed=args.seed))
    for r in results:
        print(r.summary() + f"  ({r.runtime:.1f}s)", file=sys.stderr)
    out = {"cases": [r.to_dict(timing=False) for r in results]}
    return out, 0 if all(r.passed for r in results) else 1


# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--config")

    p = argparse.ArgumentParser(prog="verbdyn", description="Verbal dynamical systems toolkit.",
                                epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("trace-poly", parents=[common], help="trace polynomial of a word")
    s.add_argument("--word", required=True)
    s.add_argument("--gens", type=int, choices=(2, 3), default=2)
    s.set_defaults(func=cmd_trace_poly)

    s = sub.add_parser("fiber", parents=[common], help="matrices with prescribed traces")
    s.add_argument("--q", required=True)
    s.add_argument("--triple", required=True, help="s,u,t or a1,a2,a3,a12,a13,a23,a123")
    s.set_defaults(func=cmd_fiber)

    s = sub.add_parser("scan", parents=[common], help="minimal admissible cycle lengths over primes")
    s.add_argument("--family", choices=("torus", "split-field", "fibred", "poly", "elliptic"), required=True)
    s.add_argument("--p-max", type=int, default=100)
    s.add_argument("--p-min", type=int, default=2)
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--a", type=int, default=2)
    s.add_argument("--b", type=int, default=3)
    s.add_argument("--coeffs")
    s.add_argument("--curve", default="75,125")
    s.add_argument("--residue", default="4,3")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("torus", parents=[common], help="t -> t^d against its closed-form prediction")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--p-max", type=int, default=2000)
    s.add_argument("--residue", default="4,3")
    s.set_defaults(func=cmd_torus)

    s = sub.add_parser("elliptic", parents=[common], help="point counts and divisibility scans")
    s.add_argument("--curve", help="a,b for y^2 = x^3 + a x + b (default 75,125; -1,0 for --supersingular)")
    s.add_argument("--p-max", type=int, default=10000)
    s.add_argument("--p", type=int)
    s.add_argument("--scan-divisibility", action="store_true")
    s.add_argument("--supersingular", action="store_true")
    s.set_defaults(func=cmd_elliptic)

    s = sub.add_parser("suzuki", parents=[common], help="Sz(2^(2m+1)) identities and orbit scan")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--word")
    s.add_argument("--samples", type=int, default=2000)
    s.set_defaults(func=cmd_suzuki)

    s = sub.add_parser("casebook", parents=[common], help="reproduce the worked examples")
    s.add_argument("--all", action="store_true")
    s.add_argument("--case")
    s.add_argument("--q")
    s.add_argument("--q-range")
    s.set_defaults(func=cmd_casebook)
    return p


def _usage(msg: str) -> int:
    print(f"verbdyn: error: {msg}\n\n{GRAMMAR}", file=sys.stderr)
    return 2


VALUE_FLAGS = ("--curve", "--triple", "--coeffs")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Allow '--curve -1,0': argparse would read -1,0 as a flag."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    # config values go in front of the explicit flags so that flags win
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            return _usage("--config needs a path")
        path = argv[i + 1]
        try:
            cfg = read_config(path)
        except (OSError, UsageError) as exc:
            return _usage(str(exc))
        if argv and not argv[0].startswith("-"):
            argv = [argv[0]] + config_argv(cfg) + argv[1:]
        elif "subcommand" in cfg:
            argv = [cfg["subcommand"]] + config_argv(cfg) + argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    header = {"subcommand": args.subcommand, "seed": args.seed,
              "config": {k: v for k, v in sorted(vars(args).items())
                         if k not in ("func", "out", "config", "format") and v is not None}}
    try:
        result = args.func(args)
    except (UsageError, WordError, FieldError) as exc:
        return _usage(str(exc))
    if len(result) == 3:
        report, extra, code = result
        header.update(extra)
    else:
        report, code = result
    if report is None:
        return code
    fmt = args.format or "json"
    try:
        text = emit_report(report, fmt, args.out, header)
    except UsageError as exc:
        return _usage(str(exc))
    except OSError as exc:
        print(f"verbdyn: {exc}", file=sys.stderr)
        return 1
    if not args.out:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
