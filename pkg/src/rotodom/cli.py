"""Command-line front end.

Every subcommand is deterministic given its flags; sampled suites take an
explicit --seed whose default is a fixed constant echoed in the output.
Exit status: 0 on success, 1 when a verification finds a counterexample or
mismatch, 2 on usage errors (nothing is printed to stdout in that case).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    DEFAULT_SEED,
    analyze_finite_depth,
    classify,
    enumerate_all,
    odometer_automorphism,
    oracle_crosscheck,
)
from .correspondence import conjugacy_check, decode_point, encode_point
from .dyadic import Dyadic
from .interval_maps import RotatedOdometer
from .permutations import Permutation
from .tree_automorphisms import (
    BoundaryPoint,
    apply_boundary,
    finite_depth,
    from_json,
    graft,
    to_json,
)


class UsageError(Exception):
    """A bad flag value; reported on stderr with exit status 2."""


def _parse_perm(text: str, size: int, flag: str = "--perm") -> Permutation:
    try:
        return Permutation.parse(text, size)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _parse_point(text: str, flag: str = "--point") -> Dyadic:
    try:
        return Dyadic.parse(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _parse_boundary(text: str, flag: str = "--point") -> BoundaryPoint:
    try:
        return BoundaryPoint.parse(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _load_automaton(path: str, flag: str = "--aut"):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path}: {exc.strerror}") from None
    try:
        return from_json(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _odometer(args) -> RotatedOdometer:
    if args.N < 1:
        raise UsageError("--N: must be >= 1")
    pi = _parse_perm(args.perm, 1 << args.N)
    return RotatedOdometer(args.N, pi)


def _interval_str(pair, human: bool) -> str:
    left, right = pair
    s = f"[{left}, {right})"
    if human:
        s += f" = [{left.decimal()}, {right.decimal()})"
    return s


def _print_report(report, fmt: str, out):
    if fmt == "structured":
        print(json.dumps(report.to_dict(), indent=2), file=out)
        return
    print(f"rotated odometer: N={report.N}, pi = {report.pi.cycle_string()}"
          f"  [images {report.pi.images_string()}]", file=out)
    print(f"root product: {report.root_product.cycle_string()}"
          f"  [images {report.root_product.images_string()}]", file=out)
    print(f"minimal part: |S| = {report.S_size}, measure {report.minimal_measure}", file=out)
    print(f"  cylinders: {', '.join(map(str, report.minimal_symbols))}", file=out)
    for pair in report.minimal_intervals:
        print(f"  {_interval_str(pair, True)}", file=out)
    if report.periodic:
        print("periodic parts:", file=out)
        for part in report.periodic:
            intervals = "  ".join(_interval_str(p, True) for p in part.intervals)
            print(f"  period {part.period}, measure {part.measure}: {intervals}", file=out)
    else:
        print("periodic parts: none (minimal on all of [0, 1))", file=out)
    print(f"verified: {'yes' if report.verified else 'no'}", file=out)


def cmd_analyze(args, out) -> int:
    od = _odometer(args)
    report = classify(od)
    max_period = max((p.period for p in report.periodic), default=0)
    level = args.level if args.level is not None else od.N + 2
    if level < od.N:
        raise UsageError(f"--level: must be at least N = {od.N}")
    bound = args.bound if args.bound is not None else max(64, 4 * max_period)
    mismatch = oracle_crosscheck(od, level, bound, report)
    report.verified = mismatch is None
    _print_report(report, args.format, out)
    if mismatch is not None:
        print(f"oracle mismatch: {mismatch}", file=out)
        return 1
    return 0


def cmd_orbit(args, out) -> int:
    if args.steps < 0:
        raise UsageError("--steps: must be >= 0")
    if args.aut:
        g = _load_automaton(args.aut)
        b = _parse_boundary(args.point)
        points = [b]
        for _ in range(args.steps):
            b = apply_boundary(g, b)
            points.append(b)
        if args.format == "structured":
            print(json.dumps({"orbit": [str(p) for p in points]}, indent=2), file=out)
        else:
            for k, p in enumerate(points):
                print(f"{k}: {p}", file=out)
        return 0
    od = _odometer(args)
    x = _parse_point(args.point)
    points = [x]
    for _ in range(args.steps):
        x = od.step(x)
        points.append(x)
    if args.format == "structured":
        print(json.dumps({"orbit": [str(p) for p in points]}, indent=2), file=out)
    else:
        for k, p in enumerate(points):
            print(f"{k}: {p} = {p.decimal()}", file=out)
    return 0


def cmd_verify(args, out) -> int:
    od = _odometer(args)
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    report = classify(od)
    max_period = max((p.period for p in report.periodic), default=0)
    level = args.level if args.level is not None else od.N + 2
    if level < od.N:
        raise UsageError(f"--level: must be at least N = {od.N}")
    bound = args.bound if args.bound is not None else max(64, 4 * max_period)

    import random

    rng = random.Random(seed)
    automorphism = odometer_automorphism(od)
    failures = []
    for _ in range(args.samples):
        exp = rng.randint(0, 20)
        x = Dyadic(rng.randrange(1 << exp), exp)
        bad = conjugacy_check(od, x, args.steps, args.depth, automorphism=automorphism)
        if bad is not None:
            failures.append((str(x), str(bad)))
    mismatch = oracle_crosscheck(od, level, bound, report)
    passed = not failures and mismatch is None
    summary = {
        "N": od.N,
        "pi": od.pi.images_string(),
        "seed": seed,
        "samples": args.samples,
        "steps": args.steps,
        "depth": args.depth,
        "conjugacy_failures": [{"point": p, "detail": d} for p, d in failures],
        "oracle_level": level,
        "oracle_bound": bound,
        "oracle": "pass" if mismatch is None else str(mismatch),
        "result": "pass" if passed else "fail",
    }
    if args.format == "structured":
        print(json.dumps(summary, indent=2), file=out)
    else:
        print(f"conjugacy: {args.samples} samples (seed {seed}), "
              f"{len(failures)} failures", file=out)
        for p, d in failures:
            print(f"  {p}: {d}", file=out)
        print(f"oracle crosscheck at K={level}, bound={bound}: {summary['oracle']}", file=out)
        print(f"result: {summary['result']}", file=out)
    return 0 if passed else 1


def cmd_enumerate(args, out) -> int:
    sample = None
    if args.sample is not None:
        if args.exhaustive:
            raise UsageError("--sample: cannot be combined with --exhaustive")
        sample = args.sample
    try:
        result = enumerate_all(args.N, sample=sample, seed=args.seed)
    except ValueError as exc:
        raise UsageError(f"--N: {exc}") from None
    if args.format == "structured":
        print(json.dumps(result.to_dict(), indent=2), file=out)
        return 0
    print(f"N={result.N} ({result.mode}"
          + (f", seed {result.seed}" if result.seed is not None else "") + ")", file=out)
    for row in result.rows:
        periods = ",".join(map(str, row.periods)) if row.periods else "-"
        print(f"  pi={row.pi.images_string():<12} minimal={str(row.is_minimal):<5} "
              f"|S|={row.S_size}  periods={periods:<8} lambda(per)={row.periodic_measure}",
              file=out)
    print(f"counts: {json.dumps(result.counts)}", file=out)
    return 0


def cmd_graft(args, out) -> int:
    g = _load_automaton(args.aut)
    if g.alphabet != 2:
        raise UsageError("--aut: graft expects an automorphism of the binary tree")
    if args.N < 1:
        raise UsageError("--N: must be >= 1")
    grafted = graft(g, args.N)
    if args.format == "human":
        print(f"grafted to T_{args.N}: {grafted.wreath_string()}", file=out)
    print(to_json(grafted), end="", file=out)
    return 0


def cmd_appl(args, out) -> int:
    g = _load_automaton(args.aut)
    if g.alphabet != 2:
        raise UsageError("--aut: expected an automorphism of the binary tree")
    try:
        result = analyze_finite_depth(
            g,
            m=args.m,
            samples=args.samples,
            steps=args.steps,
            depth=args.depth,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(f"--aut: {exc}") from None
    if args.format == "structured":
        obj = {
            "m": result.m,
            "pi": result.pi.images_string(),
            "pi_cycles": result.pi.cycle_string(),
            "periods_power_of_two": result.periods_power_of_two,
            "max_period_log2": result.max_period_log2,
            "verified": result.verified,
            "report": result.report.to_dict(),
        }
        print(json.dumps(obj, indent=2), file=out)
    else:
        print(f"depth m = {result.m}, induced pi = {result.pi.cycle_string()}"
              f"  [images {result.pi.images_string()}]", file=out)
        print(f"periods are powers of two: {result.periods_power_of_two}"
              f" (max log2 = {result.max_period_log2})", file=out)
        _print_report(result.report, "human", out)
    return 0 if result.verified else 1


def cmd_encode(args, out) -> int:
    if args.N < 1:
        raise UsageError("--N: must be >= 1")
    x = _parse_point(args.point)
    try:
        encoded = encode_point(x, args.N, side=args.side)
    except ValueError as exc:
        raise UsageError(f"--point: {exc}") from None
    if args.format == "structured":
        print(json.dumps({
            "point": str(encoded.point),
            "has_interval_preimage": encoded.has_interval_preimage,
        }, indent=2), file=out)
    else:
        tag = "" if encoded.has_interval_preimage else "  (doubled point, no preimage)"
        print(f"{encoded.point}{tag}", file=out)
    return 0


def cmd_decode(args, out) -> int:
    if args.N < 1:
        raise UsageError("--N: must be >= 1")
    b = _parse_boundary(args.point)
    try:
        value, has_preimage = decode_point(b, args.N)
    except ValueError as exc:
        raise UsageError(f"--point: {exc}") from None
    if args.format == "structured":
        print(json.dumps({
            "value": str(value),
            "has_interval_preimage": has_preimage,
        }, indent=2), file=out)
    else:
        tag = "" if has_preimage else "  (doubled point, no preimage)"
        print(f"{value}{tag}", file=out)
    return 0


def _add_format(p):
    p.add_argument("--format", choices=("human", "structured"), default="human",
                   help="human-readable text or machine-readable JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotodom",
        description="exact analysis of rotated odometers and their tree models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a rotated odometer")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--perm", required=True, help='permutation, e.g. "(0 3)" or "3,1,2,0"')
    p.add_argument("--level", type=int, help="oracle crosscheck level (default N+2)")
    p.add_argument("--bound", type=int, help="oracle iteration bound")
    _add_format(p)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("orbit", help="iterate the odometer or a tree automorphism")
    p.add_argument("--N", type=int)
    p.add_argument("--perm")
    p.add_argument("--aut", help="automaton file (tree orbit instead of interval orbit)")
    p.add_argument("--point", required=True)
    p.add_argument("--steps", type=int, required=True)
    _add_format(p)
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser("verify", help="conjugacy suite plus oracle crosscheck")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--level", type=int, help="oracle crosscheck level (default N+2)")
    p.add_argument("--bound", type=int, help="oracle iteration bound")
    _add_format(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("enumerate", help="classification summary over permutations")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true",
                   help="force exhaustive mode (default for N <= 3)")
    p.add_argument("--sample", type=int, help="sample this many random permutations")
    p.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    _add_format(p)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("graft", help="transport a binary-tree automorphism to T_N")
    p.add_argument("--aut", required=True, help="automaton file")
    p.add_argument("--N", type=int, required=True)
    _add_format(p)
    p.set_defaults(handler=cmd_graft)

    p = sub.add_parser("appl", help="realize a finite-depth automorphism as an odometer")
    p.add_argument("--aut", required=True, help="automaton file")
    p.add_argument("--m", type=int, help="depth (default: derived from the automaton)")
    p.add_argument("--samples", type=int, default=12)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    _add_format(p)
    p.set_defaults(handler=cmd_appl)

    p = sub.add_parser("encode", help="encode an interval point as a boundary point")
    p.add_argument("--point", required=True, help='dyadic, e.g. "5/2^3"')
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--side", choices=("upper", "lower"), default="upper")
    _add_format(p)
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("decode", help="decode a boundary point to its exact value")
    p.add_argument("--point", required=True, help='boundary point, e.g. "2·10(0)^∞"')
    p.add_argument("--N", type=int, required=True)
    _add_format(p)
    p.set_defaults(handler=cmd_decode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, sys.stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
