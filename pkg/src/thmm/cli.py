"""Command-line front end: ``thmm gen|check|resolvent|verify|expand``.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 failed
solvability or assumption check.
"""

import argparse
import sys

import numpy as np

from . import expansions
from .identities import TOLERANCES, run_battery
from .instance import Instance, SingularMatrixError
from .jsonio import InputError, dump, load_moments, matrix_to_json, measure_to_dict, moments_to_dict
from .moments import Interval, check_solvability, random_hausdorff_sequence
from .resolvent import AssumptionError, U_even_poly, U_odd_poly, V_even_poly, V_odd_poly

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_ASSUMPTION = 0, 1, 2, 3


def parse_z_list(text):
    """``"re,im;re,im"`` (or bare reals) to a list of complex numbers."""
    out = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = [p.strip() for p in item.split(",")]
        try:
            if len(parts) == 1:
                out.append(complex(float(parts[0]), 0.0))
            elif len(parts) == 2:
                out.append(complex(float(parts[0]), float(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise InputError(f"bad z value {item!r}; expected re,im") from None
    if not out:
        raise InputError("empty z list")
    return out


def parse_tol(values):
    """``--tol`` values: a bare number scales every tier; ``key=value`` sets a tier or identity."""
    profile = {}
    for val in values or []:
        if "=" in val:
            key, _, num = val.partition("=")
            try:
                profile[key.strip()] = float(num)
            except ValueError:
                raise InputError(f"bad tolerance {val!r}") from None
        else:
            try:
                x = float(val)
            except ValueError:
                raise InputError(f"bad tolerance {val!r}") from None
            profile.update({tier: x for tier in TOLERANCES})
            profile["default"] = x
    return profile


def _emit(args, obj):
    if args.out:
        dump(obj, path=args.out)
    else:
        dump(obj, fh=sys.stdout)


def _verdict_exit(verdict):
    return EXIT_OK if verdict.pd and verdict.assumptions_ok else EXIT_ASSUMPTION


def cmd_gen(args):
    if args.q < 1 or args.m < 1:
        raise InputError("need --q >= 1 and --m >= 1")
    try:
        interval = Interval(args.a, args.b)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    seed = 0 if args.seed is None else args.seed
    mu, seq = random_hausdorff_sequence(args.q, args.m, interval, seed)
    prefix = args.out or f"thmm_q{args.q}_m{args.m}_seed{seed}"
    paths = {"measure": f"{prefix}.measure.json", "moments": f"{prefix}.moments.json"}
    try:
        dump(measure_to_dict(mu), path=paths["measure"])
        dump(moments_to_dict(seq), path=paths["moments"])
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from exc
    verdict = check_solvability(seq)
    dump({"files": paths, "verdict": verdict.to_dict()}, fh=sys.stdout)
    return EXIT_OK


def cmd_check(args):
    seq = load_moments(args.moments)
    verdict = check_solvability(seq)
    out = verdict.to_dict()
    out["assumptions_ok"] = verdict.assumptions_ok
    _emit(args, out)
    return _verdict_exit(verdict)


def _require_solvable(seq):
    verdict = check_solvability(seq)
    if not verdict.pd:
        raise AssumptionError(f"sequence is not Hausdorff positive definite: {', '.join(verdict.failures)}")
    return verdict


def _resolvent_poly(inst, which):
    if which == "U":
        return U_even_poly(inst) if inst.parity == "even" else U_odd_poly(inst)
    return V_even_poly(inst)[0] if inst.parity == "even" else V_odd_poly(inst)


def cmd_resolvent(args):
    seq = load_moments(args.moments)
    zs = parse_z_list(args.z)
    _require_solvable(seq)
    inst = Instance(seq)
    poly = _resolvent_poly(inst, args.which)
    q = inst.q
    values = []
    for z in zs:
        M = poly(z)
        values.append({
            "z": [z.real, z.imag],
            "alpha": matrix_to_json(M[:q, :q]),
            "beta": matrix_to_json(M[:q, q:]),
            "gamma": matrix_to_json(M[q:, :q]),
            "delta": matrix_to_json(M[q:, q:]),
        })
    _emit(args, {"which": args.which, "parity": inst.parity, "m": inst.m, "n": inst.n, "values": values})
    return EXIT_OK


def cmd_verify(args):
    seq = load_moments(args.moments)
    profile = parse_tol(args.tol)
    verdict = check_solvability(seq)
    if not verdict.pd:
        _emit(args, {"verdict": verdict.to_dict(), "overall": False})
        return EXIT_ASSUMPTION
    report = run_battery(seq, tol_profile=profile or None, seed=args.seed)
    out = report.to_dict()
    out["verdict"] = verdict.to_dict()
    _emit(args, out)
    if not report.overall:
        return EXIT_NUMERIC
    return EXIT_OK if verdict.assumptions_ok else EXIT_ASSUMPTION


def cmd_expand(args):
    seq = load_moments(args.moments)
    profile = parse_tol(args.tol)
    tol = profile.get("default", profile.get("expand", 1e-9))
    _require_solvable(seq)
    inst = Instance(seq)
    if args.center == "0":
        series = (expansions.series_even_at_zero if inst.parity == "even" else expansions.series_odd_at_zero)(inst)
        oracle = expansions.extract_at_zero(inst)
    else:
        series = (expansions.series_even_at_a if inst.parity == "even" else expansions.series_odd_at_a)(inst)
        oracle = expansions.extract_at_a(inst)
    diffs = expansions.compare(series, oracle)
    coeffs = [{"j": j, "source": src, "matrix": matrix_to_json(c), "diff": d}
              for j, (c, src, d) in enumerate(zip(series.coeffs, series.sources, diffs))]
    worst = max(diffs) if diffs else 0.0
    _emit(args, {"center": args.center, "center_value": float(series.center), "parity": inst.parity,
                 "n": inst.n, "count": len(coeffs), "coefficients": coeffs, "max_diff": worst, "tol": tol})
    return EXIT_OK if worst <= tol else EXIT_NUMERIC


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", metavar="TOL",
                        help="tolerance override: a number, or TIER=VALUE / ID=VALUE (repeatable)")
    common.add_argument("--seed", type=int, default=None, help="random seed (gen) or label recorded in reports")
    common.add_argument("--format", choices=["json"], default="json", help="output format")
    common.add_argument("--out", metavar="PATH", help="output file (gen: file prefix)")

    parser = argparse.ArgumentParser(prog="thmm", description="Truncated Hausdorff matrix moment toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a random measure and its moments")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", parents=[common], help="positive definiteness and assumption verdict")
    p.add_argument("moments")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("resolvent", parents=[common], help="evaluate U or V at points z")
    p.add_argument("moments")
    p.add_argument("--which", choices=["U", "V"], default="U")
    p.add_argument("--z", required=True, help='points as "re,im;re,im"')
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("verify", parents=[common], help="run the identity battery")
    p.add_argument("moments")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("expand", parents=[common], help="series coefficients at 0 or at a")
    p.add_argument("moments")
    p.add_argument("--center", choices=["0", "a"], default="0")
    p.set_defaults(func=cmd_expand)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"thmm: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AssumptionError, SingularMatrixError) as exc:
        print(f"thmm: assumption failed: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except np.linalg.LinAlgError as exc:
        print(f"thmm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
