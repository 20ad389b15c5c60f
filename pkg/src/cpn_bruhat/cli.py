"""Command-line front end: ``cpn-bruhat <command> [options]``.

Exit codes are 0 on success, 1 when a verification fails and 2 for usage or
configuration errors. Every command draws its randomness from one generator
seeded by ``--seed``, so repeated runs print identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import flows, gelfand_tsetlin as gt, invariants, lenard, verify
from .charts import DEFAULT_MARGIN, MomentumAnglePoint, PointSampler
from .errors import CPnError, InvalidSimplexPoint, LeftDomain
from .fields import REGISTRY_IDS, elementary_values, registry_field
from .poisson import PoissonPencil, make_pi_inf, make_pi_s

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _clean(obj):
    """Make reports JSON-safe: numpy scalars to floats, NaN to null, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if math.isnan(v) else v
    return obj


def _dump(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _structure(text: str, n: int):
    if text == "pi_s":
        return make_pi_s(n)
    if text == "pi_inf":
        return make_pi_inf(n)
    if text.startswith("pencil:"):
        try:
            a, b = (float(v) for v in text[len("pencil:"):].split(","))
        except ValueError:
            raise UsageError(f"pencil structure must look like pencil:a,b, got {text!r}") from None
        return PoissonPencil.standard(n, a, b).field()
    raise UsageError(f"unknown structure {text!r}; use pi_s, pi_inf or pencil:a,b")


def _field(key: str, n: int):
    try:
        return registry_field(key, n)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; known ids: {', '.join(REGISTRY_IDS)}") from None


def _point(args) -> MomentumAnglePoint:
    if args.point is None:
        return PointSampler(args.seed, args.margin).sample(args.n)
    try:
        obj = json.loads(args.point)
    except ValueError as exc:
        raise UsageError(f"invalid point JSON: {exc}") from None
    try:
        if isinstance(obj, dict) and "c" in obj and "x" not in obj:
            p = MomentumAnglePoint.from_c(obj["c"], obj.get("phi")).validate()
        else:
            p = MomentumAnglePoint.from_json(args.point)
    except (ValueError, InvalidSimplexPoint) as exc:
        raise UsageError(str(exc)) from None
    return p


# commands


def cmd_verify_all(args, out) -> int:
    results = verify.run_all(args.n, seed=args.seed, samples=args.samples, tol=args.tol,
                             margin=args.margin, convention=args.convention, T=args.T, dt=args.dt)
    failed = [r.name for r in results if not r.passed]
    if args.output == "json":
        out.write(_dump({"n": args.n, "seed": args.seed, "samples": args.samples, "tol": args.tol,
                         "passed": not failed, "failed": failed,
                         "suites": [r.to_dict() for r in results]}) + "\n")
    elif args.output == "csv":
        rows = []
        for r in results:
            for key, value in sorted(r.metrics.items()):
                if isinstance(value, (int, float)) and not isinstance(value, bool):
                    rows.append([r.name, key, float(value), "pass" if r.passed else "fail"])
        out.write(_csv(["suite", "metric", "value", "status"], rows))
    else:
        for r in results:
            scalars = {k: v for k, v in sorted(r.metrics.items())
                       if isinstance(v, (int, float)) and not isinstance(v, bool)}
            detail = " ".join(f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
                              for k, v in scalars.items())
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{status} {r.name}: {detail}{' ' + r.error if r.error else ''}\n")
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_f_table(args, out) -> int:
    p = _point(args)
    n = p.n
    c = p.c
    e = elementary_values(c)[1:]
    fr = invariants.f_family_ratio(p)
    fp = invariants.f_family_pairing(p)
    const = e / fr
    if args.output == "json":
        out.write(_dump({"n": n, "c": c, "x": p.x, "phi": p.phi, "e": e, "f_ratio": fr,
                         "f_pairing": fp, "constants": const}) + "\n")
    elif args.output == "csv":
        rows = [[k, c[k - 1], e[k - 1], fr[k - 1], fp[k - 1], const[k - 1]] for k in range(1, n + 1)]
        out.write(_csv(["k", "c_k", "e_k", "f_ratio", "f_pairing", "e_over_f"], rows))
    else:
        out.write(f"n = {n}\n")
        out.write(f"{'k':>3} {'c_k':>14} {'e_k':>14} {'f_k ratio':>14} {'f_k pairing':>14} {'e_k/f_k':>14}\n")
        for k in range(1, n + 1):
            out.write(f"{k:>3} {c[k-1]:>14.10g} {e[k-1]:>14.10g} {fr[k-1]:>14.10g} "
                      f"{fp[k-1]:>14.10g} {const[k-1]:>14.10g}\n")
    return EXIT_OK


def cmd_gt_demo(args, out) -> int:
    conv = "UL" if args.convention in ("auto", "literal") else args.convention.partition("/")[0]
    if conv not in gt.CHAINS:
        raise UsageError(f"unknown chain {conv!r}; use one of {gt.CHAINS}")
    size = args.n + 1
    frame = gt.UnitaryFrame.identity(size) if args.identity else gt.random_unitary(
        size, rng=np.random.default_rng(args.seed))
    pattern = gt.gt_pattern(gt.orbit_point(frame, args.lam), conv)
    c = gt.momentum_c(frame) if not args.identity else None
    if args.output == "json":
        obj = json.loads(pattern.to_json()) | {"interlaces": pattern.interlaces()}
        if c is not None:
            obj["c"] = c
        out.write(_dump(obj) + "\n")
    elif args.output == "csv":
        rows = [[k, r, v] for k, row in enumerate(pattern.rows, start=1) for r, v in enumerate(row, start=1)]
        out.write(_csv(["row", "entry", "value"], rows))
    else:
        out.write(pattern.triangle(include_top=args.top) + "\n")
        if c is not None:
            out.write("c = " + " ".join(f"{v:.10g}" for v in c) + "\n")
    return EXIT_OK


def cmd_lenard_run(args, out) -> int:
    seed = _field(args.seed_function, args.n)
    if not seed.torus_invariant:
        raise UsageError(f"{args.seed_function} is not torus-invariant")
    K = args.n if args.K is None else args.K
    if K < 1:
        raise UsageError("--K must be at least 1")
    pts = PointSampler(args.seed, args.margin).sample_many(args.n, args.samples)
    report = lenard.run_chain(args.seed_function, seed, K, pts)
    if args.output == "json":
        out.write(_dump(report.__dict__) + "\n")
    elif args.output == "csv":
        rows = [[k, report.residuals[k - 2] if k > 1 else 0.0,
                 report.ratios[k - 1] if report.ratios else float("nan")] for k in range(1, K + 1)]
        out.write(_csv(["member", "closedness_residual", "ratio_to_reference"], rows))
    else:
        out.write(f"seed={args.seed_function} K={K} rank={report.rank}\n")
        out.write("closedness residuals: " + " ".join(f"{r:.3e}" for r in report.residuals) + "\n")
        if report.ratios:
            out.write("ratios to reference: " + " ".join(f"{r:.10g}" for r in report.ratios) + "\n")
            out.write(f"min gradient cosine: {report.min_cosine:.15g}\n")
        out.write(f"max bracket within chain: {report.involution_max:.3e}\n")
    return EXIT_OK


def cmd_flow_run(args, out) -> int:
    h = _field(args.hamiltonian, args.n)
    P = _structure(args.structure, args.n)
    start = _point(args)
    try:
        traj = flows.integrate(h, P, start, args.T, args.dt, margin=0.0)
    except LeftDomain as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    if args.output == "json":
        out.write(_dump({"hamiltonian": traj.hamiltonian, "structure": traj.structure,
                         "t": traj.times, "x": traj.x(), "phi": traj.phi()}) + "\n")
    elif args.output == "text":
        fin = traj.states[-1]
        out.write(f"{traj.hamiltonian} under {traj.structure}: {traj.times.size - 1} steps to T={args.T}\n")
        out.write("x(T)   = " + " ".join(f"{v:.12g}" for v in fin[0::2]) + "\n")
        out.write("phi(T) = " + " ".join(f"{v:.12g}" for v in fin[1::2]) + "\n")
        out.write(f"e-family drift = {flows.elementary_drift(traj):.3e}\n")
    else:
        out.write(traj.to_csv())
    return EXIT_OK


COMMANDS = {
    "verify-all": (cmd_verify_all, "run every verification suite", "text"),
    "f-table": (cmd_f_table, "e_k(c) against both f-family definitions at a point", "text"),
    "gt-demo": (cmd_gt_demo, "Gelfand-Tsetlin pattern of a rank-one orbit point", "text"),
    "lenard-run": (cmd_lenard_run, "build a Lenard chain and report its residuals and rank", "text"),
    "flow-run": (cmd_flow_run, "integrate a hamiltonian flow and emit the trajectory", "csv"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="complex dimension of CP^n")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--tol", type=float, default=verify.BASE_TOL, help="base tolerance for thresholds")
    common.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help="sampling distance from the simplex boundary")
    common.add_argument("--output", choices=("json", "csv", "text"), default=None)
    common.add_argument("--convention", default="auto",
                        help="GT index convention: auto, literal or CHAIN/order (e.g. UL/identity)")
    common.add_argument("--T", type=float, default=10.0)
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--K", type=int, default=None, help="Lenard chain length (default n)")

    parser = argparse.ArgumentParser(prog="cpn-bruhat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_, _) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name in ("f-table", "flow-run"):
            p.add_argument("--point", default=None,
                           help='JSON point {"n","x","phi"} or {"c": [...]}; default: random per seed')
        if name == "gt-demo":
            p.add_argument("--identity", action="store_true", help="use the identity frame")
            p.add_argument("--lam", type=float, default=1.0)
            p.add_argument("--top", action="store_true", help="also print the full spectrum")
        if name == "lenard-run":
            p.add_argument("--seed-function", default="e-sum")
        if name == "flow-run":
            p.add_argument("--hamiltonian", default="f1")
            p.add_argument("--structure", default="pi_s")
    return parser


def _check(args) -> None:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if not 0 < args.margin < 0.5:
        raise UsageError("--margin must lie in (0, 0.5)")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.dt <= 0 or args.T < 0:
        raise UsageError("--dt must be positive and --T non-negative")
    try:
        verify.parse_convention(args.convention)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func, _, default_output = COMMANDS[args.command]
    if args.output is None:
        args.output = default_output
    try:
        _check(args)
        return func(args, out)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CPnError as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
