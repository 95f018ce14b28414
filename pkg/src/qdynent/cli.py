"""Command-line entry point: ``qdynent <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 a gate verdict disagrees with
its stated classification, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import chaos, ensemble, gates, io
from .entropy import dynamical_entropy, empirical_entropy_rate, entropy_rate
from .errors import NumericalError
from .maxent import hdyn_from_theta, pvm_dynamical_entropy
from .matcore import require_unitary
from .measure import computational_pvm, pvm_from_unitary, sic_povm

EXIT_OK, EXIT_INPUT, EXIT_CLAIM, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _parse_params(text):
    if not text:
        return ()
    return tuple(float(p) for p in text.split(","))


def _unitary(args) -> np.ndarray:
    if args.unitary and args.gate:
        raise UsageError("give either --unitary or --gate, not both")
    if args.unitary:
        U = io.read_matrix(args.unitary)
    elif args.gate:
        params = _parse_params(args.gate_params)
        if args.gate.upper() == "FOURIER":
            params = tuple(int(p) for p in params)
        U = gates.gate(args.gate, *params).matrix
    else:
        raise UsageError("a unitary is required (--unitary PATH or --gate NAME)")
    return require_unitary(U)


def _povm(args, d):
    chosen = [x for x in (args.povm, args.pvm) if x] + (["sic"] if args.sic else [])
    if len(chosen) > 1:
        raise UsageError("give at most one of --povm, --pvm, --sic")
    if args.povm:
        return io.read_povm(args.povm)
    if args.pvm:
        return pvm_from_unitary(io.read_matrix(args.pvm))
    if args.sic:
        return sic_povm(d)
    return computational_pvm(d)


def _emit(text, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out=None):
    _emit(io.dumps(obj) + "\n", out)


# -- commands --------------------------------------------------------------


def cmd_entropy(args):
    U = _unitary(args)
    rep = dynamical_entropy(U, _povm(args, U.shape[0]))
    _emit_json(rep.as_dict(), args.out)


def cmd_maxent(args):
    U = _unitary(args)
    res = pvm_dynamical_entropy(U, starts=args.starts, tol=args.tol, seed=args.seed,
                                max_iters=args.max_iters)
    _emit_json({
        "value": res.value,
        "certified": res.certified_chaotic,
        "basis": io.matrix_to_json(res.basis),
        "starts_used": res.starts_used,
        "converged_starts": res.converged_starts,
        "seed": args.seed,
    }, args.out)


def cmd_classify(args):
    U = _unitary(args)
    v = chaos.classify(U, starts=args.starts, seed=args.seed, tol=args.tol)
    _emit_json(v.as_dict(), args.out)


def _region_rows(regions):
    rows = []
    for idx, reg in enumerate(regions):
        for t, z in zip(reg.parameters(), reg.boundary):
            rows.append((idx, float(t), float(z.real), float(z.imag)))
    return rows


def cmd_curve(args):
    fig = args.fig
    if fig in ("1", "hdyn-theta"):
        n = args.samples or 1000
        theta = np.linspace(0, math.pi, n + 1)
        rows = [(float(t), float(h)) for t, h in zip(theta, hdyn_from_theta(theta))]
        _emit(io.csv_text(["theta", "hdyn"], rows), args.out)
        return
    d = {"3": 3, "4": 5}.get(fig, args.dim)
    n = args.samples or chaos.POLYLINE_SAMPLES
    if n < 64:
        raise UsageError("region polylines need --samples >= 64")
    regions = [chaos.TraceRegion.build(d, samples=n)]
    if d in (3, 5):
        regions += chaos.ct_region(d, samples=n)
    _emit(io.csv_text(["region_index", "t", "re", "im"], _region_rows(regions)), args.out)


def cmd_haar(args):
    d, stat, n = args.dim, args.stat, args.samples
    kw = dict(seed=args.seed, workers=args.workers)
    if stat == "volume":
        if d not in (2, 3):
            raise UsageError(f"volume is only decidable for dim 2 or 3, not {d}")
        est = ensemble.mc_chaotic_volume(d, n, **kw)
    elif stat == "mean-hdyn2":
        if d != 2:
            raise UsageError("mean-hdyn2 needs --dim 2")
        est = ensemble.mc_mean_hdyn_d2(n, **kw)
    elif stat == "mean-fixed":
        est = ensemble.mc_mean_fixed_pvm(d, n, **kw)
    else:
        est = ensemble.mc_mean_maxent(d, n, starts=args.starts, **kw)
    out = est.as_dict()
    out.update(dim=d, stat=stat)
    _emit_json(out, args.out)


def cmd_weyl(args):
    d, stat = args.dim, args.stat
    if d == 2 and stat == "volume":
        val = ensemble.weyl_volume_d2(args.quad_points)
    elif d == 2 and stat == "mean-hdyn2":
        val = ensemble.weyl_mean_hdyn_d2(args.quad_points)
    elif d == 2 and stat == "normalization":
        val = ensemble.weyl_average_d2(lambda phi: 1.0, args.quad_points)
    elif d == 3 and stat == "volume":
        val = ensemble.m_c3_quadrature(args.r_points, args.theta_points)
    elif d == 3 and stat == "normalization":
        val = ensemble.trace_normalization_d3(args.r_points, args.theta_points)
    else:
        raise UsageError(f"unsupported weyl combination: dim {d}, stat {stat}")
    _emit_json({"value": val, "dim": d, "stat": stat}, args.out)


def cmd_gates(args):
    rows = gates.classify_catalogue(starts=args.starts, seed=args.seed)
    table = [
        (g.name, g.dim, g.paper_claim.value if g.paper_claim else "", v.status.value,
         v.method.value, float(v.detail))
        for g, v in rows
    ]
    _emit(io.csv_text(["name", "dim", "paper_claim", "verdict", "method", "detail"], table), args.out)
    bad = gates.disagreements(rows)
    if bad:
        print(f"verdict disagrees with stated classification: {', '.join(bad)}", file=sys.stderr)
        return EXIT_CLAIM
    return EXIT_OK


def cmd_simulate(args):
    U = _unitary(args)
    povm = _povm(args, U.shape[0])
    emp = empirical_entropy_rate(U, povm, args.steps, args.seed)
    exact = entropy_rate(U, povm)
    _emit_json({"empirical_rate": emp, "exact_rate": exact, "abs_error": abs(emp - exact),
                "steps": args.steps, "seed": args.seed}, args.out)


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdynent", description="Entropy production of measured unitary dynamics.")
    sub = p.add_subparsers(dest="command", required=True)

    def unitary_flags(sp):
        sp.add_argument("--unitary", help="matrix JSON file")
        sp.add_argument("--gate", help="named gate, e.g. H, CNOT, FOURIER")
        sp.add_argument("--gate-params", help="comma-separated gate parameters (DEUTSCH theta, FOURIER d)")

    def povm_flags(sp):
        sp.add_argument("--povm", help="POVM JSON file")
        sp.add_argument("--pvm", help="matrix JSON file whose columns form the basis")
        sp.add_argument("--sic", action="store_true", help="use the SIC-POVM (d = 2, 3)")

    def opt_flags(sp):
        sp.add_argument("--starts", type=int, default=32)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-10)

    def out_flag(sp):
        sp.add_argument("--out", help="write to this file instead of stdout")

    sp = sub.add_parser("entropy", help="entropy rate, measurement and dynamical entropy")
    unitary_flags(sp), povm_flags(sp), out_flag(sp)
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("maxent", help="PVM-dynamical entropy by multistart ascent")
    unitary_flags(sp), opt_flags(sp), out_flag(sp)
    sp.add_argument("--max-iters", type=int, default=2000)
    sp.set_defaults(func=cmd_maxent)

    sp = sub.add_parser("classify", help="chaoticity verdict")
    unitary_flags(sp), opt_flags(sp), out_flag(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("curve", help="CSV data for the entropy curve and trace regions")
    sp.add_argument("--fig", required=True, choices=["1", "3", "4", "hdyn-theta", "region"])
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--dim", type=int, default=3, help="dimension for --fig region")
    out_flag(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("haar", help="Monte Carlo Haar averages")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--stat", required=True, choices=["volume", "mean-fixed", "mean-maxent", "mean-hdyn2"])
    sp.add_argument("--samples", type=int, default=10**5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--starts", type=int, default=32)
    out_flag(sp)
    sp.set_defaults(func=cmd_haar)

    sp = sub.add_parser("weyl", help="Weyl-formula quadrature")
    sp.add_argument("--dim", type=int, required=True, choices=[2, 3])
    sp.add_argument("--stat", required=True, choices=["volume", "mean-hdyn2", "normalization"])
    sp.add_argument("--quad-points", type=int, default=2048)
    sp.add_argument("--r-points", type=int, default=1024)
    sp.add_argument("--theta-points", type=int, default=2048)
    out_flag(sp)
    sp.set_defaults(func=cmd_weyl)

    sp = sub.add_parser("gates", help="classify the named-gate catalogue (CSV)")
    sp.add_argument("--starts", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    out_flag(sp)
    sp.set_defaults(func=cmd_gates)

    sp = sub.add_parser("simulate", help="empirical entropy rate of a sampled outcome path")
    unitary_flags(sp), povm_flags(sp), out_flag(sp)
    sp.add_argument("--steps", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code = args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
