"""Command-line entry point: figure data as CSV/JSON and the verification suite.

Examples::

    mpaacs pnd --alpha-mag 1 --gain 2 --m 2
    mpaacs wigner --alpha-mag 1 --gain 2 --m 2 --nx 81 --ny 81 --format json
    mpaacs sweep --quantity n_eq --m 2 --gain 2 --alpha-lo 0.01 --alpha-hi 4 --count 100
    mpaacs threshold --m 1 2 3 4 5
    mpaacs verify
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import metrics, phase_space as ps, state as st

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE = 0, 1, 2


def fmt(value) -> str:
    """Shortest round-trip text for numbers (17 significant digits at most)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _state_args(p):
    p.add_argument("--alpha-mag", type=float, default=1.0, help="|alpha| (default 1)")
    p.add_argument("--alpha-phase", type=float, default=0.0, help="arg(alpha) in radians (default 0)")
    p.add_argument("--gain", type=float, default=1.0, help="amplifier gain g >= 1 (default 1)")
    p.add_argument("--m", type=int, default=0, help="number of added photons (default 0)")


def _output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _tolerance_arg(p):
    p.add_argument("--tolerance", type=float, default=None,
                   help="truncation tolerance in (0, 1); default $MPAACS_TOLERANCE or 1e-12")


def _x_axis_args(p, count=201):
    p.add_argument("--x-min", type=float, default=-6.0)
    p.add_argument("--x-max", type=float, default=6.0)
    p.add_argument("--count", type=int, default=count)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpaacs", description="Photon-added amplified coherent states: figure data and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pnd", help="photon-number distribution rows (k, rho_kk)")
    _state_args(p)
    _tolerance_arg(p)
    _output_args(p)

    p = sub.add_parser("dme", help="density matrix moduli rows (k, l, |rho_kl|)")
    _state_args(p)
    _tolerance_arg(p)
    _output_args(p)
    p.add_argument("--max-index", type=int, default=None, help="largest k, l emitted (default: cutoff)")

    p = sub.add_parser("wigner", help="Wigner function on a grid, rows (x, y, W) with x outermost")
    _state_args(p)
    _output_args(p)
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--y-min", type=float, default=None)
    p.add_argument("--y-max", type=float, default=None)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--ny", type=int, default=None)

    p = sub.add_parser("section", help="W(x, y=0) rows (x, W)")
    _state_args(p)
    _x_axis_args(p)
    _output_args(p)

    p = sub.add_parser("marginal", help="x-quadrature marginal rows (x, p(x))")
    _state_args(p)
    _x_axis_args(p)
    _output_args(p)
    p.add_argument("--y-min", type=float, default=-8.0)
    p.add_argument("--y-max", type=float, default=8.0)
    p.add_argument("--panels", type=int, default=400)

    p = sub.add_parser("sweep", help="g_eff, var_x or n_eq against |alpha|")
    p.add_argument("--quantity", choices=metrics.SWEEP_QUANTITIES, required=True)
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--alpha-lo", type=float, default=0.01)
    p.add_argument("--alpha-hi", type=float, default=4.0)
    p.add_argument("--count", type=int, default=100)
    _output_args(p)

    p = sub.add_parser("threshold", help="squeezing threshold |g alpha| per m")
    p.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    _output_args(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", nargs="+", default=None, metavar="ID", help="run only these check IDs")
    return parser


def _validate(parser, args):
    def bad(flag, msg):
        parser.error(f"argument {flag}: {msg}")

    def finite(flag, value):
        if value is not None and not math.isfinite(value):
            bad(flag, "must be finite")

    if hasattr(args, "gain"):
        finite("--gain", args.gain)
        if args.gain < 1:
            bad("--gain", f"must be >= 1, got {args.gain}")
    if hasattr(args, "m"):
        ms = args.m if isinstance(args.m, list) else [args.m]
        for m in ms:
            if m < 0:
                bad("--m", f"must be >= 0, got {m}")
            if args.command == "threshold" and not 1 <= m <= 8:
                bad("--m", f"threshold needs 1 <= m <= 8, got {m}")
    if hasattr(args, "alpha_mag"):
        finite("--alpha-mag", args.alpha_mag)
        finite("--alpha-phase", args.alpha_phase)
        if args.alpha_mag < 0:
            bad("--alpha-mag", f"must be >= 0, got {args.alpha_mag}")
    if getattr(args, "tolerance", None) is not None and not 0 < args.tolerance < 1:
        bad("--tolerance", f"must lie in (0, 1), got {args.tolerance}")
    if args.command in ("section", "marginal"):
        if args.count < 2:
            bad("--count", "must be >= 2")
        if not args.x_min < args.x_max:
            bad("--x-max", "must exceed --x-min")
    if args.command == "marginal":
        if not args.y_min < args.y_max:
            bad("--y-max", "must exceed --y-min")
        if args.panels < 1:
            bad("--panels", "must be >= 1")
    if args.command == "sweep":
        if args.count < 1:
            bad("--count", "must be >= 1")
        if args.alpha_lo < 0 or args.alpha_hi < args.alpha_lo:
            bad("--alpha-hi", "need 0 <= alpha-lo <= alpha-hi")
        if args.quantity != "var_x" and args.alpha_lo <= 0:
            bad("--alpha-lo", f"must be > 0 for {args.quantity}")
    if args.command == "wigner":
        for flag in ("nx", "ny"):
            v = getattr(args, flag)
            if v is not None and v < 2:
                bad(f"--{flag}", "must be >= 2")
    if args.command == "dme" and args.max_index is not None and args.max_index < 0:
        bad("--max-index", "must be >= 0")


def _params(args) -> st.MpaacsParams:
    return st.MpaacsParams.polar(args.alpha_mag, args.gain, args.m, args.alpha_phase)


def _state_meta(args):
    return {"alpha_mag": args.alpha_mag, "alpha_phase": args.alpha_phase, "gain": args.gain, "m": args.m}


def _write(args, columns, rows, meta):
    if args.format == "json":
        doc = {"meta": dict(meta, command=args.command, columns=list(columns)), "rows": [list(r) for r in rows]}
        text = json.dumps(doc, indent=None, separators=(",", ":")) + "\n"
    else:
        echo = "; ".join(f"{k}={fmt(v) if not isinstance(v, str) else v}" for k, v in meta.items())
        lines = [f"# {args.command}: {','.join(columns)}; {echo}"]
        lines += [",".join(fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args):
    return st.default_tolerance() if args.tolerance is None else args.tolerance


def cmd_pnd(args):
    tol = _tol(args)
    fock = st.fock_coefficients(_params(args), tol)
    meta = dict(_state_meta(args), tolerance=tol, cutoff=fock.truncation_cutoff, tail_bound=fock.tail_bound)
    _write(args, ("k", "probability"), st.pnd(fock), meta)


def cmd_dme(args):
    tol = _tol(args)
    fock = st.fock_coefficients(_params(args), tol)
    rho = np.abs(st.density_matrix(fock).entries)
    top = fock.truncation_cutoff if args.max_index is None else min(args.max_index, fock.truncation_cutoff)
    rows = [(k, l, float(rho[k, l])) for k in range(top + 1) for l in range(top + 1)]
    meta = dict(_state_meta(args), tolerance=tol, cutoff=fock.truncation_cutoff, max_index=top)
    _write(args, ("k", "l", "abs_rho"), rows, meta)


def cmd_wigner(args):
    params = _params(args)
    base = ps.PhaseSpaceGrid.default_for(params)
    grid = ps.PhaseSpaceGrid(
        base.x_min if args.x_min is None else args.x_min,
        base.x_max if args.x_max is None else args.x_max,
        base.y_min if args.y_min is None else args.y_min,
        base.y_max if args.y_max is None else args.y_max,
        base.nx if args.nx is None else args.nx,
        base.ny if args.ny is None else args.ny,
    )
    field = ps.wigner_grid(params, grid)
    xs, ys = grid.xs, grid.ys
    rows = [(float(x), float(y), float(field.values[i, j])) for i, x in enumerate(xs) for j, y in enumerate(ys)]
    meta = dict(_state_meta(args), x_min=grid.x_min, x_max=grid.x_max, y_min=grid.y_min, y_max=grid.y_max,
                nx=grid.nx, ny=grid.ny, integral=field.integral, min_value=field.min_value,
                min_x=field.min_location[0], min_y=field.min_location[1])
    _write(args, ("x", "y", "W"), rows, meta)


def _xs(args):
    return np.linspace(args.x_min, args.x_max, args.count)


def cmd_section(args):
    rows = ps.section_y0(_params(args), _xs(args))
    _write(args, ("x", "W"), rows, dict(_state_meta(args), y=0.0))


def cmd_marginal(args):
    rows = ps.marginal_x(_params(args), _xs(args), args.y_min, args.y_max, args.panels)
    meta = dict(_state_meta(args), y_min=args.y_min, y_max=args.y_max, panels=args.panels)
    _write(args, ("x", "p"), rows, meta)


def cmd_sweep(args):
    rows = metrics.sweep(args.quantity, (args.alpha_lo, args.alpha_hi, args.count), args.gain, args.m)
    meta = {"quantity": args.quantity, "gain": args.gain, "m": args.m, "alpha_lo": args.alpha_lo,
            "alpha_hi": args.alpha_hi, "count": args.count, "alpha_phase": 0.0}
    _write(args, ("alpha_mag", args.quantity), rows, meta)


def cmd_threshold(args):
    rows = [(m, round(metrics.squeezing_threshold(m), 6)) for m in args.m]
    _write(args, ("m", "threshold"), rows, {"gain": 1.0, "alpha_phase": 0.0})


def cmd_verify(args):
    from .verify import run_checks

    t0 = time.perf_counter()
    results = run_checks(set(args.only) if args.only else None)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.id} {r.description}: {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed in {time.perf_counter() - t0:.1f} s")
    return EXIT_VERIFY_FAILED if failed or not results else EXIT_OK


COMMANDS = {
    "pnd": cmd_pnd,
    "dme": cmd_dme,
    "wigner": cmd_wigner,
    "section": cmd_section,
    "marginal": cmd_marginal,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return COMMANDS[args.command](args) or EXIT_OK
    except ValueError as exc:
        # MPAACS_TOLERANCE and similar late validation
        print(f"mpaacs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
