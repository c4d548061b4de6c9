"""Command-line front end emitting plot-ready CSV/JSON data files.

Subcommands: regions, events, sweep-n, rates, validate.  SNR is taken in dB
on the command line and converted to linear rho = 10**(dB/10) internally.
Every file-writing command drops a JSON run manifest next to its outputs so
a run can be reproduced byte-identically.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import io
import json
import math
import sys

from . import __version__, analytic, montecarlo, quadrature, validation
from .analytic import ConvergenceError
from .events import EventId
from .montecarlo import McConfig, RNG_SCHEME
from .order_stats import PairingConfig
from .regions import (
    ChannelPair,
    PowerSplit,
    TimeSplit,
    noma_rate_pair,
    region_boundary_samples,
    single_user_rates,
    tdma_rate_pair,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


def _fmt(v) -> str:
    """Shortest round-trip decimal representation."""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _rows_to_json(header: list[str], rows: list[list], manifest: dict) -> str:
    records = [dict(zip(header, row)) for row in rows]
    return json.dumps({"manifest": manifest, "records": records},
                      indent=2) + "\n"


def _manifest(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    return {
        "command": args.command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "rng_scheme": RNG_SCHEME,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _emit(args: argparse.Namespace, header: list[str], rows: list[list]) -> None:
    manifest = _manifest(args)
    if args.format == "json":
        payload = _rows_to_json(header, rows, manifest)
    else:
        payload = _rows_to_csv(header, rows)
    if args.out is None:
        sys.stdout.write(payload)
        return
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)
    manifest["outputs"] = {
        args.out: hashlib.sha256(payload.encode("utf-8")).hexdigest()}
    with open(args.out + ".manifest.json", "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _resolve_a2(mode: str, rho: float) -> float:
    if mode == "inv_sqrt_rho":
        return 1.0 / math.sqrt(rho)
    if mode == "special":
        return analytic.optimal_a2_special(rho)
    if mode.startswith("fixed:"):
        return float(mode.split(":", 1)[1])
    raise argparse.ArgumentTypeError(
        f"a2 mode must be fixed:<value>, inv_sqrt_rho, or special, got {mode!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_regions(args: argparse.Namespace) -> int:
    ch = ChannelPair(args.x, args.y)
    rows = []
    for kind in ("capacity", "noma", "tdma"):
        for pt in region_boundary_samples(kind, ch, args.points):
            rows.append([kind, pt.r2, pt.r1])
    if args.mark_a2 is not None:
        p = PowerSplit(args.mark_a2)
        t = TimeSplit(args.mark_b2)
        n_pt = noma_rate_pair(ch, p)
        t_pt = tdma_rate_pair(ch, t)
        rows.append(["point_N", n_pt.r2, n_pt.r1])
        rows.append(["point_T", t_pt.r2, t_pt.r1])
        r1s, r2s = single_user_rates(ch)
        # intersections of the three comparison lines with the TDMA segment
        rows.append(["point_B", (1.0 - n_pt.r1 / r1s) * r2s, n_pt.r1])
        rows.append(["point_C", n_pt.r2, (1.0 - n_pt.r2 / r2s) * r1s])
        s = n_pt.r1 + n_pt.r2
        z_d = (s - r1s) / (1.0 - r1s / r2s)
        rows.append(["point_D", z_d, (1.0 - z_d / r2s) * r1s])
    _emit(args, ["region", "r2", "r1"], rows)
    return EXIT_OK


def _event_rows(cfg: PairingConfig, a2: float, b2: float, methods: list[str],
                args: argparse.Namespace) -> list[list]:
    rows = []
    for method in methods:
        stderr = ("", "", "", "")
        if method == "closed":
            p = analytic.event_probabilities_closed(cfg, a2).as_tuple()
        elif method == "quadrature":
            p = quadrature.event_probabilities_quadrature(
                cfg, a2, b2, args.quad_tol).as_tuple()
        else:
            est = montecarlo.estimate_event_probs(
                cfg, a2, b2, McConfig(trials=args.trials, seed=args.seed,
                                      shards=args.shards))
            p = est.as_tuple()
            stderr = est.stderr
        rows.append([cfg.m, cfg.n, method, *p, *stderr])
    return rows


EVENTS_HEADER = ["m", "n", "method", "p_e1", "p_e2", "p_e3", "p_e4",
                 "stderr_e1", "stderr_e2", "stderr_e3", "stderr_e4"]


def cmd_events(args: argparse.Namespace) -> int:
    rho = 10.0**(args.rho_db / 10.0)
    cfg = PairingConfig(args.M, args.m, args.n, rho)
    a2 = _resolve_a2(args.a2_mode, rho)
    methods = ["closed", "quadrature", "mc"] if args.method == "all" \
        else [args.method]
    rows = _event_rows(cfg, a2, args.b2, methods, args)
    _emit(args, EVENTS_HEADER, rows)
    return EXIT_OK


def cmd_sweep_n(args: argparse.Namespace) -> int:
    rho = 10.0**(args.rho_db / 10.0)
    a2 = _resolve_a2(args.a2_mode, rho)
    methods = ["closed", "quadrature", "mc"] if args.method == "all" \
        else [args.method]
    rows = []
    prev = {}
    for n in range(args.m + 1, args.M + 1):
        cfg = PairingConfig(args.M, args.m, n, rho)
        for method in methods:
            if method == "closed":
                p2, se = analytic.p_eps2_closed(cfg, a2), ""
            elif method == "quadrature":
                p2, se = quadrature.p_event_quadrature(
                    EventId.E2, cfg, a2, args.b2, args.quad_tol), ""
            else:
                est = montecarlo.estimate_event_probs(
                    cfg, a2, args.b2,
                    McConfig(trials=args.trials, seed=args.seed,
                             shards=args.shards))
                p2, se = est.p2, est.stderr[1]
            if method in prev and p2 < prev[method] - 1e-9:
                print(f"warning: p_e2 not non-decreasing at n={n} "
                      f"({method}: {prev[method]} -> {p2})", file=sys.stderr)
            prev[method] = p2
            rows.append([n, method, p2, se])
    _emit(args, ["n", "method", "p_e2", "stderr_e2"], rows)
    return EXIT_OK


def cmd_rates(args: argparse.Namespace) -> int:
    rows = []
    for rho_db in args.rho_db:
        rho = 10.0**(rho_db / 10.0)
        cfg = PairingConfig(args.M, args.m, args.n, rho)
        a2 = analytic.optimal_a2_special(rho)
        est = montecarlo.estimate_average_rates(
            cfg, a2, 0.5, McConfig(trials=args.trials, seed=args.seed,
                                   shards=args.shards))
        rows.append([rho_db, est.r1_noma, est.r2_noma, est.r1_tdma,
                     est.r2_tdma, *est.stderr])
    _emit(args, ["rho_db", "r1_noma", "r2_noma", "r1_tdma", "r2_tdma",
                 "stderr_r1_noma", "stderr_r2_noma", "stderr_r1_tdma",
                 "stderr_r2_tdma"], rows)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    suites = list(validation.SUITES) if args.suite == "all" else [args.suite]
    records = validation.run_suites(suites, args.seed)
    rows = [[r["suite"], r["check"], "pass" if r["passed"] else "FAIL",
             r["detail"]] for r in records]
    for row in rows:
        print(f"[{row[2]:>4}] {row[0]}/{row[1]}: {row[3]}")
    if args.out is not None:
        _emit(args, ["suite", "check", "status", "detail"], rows)
    failed = sum(not r["passed"] for r in records)
    print(f"{len(records) - failed}/{len(records)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_output_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")


def _add_mc_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--trials", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--shards", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-tdma",
        description="Two-user NOMA vs. TDMA rate regions and event probabilities")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("regions", help="sample the three region boundaries")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--points", type=int, default=201)
    sp.add_argument("--mark-a2", type=float, default=None,
                    help="also emit the N/T points and B/C/D intersections")
    sp.add_argument("--mark-b2", type=float, default=0.5)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_regions)

    sp = sub.add_parser("events", help="event probabilities for one pairing")
    sp.add_argument("--M", type=int, default=10)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rho-db", type=float, default=25.0)
    sp.add_argument("--a2-mode", default="inv_sqrt_rho")
    sp.add_argument("--b2", type=float, default=0.5)
    sp.add_argument("--method", choices=["closed", "quadrature", "mc", "all"],
                    default="all")
    sp.add_argument("--quad-tol", type=float, default=1e-6)
    _add_mc_args(sp)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_events)

    sp = sub.add_parser("sweep-n", help="P(E2) as a function of n")
    sp.add_argument("--M", type=int, default=10)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--rho-db", type=float, default=25.0)
    sp.add_argument("--a2-mode", default="inv_sqrt_rho")
    sp.add_argument("--b2", type=float, default=0.5)
    sp.add_argument("--method", choices=["closed", "quadrature", "mc", "all"],
                    default="closed")
    sp.add_argument("--quad-tol", type=float, default=1e-6)
    _add_mc_args(sp)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_sweep_n)

    sp = sub.add_parser("rates", help="average per-user rates vs. SNR")
    sp.add_argument("--M", type=int, default=10)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--rho-db", type=float, nargs="+", required=True)
    _add_mc_args(sp)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("validate", help="run the self-check suites")
    sp.add_argument("--suite",
                    choices=[*validation.SUITES, "all"], default="all")
    sp.add_argument("--seed", type=int, default=42)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
