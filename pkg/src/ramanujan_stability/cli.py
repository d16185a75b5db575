"""Command-line interface (``rstab``).

Exit codes: 0 success, 1 an asserted property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as rio
from .arithmetic import ramanujan_row, totient
from .certificates import ClassKSpec, KernelSpec, certify
from .config import ConfigError, RunConfig, apply_overrides, parse_config
from .simulators import (
    DISCRETE_LAMBDA,
    HYBRID_LAMBDA,
    DiscreteSystem,
    DisturbanceSpec,
    HybridSystem,
    SimulationError,
    TraceConfig,
    euclidean_trace,
    example1_system,
    filter_demo,
    hybrid_ramanujan_trace,
    lyapunov_flow_check,
    lyapunov_jump_check,
    ramanujan_trace,
    simulate_discrete,
    simulate_hybrid,
)
from .space import NegativeFormError, TruncationConfig, project_coefficients, truncated_norm

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _emit_rows(rows, out=None) -> None:
    w = csv.writer(out or sys.stdout, lineterminator="\n")
    for key, value in rows:
        if value is None:
            value = ""
        elif isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float):
            value = rio.fmt(value)
        w.writerow([key, value])


def cmd_rsum(args) -> int:
    if args.q < 1:
        raise UsageError("--q must be >= 1")
    if args.n_max is None:
        print(",".join(str(v) for v in ramanujan_row(args.q)))
        return EXIT_OK
    if args.n_max < 0:
        raise UsageError("--n-max must be >= 0")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["q", *[str(n) for n in range(args.n_max + 1)]])
    for q in range(1, args.q + 1):
        row = ramanujan_row(q)
        w.writerow([q, *[row[n] for n in range(args.n_max + 1)]])
    return EXIT_OK


def _read_sequence(path: str):
    try:
        return rio.read_sequence_csv(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_norm(args) -> int:
    seq = _read_sequence(args.input)
    if args.Q < 1:
        raise UsageError("--Q must be >= 1")
    try:
        value, clamped = truncated_norm(seq, TruncationConfig(args.Q, clamp_negative=args.clamp))
    except NegativeFormError as exc:
        print(f"error: {exc}; rerun with --clamp to clamp at zero", file=sys.stderr)
        return EXIT_FAIL
    _emit_rows([("value", value), ("clamped", clamped)])
    return EXIT_OK


def cmd_project(args) -> int:
    seq = _read_sequence(args.input)
    if args.period < 1 or args.D < 1:
        raise UsageError("--period and --D must be >= 1")
    if len(seq) != args.period:
        raise UsageError(f"sequence spans {len(seq)} indices, expected one period of {args.period}")
    coeffs = project_coefficients(seq, args.D)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "alpha", "phi_d"])
    for d, alpha in coeffs.entries.items():
        w.writerow([d, rio.fmt(alpha), totient(d)])
    return EXIT_OK


def cmd_gain(args) -> int:
    try:
        kernel = KernelSpec(args.q, args.M, args.r, args.mode)
        alpha = ClassKSpec(args.alpha_a, args.alpha_p)
        c = certify(kernel, alpha, args.x0_norm, args.W)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_rows(c.as_rows())
    if args.assert_stable and not c.stable:
        return EXIT_FAIL
    return EXIT_OK


def _load_config(args, overrides: dict[str, Optional[str]]) -> RunConfig:
    text = ""
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
    pairs = dict(kv.split("=", 1) for kv in args.set or [] if "=" in kv)
    if any("=" not in kv for kv in args.set or []):
        raise UsageError("--set expects key=value")
    pairs = {k.strip(): v.strip() for k, v in pairs.items()}
    pairs.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return apply_overrides(parse_config(text), pairs)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _discrete_system(cfg: RunConfig) -> DiscreteSystem:
    dim = len(cfg.A) if cfg.system == "custom" else 2
    vec = cfg.dist_vector
    if cfg.disturbance != "zero" and len(vec) != dim:
        raise UsageError(f"dist_vector must have {dim} entries")
    if cfg.disturbance == "prime":
        dist = DisturbanceSpec.prime_indexed(vec)
    elif cfg.disturbance == "residue":
        dist = DisturbanceSpec.residue_class(vec, cfg.m, cfg.r0)
    else:
        dist = DisturbanceSpec()
    if cfg.system == "custom":
        return DiscreteSystem(np.array(cfg.A, dtype=float), dist)
    return example1_system(dist)


def _sim_overrides(args) -> dict[str, Optional[str]]:
    return {"q": args.q, "lambda": args.lam, "window": args.window, "x0": args.x0, "out": args.out}


def cmd_simulate_discrete(args) -> int:
    overrides = _sim_overrides(args)
    overrides["K"] = args.K
    cfg = _load_config(args, overrides)
    system = _discrete_system(cfg)
    if len(cfg.x0) != system.dimension:
        raise UsageError(f"x0 must have {system.dimension} entries")
    trace_cfg = TraceConfig(cfg.q, DISCRETE_LAMBDA if cfg.lam is None else cfg.lam, cfg.window)
    try:
        traj = simulate_discrete(system, cfg.x0, cfg.K)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    eu, ra = euclidean_trace(traj), ramanujan_trace(traj, trace_cfg)
    if cfg.out:
        rio.write_discrete_csv(traj, eu, ra, cfg.out)
        _emit_rows(
            [
                ("out", cfg.out),
                ("steps", cfg.K),
                ("euclid_final", float(eu.value[-1])),
                ("ramanujan_final", float(ra.value[-1])),
                ("clamped_steps", int(ra.clamped.sum())),
            ]
        )
    else:
        rio.write_discrete_csv(traj, eu, ra, sys.stdout)
    return EXIT_OK


def cmd_simulate_hybrid(args) -> int:
    overrides = _sim_overrides(args)
    overrides.update({"T": args.T, "h": args.h})
    cfg = _load_config(args, overrides)
    if len(cfg.x0) != 2:
        raise UsageError("x0 must have 2 entries for the hybrid oscillator")
    system = HybridSystem(T=cfg.T, h=cfg.h)
    trace_cfg = TraceConfig(cfg.q, HYBRID_LAMBDA if cfg.lam is None else cfg.lam, cfg.window)
    try:
        traj = simulate_hybrid(system, cfg.x0)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    eu, ra = euclidean_trace(traj), hybrid_ramanujan_trace(traj, trace_cfg)
    if args.events:
        rio.write_events_csv(traj, args.events)
    if cfg.out:
        rio.write_hybrid_csv(traj, eu, ra, cfg.out)
        flow = lyapunov_flow_check(traj)
        jumps = lyapunov_jump_check(traj)
        _emit_rows(
            [
                ("out", cfg.out),
                ("events", args.events),
                ("jumps", len(traj.events)),
                ("flow_check", flow.ok),
                ("jump_check", jumps.ok),
                ("ramanujan_final", float(ra.value[-1])),
            ]
        )
    else:
        rio.write_hybrid_csv(traj, eu, ra, sys.stdout)
    return EXIT_OK


def cmd_filter_demo(args) -> int:
    try:
        report = filter_demo(args.m, args.r0, args.q, args.horizon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(report.summary())
    print()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["j", "n", "weight"])
    for j, weight in enumerate(report.weights):
        w.writerow([j, args.r0 + args.m * j, weight])
    if report.mobius_identity is False:
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(fast=args.fast)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}: {res.detail} ({res.seconds:.2f}s)")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="trajectory CSV (stdout when omitted)")
    p.add_argument("--q", help="trace modulus")
    p.add_argument("--lambda", dest="lam", help="trace discount in (0, 1]")
    p.add_argument("--window", help="trace window length or 'unbounded'")
    p.add_argument("--x0", help="initial state, comma separated")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rstab", description="Ramanujan-sum stability toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("rsum", help="Ramanujan-sum row or table")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n-max", type=int, help="print c_1..c_Q at n = 0..N as a CSV table")
    p.set_defaults(func=cmd_rsum)

    p = sub.add_parser("norm", help="truncated Ramanujan norm of a sequence CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--clamp", action="store_true", help="clamp a negative form at zero")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("project", help="Ramanujan coefficients of one period")
    p.add_argument("--input", required=True)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("gain", help="small-gain certificate")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--mode", choices=["signed", "abs", "absolute"], default="abs")
    p.add_argument("--alpha-a", type=float, default=1.0)
    p.add_argument("--alpha-p", type=float, default=1.0)
    p.add_argument("--x0-norm", type=float, default=1.0)
    p.add_argument("--W", type=float)
    p.add_argument("--assert-stable", action="store_true")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("simulate-discrete", help="discrete example system")
    _add_sim_flags(p)
    p.add_argument("--K", help="number of steps")
    p.set_defaults(func=cmd_simulate_discrete)

    p = sub.add_parser("simulate-hybrid", help="hybrid oscillator with prime-time jumps")
    _add_sim_flags(p)
    p.add_argument("--events", help="jump-event CSV")
    p.add_argument("--T", help="horizon")
    p.add_argument("--h", help="integrator step")
    p.set_defaults(func=cmd_simulate_hybrid)

    p = sub.add_parser("filter-demo", help="residue-class disturbance filtering")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r0", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--horizon", type=int, default=20)
    p.set_defaults(func=cmd_filter_demo)

    p = sub.add_parser("verify", help="run the built-in invariant suite")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_usage() + "rstab: error: a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
