"""Command-line interface.

Subcommands: ``osc``, ``maximal``, ``exp <name>``, ``oracle``, ``selftest``.
Experiment subcommands emit `experiment,params,metric,value,bound,pass` CSV;
``osc`` emits oscillation-report CSV and ``maximal`` emits profile CSV. When
``--out`` is given a companion PNG is rendered next to the CSV unless
``--no-figures`` is passed.

Exit codes: 0 all pass flags true, 2 some pass flag false, 3 rejected inputs.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import figures, harness
from .harness import DEFAULT_CONFIG, EXPERIMENTS, all_passed, write_rows
from .maximal import MaximalEvaluator, mhl_scale_split
from .oscillation import bmo_norm_1d, omega, write_reports
from .sampling import (
    log_abs_sampler,
    log_minus_power_sampler,
    log_plus_sampler,
    sample_to_step,
)
from .stepfn import RejectionError, indicator, jump, read_stepfn


def _parse_window(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def build_profile(name: str, window, cell_error: float):
    lo, hi = window
    if name == "box":
        return indicator((0.0, 1.0), pad=max(1.0, -lo, hi - 1.0))
    if name == "jump":
        return jump(window)
    if name == "logplus":
        return sample_to_step(log_plus_sampler(hi), (0.0, hi), cell_error)
    if name == "logabs":
        return sample_to_step(log_abs_sampler(lo, hi), window, cell_error)
    if name == "logminus_sqrt":
        return sample_to_step(log_minus_power_sampler(0.5, domain=window),
                              window, cell_error)
    raise RejectionError(f"unknown profile {name!r}")


PROFILES = ("box", "jump", "logplus", "logabs", "logminus_sqrt")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=_parse_window, default=(-4.0, 4.0),
                   metavar="LO:HI")
    p.add_argument("--resolution", type=int, default=256,
                   help="raster cells per axis; 1/resolution is the sampler "
                        "cell error")
    p.add_argument("--refine", type=int, default=10)
    p.add_argument("--out", type=Path, default=None, metavar="FILE.csv")
    p.add_argument("--seed", type=int, default=DEFAULT_CONFIG.seed)
    p.add_argument("--no-figures", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oscmax")
    sub = ap.add_subparsers(dest="command", required=True)

    p_osc = sub.add_parser("osc", help="BMO norm / oscillation modulus search")
    _add_common(p_osc)
    p_osc.add_argument("--profile", choices=PROFILES, default="logminus_sqrt")
    p_osc.add_argument("--input", type=Path, default=None,
                       help="step function file (overrides --profile)")
    p_osc.add_argument("--delta", type=float, default=None,
                       help="restrict to intervals of length <= delta")
    p_osc.add_argument("--mode", choices=("L1", "L2"), default="L1")

    p_max = sub.add_parser("maximal", help="maximal-operator profile")
    _add_common(p_max)
    p_max.add_argument("--profile", choices=PROFILES, default="box")
    p_max.add_argument("--input", type=Path, default=None)
    p_max.add_argument("--queries", type=int, default=257,
                       help="number of evenly spaced query points")
    p_max.add_argument("--cfactor", type=float, default=None,
                       help="also emit the local/nonlocal split at this factor")

    p_exp = sub.add_parser("exp", help="run a named experiment")
    p_exp.add_argument("experiment", choices=sorted(EXPERIMENTS))
    _add_common(p_exp)
    p_exp.add_argument("--c", type=float, default=None, dest="mask_left")
    p_exp.add_argument("--n", type=str, default=None,
                       help="comma-separated ramp sizes")
    p_exp.add_argument("--N", type=str, default=None, dest="levels",
                       help="comma-separated dyadic level counts")
    p_exp.add_argument("--p", type=float, default=0.5)
    p_exp.add_argument("--q", type=float, default=0.5)
    p_exp.add_argument("--cfactor", type=str, default=None,
                       help="comma-separated localization factors")
    p_exp.add_argument("--lambda", type=float, default=None, dest="lam")
    p_exp.add_argument("--kmax", type=int, default=None)
    p_exp.add_argument("--vmo-profile", choices=("logminus_sqrt", "jump"),
                       default="logminus_sqrt")

    p_or = sub.add_parser("oracle", help="randomized equivalence checks")
    _add_common(p_or)

    p_self = sub.add_parser("selftest", help="fast smoke slice of everything")
    _add_common(p_self)
    return ap


def _maybe_figure(args, render) -> None:
    if args.out is not None and not args.no_figures:
        render(args.out.with_suffix(".png"))


def _finish_rows(args, rows, name: str) -> int:
    if args.out is not None:
        write_rows(rows, args.out)
        _maybe_figure(args, lambda p: figures.render_experiment(name, rows, p))
    for r in rows:
        bound = "" if r.bound is None else f" bound={r.bound:.6g}"
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.experiment} {r.params_str()} "
              f"{r.metric}={r.value:.6g}{bound}")
    return 0 if all_passed(rows) else 2


def _config_for(args) -> harness.HarnessConfig:
    return replace(DEFAULT_CONFIG, seed=args.seed,
                   cell_error=1.0 / max(args.resolution, 2),
                   bmo_refine=args.refine)


def run_osc(args) -> int:
    cell_error = 1.0 / max(args.resolution, 2)
    f = read_stepfn(args.input) if args.input else \
        build_profile(args.profile, args.window, cell_error)
    if args.delta is None:
        rep = bmo_norm_1d(f, args.window, args.refine, args.mode)
    else:
        rep = omega(f, args.delta, args.window, args.refine, args.mode)
    if args.out is not None:
        write_reports([rep], args.out)
        _maybe_figure(args, lambda p: figures.render_reports([rep], p))
    print(f"{rep.family} value={rep.value:.12g} "
          f"argmax=[{rep.argmax[0]:.6g}, {rep.argmax[1]:.6g}]")
    return 0


def run_maximal(args) -> int:
    cell_error = 1.0 / max(args.resolution, 2)
    f = read_stepfn(args.input) if args.input else \
        build_profile(args.profile, args.window, cell_error)
    lo, hi = args.window
    qs = np.linspace(lo, hi, args.queries)
    ev = MaximalEvaluator(f, args.window)
    pairs = ev.profile(qs)
    lines = []
    if args.cfactor is not None:
        q0_len = (hi - lo) / 64.0
        header = "x,value,local,nonlocal,cfactor"
        for x, v in pairs:
            left = min(max(lo, x - q0_len / 2), hi - q0_len)
            loc, nl = mhl_scale_split(f, x, (left, left + q0_len),
                                      args.cfactor, args.window)
            lines.append(f"{x:.17g},{v:.17g},{loc:.17g},{nl:.17g},{args.cfactor:.17g}")
    else:
        header = "x,value"
        lines = [f"{x:.17g},{v:.17g}" for x, v in pairs]
    if args.out is not None:
        args.out.write_text(header + "\n" + "\n".join(lines) + "\n")
        _maybe_figure(args, lambda p: figures.render_profile(pairs, p))
    else:
        print(header)
        for ln in lines[:16]:
            print(ln)
        if len(lines) > 16:
            print(f"... ({len(lines)} rows; use --out to keep them)")
    return 0


def run_exp(args) -> int:
    cfg = _config_for(args)
    name = args.experiment
    kwargs = {}
    if name == "discontinuity":
        if args.mask_left is not None:
            kwargs["mask_left"] = args.mask_left
        if args.n:
            kwargs["lengths"] = [int(t) for t in args.n.split(",")]
    elif name == "vmo":
        kwargs["profile"] = args.vmo_profile
        if args.cfactor:
            kwargs["cfactors"] = [float(t) for t in args.cfactor.split(",")]
    elif name == "product":
        kwargs.update(p=args.p, q=args.q)
    elif name == "strong":
        if args.levels:
            kwargs["levels"] = [int(t) for t in args.levels.split(",")]
        kwargs.update(p=args.p, q=args.q)
    elif name == "expint":
        if args.lam is not None:
            kwargs["lam"] = args.lam
        if args.kmax is not None:
            kwargs["kmax"] = args.kmax
    rows = EXPERIMENTS[name](cfg, **kwargs)
    return _finish_rows(args, rows, name)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "osc":
            return run_osc(args)
        if args.command == "maximal":
            return run_maximal(args)
        if args.command == "exp":
            return run_exp(args)
        if args.command == "oracle":
            return _finish_rows(args, harness.oracle_suite(_config_for(args)),
                                "oracle")
        if args.command == "selftest":
            return _finish_rows(args, harness.selftest(_config_for(args)),
                                "selftest")
        raise RejectionError(f"unknown command {args.command!r}")
    except RejectionError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
