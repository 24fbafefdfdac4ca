"""Command-line interface.

Subcommands: rank, bec, bsc, expected-size, spectrum, closure, bounds, grid.
Output is one JSON summary object per line (or CSV rows with --format csv).
Exit codes: 0 on completion, 1 on configuration errors, 2 on any violated
per-trial assertion.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from .errors import ConfigError, ResourceLimitError, TrialAssertionError
from .lab import (
    ExperimentConfig,
    run_experiment,
    run_grid,
    summaries_to_csv,
)
from .spectrum import (
    DEFAULT_ENUM_CAP,
    BoundParams,
    cached_enumerator,
    low_weight_bound_exponent,
    low_weight_bound_exponent_simplified,
    medium_weight_bound_exponent,
    min_sufficient_c4_low,
    min_sufficient_c4_medium,
    save_enumerator,
    wtdist,
)
from .vanishing import PointSet, closure, is_minimal_rank, vanishing_space

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(sub, *, needs_r=False, needs_d=False):
    sub.add_argument("--m", type=int, required=True, help="number of variables")
    if needs_r:
        sub.add_argument("--r", type=int, required=True, help="degree bound")
    if needs_d:
        sub.add_argument("--d", type=int, required=True, help="code degree")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, help="subset size")
    group.add_argument(
        "--epsilon", type=float, help="k = round((1 - epsilon) * C(m,<=r))"
    )
    sub.add_argument("--trials", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument(
        "--sampling", choices=("distinct", "with-replacement"), default="distinct"
    )
    sub.add_argument("--verify", action="store_true", help="extra per-trial checks")
    _add_output(sub)


def _add_output(sub):
    sub.add_argument("--out", help="output path (default stdout)")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rmlab", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    for mode in ("rank", "bsc", "expected-size", "closure"):
        sub = subs.add_parser(mode, help=f"run the {mode} experiment")
        _add_common(sub, needs_r=True)
        if mode == "closure":
            sub.add_argument(
                "--points", help="point-set fixture file; one-shot, no sampling"
            )
    sub = subs.add_parser("bec", help="run the erasure-decoding experiment")
    _add_common(sub, needs_d=True)

    sub = subs.add_parser("spectrum", help="exact weight spectrum report")
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--r", type=int, required=True)
    sub.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    sub.add_argument("--shards", type=int, default=1)
    sub.add_argument("--save-enumerator", help="also write the cache file here")
    _add_output(sub)

    sub = subs.add_parser("bounds", help="evaluate spectrum bound exponents")
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--r", type=int, required=True)
    sub.add_argument("--ell", default="2", help="comma-separated list")
    sub.add_argument("--c4", type=float, default=1.0)
    sub.add_argument("--a-low", type=float, default=1.0)
    sub.add_argument("--a-med", type=float, default=1.0)
    sub.add_argument("--b-med", type=float, default=1.0)
    sub.add_argument(
        "--compare",
        action="store_true",
        help="compare against the exact enumerator and report minimal c4",
    )
    sub.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    _add_output(sub)

    sub = subs.add_parser("grid", help="run a config-file grid of experiments")
    sub.add_argument("--config", help="JSON grid file (default: packaged grid)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--verify", action="store_true")
    _add_output(sub)
    return parser


def _write_output(summaries, args) -> None:
    if args.format == "csv":
        text = summaries_to_csv(summaries)
    else:
        text = "".join(s.to_json_line() + "\n" for s in summaries)
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _experiment_config(args, mode: str) -> ExperimentConfig:
    if args.k is None and args.epsilon is None:
        raise ConfigError("one of --k / --epsilon is required")
    return ExperimentConfig(
        mode=mode,
        m=args.m,
        r=getattr(args, "r", None),
        d=getattr(args, "d", None),
        k=args.k,
        epsilon=args.epsilon,
        trials=args.trials,
        seed=args.seed,
        sampling=args.sampling,
        verify=args.verify,
        threads=args.threads,
    )


def _run_closure_fixture(args) -> None:
    with open(args.points, encoding="ascii") as fh:
        zs = PointSet.from_text(fh.read())
    cl = closure(zs, args.r)
    vs = vanishing_space(zs, args.r)
    payload = {
        "config": {"mode": "closure", "m": zs.m, "r": args.r, "points": len(zs)},
        "metrics": {
            "closure_size": len(cl),
            "closure_equals_set": cl == zs,
            "vanishing_dim": vs.dim,
            "ambient_dim": vs.ambient,
            "minimal_rank": is_minimal_rank(zs, args.r),
            "closure_points": [z for z in cl],
        },
        "per_trial": {},
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_spectrum(args) -> None:
    from .lab import run_spectrum_report

    cfg = ExperimentConfig(
        mode="spectrum", m=args.m, r=args.r, oracle_cap=args.cap, threads=args.threads
    )
    if args.shards != 1:
        # run through the sharded enumerator explicitly to honor the flag
        from .spectrum import weight_enumerator

        weight_enumerator(args.m, args.r, cap=args.cap, shards=args.shards)
    summary = run_spectrum_report(cfg)
    if args.save_enumerator:
        save_enumerator(cached_enumerator(args.m, args.r, args.cap), args.save_enumerator)
    _write_output([summary], args)


def _run_bounds(args) -> None:
    from .lab import ExperimentSummary

    params = BoundParams.for_code(
        args.m, args.r, c4=args.c4, a_low=args.a_low, a_med=args.a_med, b_med=args.b_med
    )
    ells = [int(x) for x in str(args.ell).split(",") if x.strip()]
    we = None
    if args.compare:
        we = cached_enumerator(args.m, args.r, args.cap)
    summaries = []
    for ell in ells:
        metrics = {
            "gamma": params.gamma,
            "c4": params.c4,
            "low_bound_exponent": low_weight_bound_exponent(params, args.m, args.r, ell),
            "low_bound_exponent_simplified": low_weight_bound_exponent_simplified(
                params, args.m, args.r, ell
            ),
        }
        try:
            metrics["medium_bound_exponent"] = medium_weight_bound_exponent(
                params, args.m, args.r, ell
            )
        except ValueError as exc:
            metrics["medium_bound_exponent_error"] = str(exc)
        if we is not None:
            metrics["wtdist_low"] = wtdist(we, Fraction(1, 1 << ell))
            metrics["wtdist_medium"] = wtdist(
                we, Fraction(1, 2) - Fraction(1, 1 << ell)
            )
            metrics["min_sufficient_c4_low"] = min_sufficient_c4_low(we, ell, params)
            if "medium_bound_exponent" in metrics:
                metrics["min_sufficient_c4_medium"] = min_sufficient_c4_medium(
                    we, ell, params
                )
        summaries.append(
            ExperimentSummary(
                {"mode": "bounds", "m": args.m, "r": args.r, "ell": ell}, metrics
            )
        )
    _write_output(summaries, args)


def default_grid() -> list[dict]:
    text = resources.files("rmlab.data").joinpath("default_grid.json").read_text()
    return json.loads(text)["runs"]


def _run_grid_cmd(args) -> None:
    if args.config:
        with open(args.config, encoding="ascii") as fh:
            entries = json.load(fh)["runs"]
    else:
        entries = default_grid()
    summaries = run_grid(
        entries, args.seed, threads=args.threads, verify=args.verify
    )
    _write_output(summaries, args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "spectrum":
            _run_spectrum(args)
        elif args.command == "bounds":
            _run_bounds(args)
        elif args.command == "grid":
            _run_grid_cmd(args)
        elif args.command == "closure" and args.points:
            _run_closure_fixture(args)
        else:
            cfg = _experiment_config(args, args.command)
            summary = run_experiment(cfg)
            _write_output([summary], args)
    except (ConfigError, ResourceLimitError, ValueError, OSError) as exc:
        print(f"rmlab: config error: {exc}", file=sys.stderr)
        return 1
    except TrialAssertionError as exc:
        print(f"rmlab: per-trial assertion violated: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
