"""Command-line front end.

Subcommands:
    calibrate   solve for the drift distribution hitting target returns
    analytic    print the closed-form index/median/factor quantities
    demo        exact five-stock worked example (one big winner)
    enumerate   exhaustive subset statistics for a given value list
    simulate    Monte Carlo frequency experiment, CSV (and SVG) output

Configuration sources for ``simulate``, highest precedence first: command
line flags, a ``key = value`` config file (--config), the INDEXSIM_SEED
environment variable (seed only), built-in defaults.  Every simulate run
writes a ``<out>.config`` sidecar echoing the effective configuration;
re-running with ``--config <sidecar>`` reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analytic import (
    CalibrationError,
    CalibrationTarget,
    calibrate,
    summarize,
)
from .enumeration import DeterministicIndex, EnumerationCapError, enumerate_portfolios
from .model import ModelParams
from .montecarlo import (
    DEFAULT_BENCHMARKS,
    DEFAULT_SIZE_GRID,
    DEFAULT_TRIALS,
    ExperimentConfig,
    run_experiment,
)
from .report import emit_csv, emit_svg_chart

SEED_ENV_VAR = "INDEXSIM_SEED"
DEFAULT_SEED = 42

# One 50% winner hiding among four 10% stocks; picks of one or two stocks.
FIVE_STOCK_VALUES = (1.1, 1.1, 1.1, 1.1, 1.5)
FIVE_STOCK_SIZES = (1, 2)

_PRESET = {
    "n_stocks": 500,
    "horizon": 5.0,
    "sigma": 0.2,
    "median": 0.10,
    "expected": 0.50,
    "trials": DEFAULT_TRIALS,
    "sizes": ",".join(str(k) for k in DEFAULT_SIZE_GRID),
    "benchmarks": ",".join(f"{o}:{u}" for o, u in DEFAULT_BENCHMARKS),
    "mode": "fixed-benchmark",
    "sampling": "fresh-universe",
}


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ValueError(f"invalid sizes list: {text!r}") from None


def _parse_benchmarks(text: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        over, sep, under = part.partition(":")
        if not sep:
            raise ValueError(f"benchmark pair must look like over:under, got {part!r}")
        pairs.append((float(over), float(under)))
    return tuple(pairs)


def load_config_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    entries = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        entries[key.strip()] = value.strip()
    return entries


class _Resolver:
    """Layered lookup: flag value, then config file, then a default."""

    def __init__(self, args: argparse.Namespace, file_values: dict[str, str], preset: bool):
        self.args = args
        self.file_values = file_values
        self.preset = preset

    def get(self, key: str, default=None, convert=str):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.file_values:
            return convert(self.file_values[key])
        if self.preset and key in _PRESET:
            return convert(_PRESET[key])
        return default


def _resolve_seed(resolver: _Resolver) -> int:
    value = resolver.get("seed", default=None, convert=int)
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _resolve_model(resolver: _Resolver) -> ModelParams:
    n_stocks = int(resolver.get("n_stocks", 500, int))
    horizon = float(resolver.get("horizon", 5.0, float))
    sigma = float(resolver.get("sigma", 0.2, float))
    mu_hat = resolver.get("mu_hat", None, float)
    sigma_hat = resolver.get("sigma_hat", None, float)
    if mu_hat is None or sigma_hat is None:
        median = resolver.get("median", None, float)
        expected = resolver.get("expected", None, float)
        if median is None or expected is None:
            raise ValueError(
                "model is underspecified: give --mu-hat and --sigma-hat, or "
                "--median and --expected (or --paper-defaults)"
            )
        target = CalibrationTarget(
            median_return=float(median), expected_return=float(expected),
            sigma=sigma, horizon=horizon,
        )
        mu_hat, sigma_hat = calibrate(target)
    return ModelParams(
        n_stocks=n_stocks, horizon=horizon, sigma=sigma,
        mu_hat=float(mu_hat), sigma_hat=float(sigma_hat),
    )


def _cmd_calibrate(args: argparse.Namespace) -> int:
    target = CalibrationTarget(
        median_return=args.median, expected_return=args.expected,
        sigma=args.sigma, horizon=args.horizon,
    )
    mu_hat, sigma_hat = calibrate(target)
    print(f"mu_hat    = {mu_hat:.10f}  (~ {round(mu_hat * 100):d}%)")
    print(f"sigma_hat = {sigma_hat:.10f}  (~ {round(sigma_hat * 100):d}%)")
    return 0


def _cmd_analytic(args: argparse.Namespace) -> int:
    resolver = _Resolver(args, {}, preset=args.paper_defaults)
    params = _resolve_model(resolver)
    summary = summarize(params)
    if args.json:
        print(
            json.dumps(
                {
                    "expected_index_value": summary.expected_index_value,
                    "median_stock_value": summary.median_stock_value,
                    "underperformance_factor": summary.underperformance_factor,
                    "log_mean": summary.log_mean,
                    "log_variance": summary.log_variance,
                },
                sort_keys=True,
            )
        )
    else:
        print(f"expected_index_value = {summary.expected_index_value:.6f}")
        print(f"median_stock_value = {summary.median_stock_value:.6f}")
        print(f"underperformance_factor = {summary.underperformance_factor:.6f}")
        print(f"log_mean = {summary.log_mean:.6f}")
        print(f"log_variance = {summary.log_variance:.6f}")
    return 0


def _print_subset_stats(stats, benchmark: float) -> None:
    print("return    count")
    for value, count in stats.returns_histogram:
        print(f"{value:.6f}  {count}")
    below, equal, above = stats.benchmark_comparisons[benchmark]
    print(
        f"benchmark={benchmark:.6f} below={below} equal={equal} above={above}"
    )
    print(
        f"portfolios={stats.portfolio_count} "
        f"mean={stats.mean_return:.6f} "
        f"median={stats.median_return:.6f} "
        f"under_fraction={below / stats.portfolio_count:.6f}"
    )


def _cmd_demo(args: argparse.Namespace) -> int:
    index = DeterministicIndex(FIVE_STOCK_VALUES)
    benchmark = float(args.benchmark)
    stats = enumerate_portfolios(index, FIVE_STOCK_SIZES, benchmarks=(benchmark,))
    print("gross values: " + " ".join(f"{v:.2f}" for v in index.gross_values))
    print("subset sizes: " + " ".join(str(k) for k in FIVE_STOCK_SIZES))
    _print_subset_stats(stats, benchmark)
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    values = tuple(float(v) for v in args.values.split(",") if v.strip())
    index = DeterministicIndex(values)
    sizes = _parse_sizes(args.sizes)
    benchmark = float(args.benchmark) if args.benchmark is not None else index.mean_return()
    stats = enumerate_portfolios(index, sizes, benchmarks=(benchmark,), cap=args.cap)
    _print_subset_stats(stats, benchmark)
    return 0


def _effective_config_text(config: ExperimentConfig, precision) -> str:
    p = config.params
    lines = [
        "# effective configuration",
        f"n_stocks = {p.n_stocks}",
        f"horizon = {p.horizon!r}",
        f"sigma = {p.sigma!r}",
        f"mu_hat = {p.mu_hat!r}",
        f"sigma_hat = {p.sigma_hat!r}",
        f"sizes = {','.join(str(k) for k in config.sizes)}",
        f"trials = {config.trials_per_size}",
        f"benchmarks = {','.join(f'{o!r}:{u!r}' for o, u in config.benchmarks)}",
        f"mode = {config.mode}",
        f"sampling = {config.sampling}",
        f"seed = {config.master_seed}",
        f"precision = {'full' if precision is None else precision}",
    ]
    return "\n".join(lines) + "\n"


_CONFIG_KEYS = frozenset(
    (
        "n_stocks", "horizon", "sigma", "mu_hat", "sigma_hat", "median", "expected",
        "sizes", "trials", "benchmarks", "mode", "sampling", "seed", "precision",
        "out", "svg", "workers", "paper_defaults",
    )
)


def _cmd_simulate(args: argparse.Namespace) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    unknown = sorted(set(file_values) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config file keys: {', '.join(unknown)}")
    preset = args.paper_defaults or file_values.pop("paper_defaults", "").lower() in ("1", "true")
    resolver = _Resolver(args, file_values, preset=preset)

    params = _resolve_model(resolver)
    sizes = _parse_sizes(resolver.get("sizes", ",".join(str(k) for k in DEFAULT_SIZE_GRID)))
    benchmarks = _parse_benchmarks(
        resolver.get("benchmarks", ",".join(f"{o}:{u}" for o, u in DEFAULT_BENCHMARKS))
    )
    config = ExperimentConfig(
        params=params,
        sizes=sizes,
        trials_per_size=int(resolver.get("trials", DEFAULT_TRIALS, int)),
        benchmarks=benchmarks,
        mode=str(resolver.get("mode", "fixed-benchmark")),
        sampling=str(resolver.get("sampling", "fresh-universe")),
        master_seed=_resolve_seed(resolver),
    )

    precision_raw = resolver.get("precision", 6)
    precision = None if str(precision_raw) == "full" else int(precision_raw)
    out_path = Path(resolver.get("out", "frequency_report.csv"))
    workers = int(resolver.get("workers", 1, int))

    report = run_experiment(config, workers=workers)
    emit_csv(report, destination=out_path, precision=precision)
    sidecar = Path(str(out_path) + ".config")
    try:
        sidecar.write_text(_effective_config_text(config, precision), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"failed to write config echo to {sidecar}: {exc}") from exc

    svg_path = resolver.get("svg", None)
    if svg_path is not None:
        svg = emit_svg_chart(report, description=_effective_config_text(config, precision))
        try:
            Path(svg_path).write_text(svg, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"failed to write SVG to {svg_path}: {exc}") from exc

    for row in report.rows:
        print(
            f"k={row.size} over>{row.over_threshold:.2f}: {row.over_freq:.4f} "
            f"(+/- {row.over_ci:.4f})  under<{row.under_threshold:.2f}: "
            f"{row.under_freq:.4f} (+/- {row.under_ci:.4f})"
        )
    print(f"wrote {out_path}")
    print(f"wrote {sidecar}")
    if svg_path is not None:
        print(f"wrote {svg_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indexsim",
        description="Drift-mixture GBM index simulation and subset-picking experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="solve for mu_hat and sigma_hat from target returns")
    cal.add_argument("--median", type=float, required=True, help="target median net return")
    cal.add_argument("--expected", type=float, required=True, help="target expected net return")
    cal.add_argument("--sigma", type=float, required=True, help="annual stock volatility")
    cal.add_argument("--horizon", type=float, required=True, help="horizon in years")
    cal.set_defaults(handler=_cmd_calibrate)

    def add_model_flags(p):
        p.add_argument("--n", dest="n_stocks", type=int, help="number of stocks in the index")
        p.add_argument("--horizon", type=float, help="horizon in years")
        p.add_argument("--sigma", type=float, help="annual stock volatility")
        p.add_argument("--mu-hat", dest="mu_hat", type=float, help="mean of the drift distribution")
        p.add_argument("--sigma-hat", dest="sigma_hat", type=float, help="std dev of the drift distribution")
        p.add_argument("--median", type=float, help="target median net return (calibrates the drifts)")
        p.add_argument("--expected", type=float, help="target expected net return (calibrates the drifts)")
        p.add_argument(
            "--paper-defaults", action="store_true",
            help="use the published reference setup: 500 stocks, 5 years, 20%% volatility, "
            "10%% median and 50%% expected return, 10,000 trials",
        )

    ana = sub.add_parser("analytic", help="closed-form index, median and skew quantities")
    add_model_flags(ana)
    ana.add_argument("--json", action="store_true", help="emit a JSON object instead of text")
    ana.set_defaults(handler=_cmd_analytic)

    demo = sub.add_parser("demo", help="exact five-stock worked example")
    demo.add_argument("--benchmark", type=float, default=0.18, help="net return benchmark (default 0.18)")
    demo.set_defaults(handler=_cmd_demo)

    enu = sub.add_parser("enumerate", help="exhaustive subset statistics for a value list")
    enu.add_argument("--values", required=True, help="comma-separated gross terminal values")
    enu.add_argument("--sizes", required=True, help="comma-separated subset sizes")
    enu.add_argument("--benchmark", type=float, help="net return benchmark (default: index mean return)")
    enu.add_argument("--cap", type=int, default=10_000_000, help="max subsets to enumerate")
    enu.set_defaults(handler=_cmd_enumerate)

    sim = sub.add_parser("simulate", help="Monte Carlo over/under frequency experiment")
    add_model_flags(sim)
    sim.add_argument("--config", help="flat key = value config file; flags override it")
    sim.add_argument("--sizes", help="comma-separated subset sizes")
    sim.add_argument("--trials", type=int, help="trials per (size, benchmark) cell")
    sim.add_argument("--benchmarks", help="comma-separated over:under pairs, e.g. 0.5:0.5,0.7:0.3")
    sim.add_argument("--mode", choices=["fixed-benchmark", "realized-index"], help="comparison mode")
    sim.add_argument("--sampling", choices=["fresh-universe", "direct-iid"], help="sampling scheme")
    sim.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED}; env {SEED_ENV_VAR})")
    sim.add_argument("--workers", type=int, help="worker processes (default 1)")
    sim.add_argument("--out", help="CSV output path (default frequency_report.csv)")
    sim.add_argument("--svg", help="also write an SVG chart to this path")
    sim.add_argument("--precision", help="CSV decimal places, or 'full' (default 6)")
    sim.set_defaults(handler=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (CalibrationError, EnumerationCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
