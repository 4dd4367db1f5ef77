"""Command-line front end.

    levywalk <command> --config PATH [--seed N] [--out DIR] [--workers N]

Commands: simulate-walk, simulate-limit, moments, scaling-fit, ks, density,
govcheck. Every emitted file embeds the resolved config and the package
version. CSV files are comma-separated with a '.' decimal point, LF line
endings, a header row, and 17-significant-digit floats; lines starting with
'#' are comments. Exit codes: 0 success, 1 configuration or validation
error, 2 numerical diagnostic failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import stream
from .analytics import Symbol, governing_equation_check, invert_flt_1d
from .config import ExperimentConfig, load_config
from .errors import BranchError, ConfigError, DiagnosticError, HorizonError
from .limit import Truncation, limit_marginal_samples, sample_jump_series
from .stats import convergence_suite, estimate_moments, fit_variance_exponent
from .walk import walk_marginal_samples

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the standard exit code."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="levywalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    for name, help_text in (
        ("simulate-walk", "sample walk paths on the configured grid"),
        ("simulate-limit", "sample limit-process paths and their jump series"),
        ("moments", "estimate marginal moments on the time grid"),
        ("scaling-fit", "fit the variance growth exponent"),
        ("ks", "run the marginal-convergence KS ladder"),
        ("density", "recover the 1D limit density by transform inversion"),
        ("govcheck", "verify the governing transform identity"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory (default: config or cwd)")
        p.add_argument("--workers", type=int, default=1, help="replica-parallel worker count")
    return parser


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: Path, config: ExperimentConfig, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# levywalk {__version__}\n")
        compact = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
        fh.write(f"# config: {compact}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_json(path: Path, config: ExperimentConfig, command: str, result: dict) -> None:
    payload = {
        "tool": "levywalk",
        "version": __version__,
        "command": command,
        "config": config.to_dict(),
        "result": _jsonable(result),
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cmd_simulate_walk(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    tg = np.asarray(config.t_grid, dtype=float)
    if config.horizon is not None and tg[-1] > config.horizon:
        raise ConfigError(
            f"t_grid reaches {tg[-1]}, beyond the configured horizon {config.horizon}"
        )
    samples = walk_marginal_samples(
        config.moving_time_law_obj(),
        config.direction_law_obj(),
        tg,
        config.replicas,
        config.seed,
        rescale=config.rescale_obj(),
        workers=workers,
    )
    m = samples.shape[2]
    header = ["replica", "t"] + [f"w_{j + 1}" for j in range(m)]
    rows = (
        [i, tg[ti]] + list(samples[i, ti])
        for i in range(samples.shape[0])
        for ti in range(len(tg))
    )
    _write_csv(out_dir / "walk_paths.csv", config, header, rows)


def _cmd_simulate_limit(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    tg = np.asarray(config.t_grid, dtype=float)
    dir_law = config.direction_law_obj()
    samples = limit_marginal_samples(
        config.beta,
        dir_law,
        tg,
        config.replicas,
        config.seed,
        u=config.horizon,
        truncation=config.truncation_obj(),
        workers=workers,
    )
    m = samples.shape[2]
    header = ["replica", "t"] + [f"l_{j + 1}" for j in range(m)]
    rows = (
        [i, tg[ti]] + list(samples[i, ti])
        for i in range(samples.shape[0])
        for ti in range(len(tg))
    )
    _write_csv(out_dir / "limit_paths.csv", config, header, rows)

    # Re-walking the same per-replica streams reproduces exactly the series
    # behind the paths above, so the two files are mutually consistent.
    truncation = config.truncation_obj()
    if truncation is None:
        truncation = Truncation.by_min_jump(1e-6)
    series_header = ["replica", "arrival", "size"] + [f"theta_{j + 1}" for j in range(m)]

    def series_rows():
        for i in range(config.replicas):
            gen = stream(config.seed, "limit", i)
            series = sample_jump_series(config.beta, dir_law, config.horizon, truncation, gen)
            for a, r, th in zip(series.arrival_times, series.sizes, series.directions):
                yield [i, a, r] + list(th)

    _write_csv(out_dir / "jump_series.csv", config, series_header, series_rows())


def _cmd_moments(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    report = estimate_moments(config, workers=workers)
    m = report.mean.shape[1]
    header = (
        ["t"]
        + [f"mean_{j + 1}" for j in range(m)]
        + ["second_moment", "variance"]
        + [f"se_mean_{j + 1}" for j in range(m)]
        + ["se_second_moment"]
    )
    rows = (
        [report.t_grid[ti]]
        + list(report.mean[ti])
        + [report.second_moment[ti], report.variance[ti]]
        + list(report.se_mean[ti])
        + [report.se_second_moment[ti]]
        for ti in range(len(report.t_grid))
    )
    _write_csv(out_dir / "moments.csv", config, header, rows)
    _write_json(
        out_dir / "moments.json",
        config,
        "moments",
        {
            "t_grid": report.t_grid,
            "mean": report.mean,
            "second_moment": report.second_moment,
            "variance": report.variance,
            "se_mean": report.se_mean,
            "se_second_moment": report.se_second_moment,
            "replicas": report.replicas,
        },
    )


def _cmd_scaling_fit(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    report = estimate_moments(config, workers=workers)
    fit = fit_variance_exponent(report)
    _write_json(
        out_dir / "scaling_fit.json",
        config,
        "scaling-fit",
        {
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "t_range": list(fit.t_range),
            "t_grid": report.t_grid,
            "variance": report.variance,
            "replicas": report.replicas,
        },
    )


def _cmd_ks(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    report = convergence_suite(config, workers=workers)
    _write_json(
        out_dir / "ks_report.json",
        config,
        "ks",
        {
            "mode": report.mode,
            "ladder": report.ladder,
            "medians": report.medians,
            "statistics": report.statistics,
            "threshold": report.threshold,
            "decreasing": report.decreasing,
            "final_ok": report.final_ok,
            "passed": report.passed,
        },
    )


def _cmd_density(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    t, x_min, x_max, points = config.density_params()
    symbol = Symbol(config.beta, config.direction_law_obj())
    grid = invert_flt_1d(symbol, t, np.linspace(x_min, x_max, points))
    _write_csv(
        out_dir / "density.csv",
        config,
        ["x", "value"],
        ([x, v] for x, v in zip(grid.x_grid, grid.values)),
    )
    _write_json(
        out_dir / "density.json",
        config,
        "density",
        {
            "t": grid.t,
            "mass": grid.mass,
            "second_moment": grid.second_moment,
            "points": points,
        },
    )


def _cmd_govcheck(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    symbol = Symbol(config.beta, config.direction_law_obj())
    samples = None
    t_grid = None
    if config.horizon is not None:
        t_grid = np.asarray(config.t_grid, dtype=float)
        samples = limit_marginal_samples(
            config.beta,
            config.direction_law_obj(),
            t_grid,
            config.replicas,
            config.seed,
            u=config.horizon,
            truncation=config.truncation_obj(),
            workers=workers,
        )
    report = governing_equation_check(
        symbol,
        np.asarray(config.k_grid, dtype=float),
        np.asarray(config.s_grid, dtype=float),
        t_grid=t_grid,
        samples=samples,
    )
    _write_json(
        out_dir / "govcheck.json",
        config,
        "govcheck",
        {
            "max_algebraic_residual": report.max_algebraic_residual,
            "algebraic_tol": report.algebraic_tol,
            "rows": list(report.rows),
            "passed": report.passed,
        },
    )
    if not report.passed:
        raise DiagnosticError(
            "Monte Carlo rows exceeded their budget; see govcheck.json"
        )


_COMMANDS = {
    "simulate-walk": _cmd_simulate_walk,
    "simulate-limit": _cmd_simulate_limit,
    "moments": _cmd_moments,
    "scaling-fit": _cmd_scaling_fit,
    "ks": _cmd_ks,
    "density": _cmd_density,
    "govcheck": _cmd_govcheck,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigError("choose a command; see --help")
        config = load_config(args.config)
        if args.seed is not None:
            config = config.replace(seed=args.seed)
        if args.out is not None:
            config = config.replace(out=args.out)
        workers = max(1, int(args.workers))
        config.validate_for(args.command)
        out_dir = Path(config.out) if config.out else Path.cwd()
        out_dir.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](config, out_dir, workers)
    except (ConfigError, BranchError, HorizonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DiagnosticError as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
