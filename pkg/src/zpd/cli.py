"""
Command-line front end.

    zpd eval --pdf phase --method exact --L 5 --grid 721 --output phase.csv
    zpd sample --L 5 --n 100000 --seed 42 --output z.zpd
    zpd gof --input z.zpd --target amplitude --L 5
    zpd compare --L 5 --n 100000
    zpd reproduce-figures --output figures/

Parameters default to sigma_x=0.7, sigma_y=1.5, |mu|=0.5, eps=pi/6. A
--config file (TOML or JSON, keys sigma_x, sigma_y, mu_abs, epsilon, L)
overrides the defaults and explicit flags override the file.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tomllib
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np
import orjson

from zpd.domain.errors import ConvergenceError, DomainError, FormatError, ResourceError
from zpd.domain.models import DEFAULT_REALIZATIONS, ModelParams, validate
from zpd.domain.types import Command, DensityTarget, OutputFormat, PhaseMethod
from zpd.services.figures import FIGURE_ORDERS, FigureSettings, reproduce_figures
from zpd.services.gof import gof_against
from zpd.services.pdfs import (
    AmplitudeEngine,
    PhaseEngine,
    amplitude_grid,
    amplitude_radius,
    joint_grid,
    joint_pdf,
    joint_pdf_legacy,
    phase_grid,
    phase_pdf_approx,
)
from zpd.services.simulate import sample_z
from zpd.storage.batches import FileSystemBatchRepository
from zpd.storage.curves import FileSystemCurveRepository, dumps_line, write_table

logger = logging.getLogger("zpd")

EXIT_OK = 0
EXIT_GOF_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4
EXIT_IO = 5

DEFAULT_SEED = 42
DEFAULT_GRID = {"phase": 721, "amplitude": 400, "joint": 80}
CURVE_TAIL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    command: Command
    params: ModelParams
    method: PhaseMethod = PhaseMethod.EXACT
    t_terms: Optional[int] = None
    n: int = DEFAULT_REALIZATIONS
    seed: int = DEFAULT_SEED
    bins: int = 100
    bins_2d: int = 80
    output: Optional[str] = None
    fmt: Optional[OutputFormat] = None
    pdf: str = "phase"
    grid: Optional[int] = None
    r_max: Optional[float] = None
    input_path: Optional[str] = None
    target: DensityTarget = DensityTarget.AMPLITUDE
    report: Optional[str] = None
    orders: tuple[int, ...] = FIGURE_ORDERS


# --- Configuration ---

def load_config_file(path: str) -> dict[str, Any]:
    """Flat parameter mapping from a TOML or JSON file (an optional [params] table is unwrapped)."""
    with open(path, "rb") as handle:
        raw = handle.read()
    try:
        if path.lower().endswith(".json"):
            data = orjson.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (orjson.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: cannot parse config ({exc})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: config must be a table of parameters")
    params = data.get("params", data)
    if not isinstance(params, dict):
        raise FormatError(f"{path}: [params] must be a table")
    return params


def resolve_params(args: argparse.Namespace) -> ModelParams:
    mapping: dict[str, Any] = {}
    if getattr(args, "config", None):
        mapping.update(load_config_file(args.config))
    flags = {
        "sigma_x": args.sigma_x,
        "sigma_y": args.sigma_y,
        "mu_abs": args.mu_abs,
        "epsilon": args.epsilon,
        "L": args.big_l,
    }
    mapping.update({key: value for key, value in flags.items() if value is not None})
    return validate(ModelParams.from_mapping(mapping))


def build_run_config(args: argparse.Namespace) -> RunConfig:
    fmt = getattr(args, "format", None)
    return RunConfig(
        command=Command(args.command),
        params=resolve_params(args),
        method=PhaseMethod(getattr(args, "method", PhaseMethod.EXACT.value)),
        t_terms=getattr(args, "t_terms", None),
        n=getattr(args, "n", DEFAULT_REALIZATIONS),
        seed=getattr(args, "seed", DEFAULT_SEED),
        bins=getattr(args, "bins", 100),
        bins_2d=getattr(args, "bins_2d", 80),
        output=getattr(args, "output", None),
        fmt=OutputFormat(fmt) if fmt else None,
        pdf=getattr(args, "pdf", "phase"),
        grid=getattr(args, "grid", None),
        r_max=getattr(args, "r_max", None),
        input_path=getattr(args, "input", None),
        target=DensityTarget(getattr(args, "target", DensityTarget.AMPLITUDE.value)),
        report=getattr(args, "report", None),
        orders=tuple(getattr(args, "orders", FIGURE_ORDERS)),
    )


# --- Commands ---

def _emit(record: dict[str, Any]) -> None:
    sys.stdout.write(dumps_line(record).decode("utf-8"))
    sys.stdout.flush()


def _write_columns(config: RunConfig, header: list[str], columns: list[np.ndarray]) -> None:
    if config.output:
        path = FileSystemCurveRepository().save_table(config.output, header, columns)
        logger.info("Wrote %d rows to %s", np.size(columns[0]), path)
    else:
        write_table(sys.stdout, header, columns)


def cmd_eval(config: RunConfig) -> int:
    """Tabulate a density (raw values, series-approx included) as CSV."""
    params = config.params
    if config.pdf == "phase":
        engine = PhaseEngine(params, config.method, config.t_terms)
        grid = phase_grid(config.grid or DEFAULT_GRID["phase"])
        header, columns = ["theta", "density"], [grid, engine.evaluate(grid)]
        if params.big_l >= 2 and config.method is not PhaseMethod.APPROX:
            header.append("density_approx")
            columns.append(phase_pdf_approx(params, grid, config.t_terms))
    elif config.pdf == "amplitude":
        r_max = config.r_max or max(
            amplitude_radius(params, CURVE_TAIL),
            amplitude_radius(params.legacy_equivalent(), CURVE_TAIL),
        )
        grid = amplitude_grid(r_max, config.grid or DEFAULT_GRID["amplitude"], positive=params.big_l == 1)
        corrected = AmplitudeEngine(params).evaluate(grid)
        legacy = AmplitudeEngine(params, legacy=True).evaluate(grid)
        header, columns = ["r", "density", "density_legacy"], [grid, corrected, legacy]
    else:
        half_width = config.r_max or amplitude_radius(params, CURVE_TAIL)
        centers, _ = joint_grid(half_width, config.grid or DEFAULT_GRID["joint"])
        z_r, z_i = np.meshgrid(centers, centers, indexing="ij")
        header = ["z_r", "z_i", "density", "density_legacy"]
        columns = [z_r, z_i, joint_pdf(params, z_r, z_i), joint_pdf_legacy(params, z_r, z_i)]
    _write_columns(config, header, columns)
    return EXIT_OK


def cmd_sample(config: RunConfig) -> int:
    batch = sample_z(config.params, config.n, config.seed)
    if config.output:
        FileSystemBatchRepository().save(batch, config.output, config.fmt)
    _emit(batch.summary())
    return EXIT_OK


def _report(config: RunConfig, records: list[dict[str, Any]]) -> None:
    for record in records:
        _emit(record)
    if config.report:
        FileSystemCurveRepository().append_reports(config.report, records)


def cmd_gof(config: RunConfig) -> int:
    """Exit 1 when the KS statistic reaches the 1% critical value."""
    z = FileSystemBatchRepository().load(config.input_path, config.fmt)
    if z.size == 0:
        raise DomainError(f"{config.input_path} holds no samples")
    report = gof_against(z, config.params, config.target, config.bins)
    _report(config, [{**report.as_dict(), "L": config.params.big_l}])
    return EXIT_OK if report.passed else EXIT_GOF_FAILED


def cmd_compare(config: RunConfig) -> int:
    params = config.params
    batch = sample_z(params, config.n, config.seed)
    targets = [DensityTarget.AMPLITUDE, DensityTarget.AMPLITUDE_LEGACY, DensityTarget.PHASE_EXACT]
    if params.big_l >= 2:
        targets.append(DensityTarget.PHASE_APPROX)
    records = [
        {**gof_against(batch.z, params, target, config.bins).as_dict(), "L": params.big_l, "seed": config.seed}
        for target in targets
    ]
    _report(config, records)
    return EXIT_OK


def cmd_reproduce_figures(config: RunConfig) -> int:
    settings = FigureSettings(
        params=config.params,
        n=config.n,
        seed=config.seed,
        orders=config.orders,
        bins=config.bins,
        bins_2d=config.bins_2d,
    )
    repo = FileSystemCurveRepository(config.output or "figures")
    manifest = reproduce_figures(settings, repo)
    _emit({"manifest": repo.path_for("manifest.json"), "figures": sorted(manifest["figures"])})
    return EXIT_OK


COMMANDS: dict[Command, Callable[[RunConfig], int]] = {
    Command.EVAL: cmd_eval,
    Command.SAMPLE: cmd_sample,
    Command.GOF: cmd_gof,
    Command.COMPARE: cmd_compare,
    Command.REPRODUCE_FIGURES: cmd_reproduce_figures,
}


# --- Parser ---

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters")
    group.add_argument("--config", help="TOML or JSON file with sigma_x, sigma_y, mu_abs, epsilon, L")
    group.add_argument("--sigma-x", dest="sigma_x", type=float, help="standard deviation of X (default 0.7)")
    group.add_argument("--sigma-y", dest="sigma_y", type=float, help="standard deviation of Y (default 1.5)")
    group.add_argument("--mu-abs", dest="mu_abs", type=float, help="correlation magnitude |mu| (default 0.5)")
    group.add_argument("--epsilon", type=float, help="correlation phase in radians (default pi/6)")
    group.add_argument("--L", dest="big_l", type=_positive_int, help="number of summed products (default 1)")


def _add_sampling_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=_positive_int, default=DEFAULT_REALIZATIONS, help="number of realizations")
    parser.add_argument("--seed", type=_nonnegative_int, default=DEFAULT_SEED, help="64-bit seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zpd",
        description="Densities, sampling and fit checks for sums of products of correlated complex Gaussians",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(Command.EVAL.value, help="tabulate a density as CSV")
    _add_param_flags(p_eval)
    p_eval.add_argument("--pdf", choices=["amplitude", "phase", "joint"], default="phase")
    p_eval.add_argument("--method", choices=[m.value for m in PhaseMethod], default=PhaseMethod.EXACT.value)
    p_eval.add_argument("--t-terms", dest="t_terms", type=_nonnegative_int, help="series truncation T (default L)")
    p_eval.add_argument("--grid", type=_positive_int, help="grid points (per axis for --pdf joint)")
    p_eval.add_argument("--r-max", dest="r_max", type=float, help="amplitude range / joint half-width")
    p_eval.add_argument("--output", help="CSV path (default stdout)")

    p_sample = sub.add_parser(Command.SAMPLE.value, help="draw realizations of Z")
    _add_param_flags(p_sample)
    _add_sampling_flags(p_sample)
    p_sample.add_argument("--output", help="sample file (.csv or ZPD1 binary)")
    p_sample.add_argument("--format", choices=[f.value for f in OutputFormat], help="override the suffix-based format")

    p_gof = sub.add_parser(Command.GOF.value, help="test a sample file against an analytic density")
    _add_param_flags(p_gof)
    p_gof.add_argument("--input", required=True, help="sample file written by `zpd sample`")
    p_gof.add_argument("--format", choices=[f.value for f in OutputFormat])
    p_gof.add_argument("--target", choices=[t.value for t in DensityTarget], default=DensityTarget.AMPLITUDE.value)
    p_gof.add_argument("--bins", type=_positive_int, default=100)
    p_gof.add_argument("--report", help="append the report to this JSON-lines file")

    p_compare = sub.add_parser(Command.COMPARE.value, help="sample and test every density in one run")
    _add_param_flags(p_compare)
    _add_sampling_flags(p_compare)
    p_compare.add_argument("--bins", type=_positive_int, default=100)
    p_compare.add_argument("--report", help="append the reports to this JSON-lines file")

    p_fig = sub.add_parser(Command.REPRODUCE_FIGURES.value, help="write figure tables and gnuplot scripts")
    _add_param_flags(p_fig)
    _add_sampling_flags(p_fig)
    p_fig.add_argument("--orders", type=_positive_int, nargs="+", default=list(FIGURE_ORDERS))
    p_fig.add_argument("--bins", type=_positive_int, default=100)
    p_fig.add_argument("--bins-2d", dest="bins_2d", type=_positive_int, default=80)
    p_fig.add_argument("--output", default="figures", help="output directory")
    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=os.environ.get("LOG_LEVEL", "INFO").upper(),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        config = build_run_config(args)
        return COMMANDS[config.command](config)
    except FormatError as exc:
        logger.error("Malformed input: %s", exc)
        return EXIT_IO
    except DomainError as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        logger.error("Numerical failure: %s", exc)
        return EXIT_CONVERGENCE
    except (ResourceError, OSError) as exc:
        logger.error("I/O or resource error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
