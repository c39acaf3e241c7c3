"""
Figure bundles: simulated histograms next to the analytic densities.

For every requested L the bundle holds

- fig1: 2-D histogram of Z, the corrected and legacy joint densities on a grid
- fig2: amplitude histogram with corrected and legacy amplitude densities
- fig3: phase histogram with the exact (and, for L >= 2, series) phase density

as CSV tables, plus one gnuplot script per figure rendered from the Jinja2
templates shipped with the package and a manifest.json describing it all.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from jinja2 import Environment, FileSystemLoader

from zpd.domain.models import DEFAULT_REALIZATIONS, ModelParams, validate
from zpd.domain.types import PhaseMethod
from zpd.services.pdfs import (
    PhaseEngine,
    amplitude_grid,
    amplitude_pdf,
    amplitude_pdf_legacy,
    amplitude_radius,
    joint_cell_masses,
    joint_grid,
    joint_pdf,
    joint_pdf_legacy,
    make_curve,
    phase_grid,
)
from zpd.services.simulate import SampleBatch, histogram_1d, histogram_2d, sample_z
from zpd.storage.curves import CurveRepository

logger = logging.getLogger("zpd.figures")

TEMPLATES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "templates")
FIGURE_ORDERS = (1, 5, 10)


@dataclass(frozen=True)
class FigureSettings:
    params: ModelParams = field(default_factory=ModelParams)
    n: int = DEFAULT_REALIZATIONS
    seed: int = 42
    orders: tuple[int, ...] = FIGURE_ORDERS
    bins: int = 100
    bins_2d: int = 80
    joint_points: int = 200
    phase_points: int = 721
    amplitude_points: int = 400
    tail: float = 1e-6


def _environment() -> Environment:
    return Environment(
        loader=FileSystemLoader(TEMPLATES_DIR),
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )


def _joint_panel(repo: CurveRepository, params: ModelParams, batch: SampleBatch, settings: FigureSettings) -> dict[str, Any]:
    big_l = params.big_l
    half_width = amplitude_radius(params, settings.tail)
    centers, step = joint_grid(half_width, settings.joint_points)
    z_r, z_i = np.meshgrid(centers, centers, indexing="ij")
    density = joint_pdf(params, z_r, z_i)
    legacy = joint_pdf_legacy(params, z_r, z_i)
    mass = float(np.sum(joint_cell_masses(params, centers, step)))
    legacy_mass = float(np.sum(joint_cell_masses(params.legacy_equivalent(), centers, step)))

    box = ((-half_width, half_width), (-half_width, half_width))
    hist = histogram_2d(batch.z, settings.bins_2d, box)
    x_mid = 0.5 * (hist.x_edges[:-1] + hist.x_edges[1:])
    y_mid = 0.5 * (hist.y_edges[:-1] + hist.y_edges[1:])
    h_r, h_i = np.meshgrid(x_mid, y_mid, indexing="ij")

    joint_name = f"fig1_L{big_l}_joint.csv"
    hist_name = f"fig1_L{big_l}_hist.csv"
    repo.save_table(joint_name, ["z_r", "z_i", "density", "density_legacy"], [z_r, z_i, density, legacy])
    repo.save_table(hist_name, ["z_r", "z_i", "density"], [h_r, h_i, hist.mass])
    return {
        "L": big_l,
        "joint": joint_name,
        "hist": hist_name,
        "half_width": half_width,
        "grid_mass": mass,
        "legacy_grid_mass": legacy_mass,
        "clipped": hist.clipped,
    }


def _amplitude_panel(repo: CurveRepository, params: ModelParams, batch: SampleBatch, settings: FigureSettings) -> dict[str, Any]:
    big_l = params.big_l
    r_max = max(
        amplitude_radius(params, settings.tail),
        amplitude_radius(params.legacy_equivalent(), settings.tail),
    )
    grid = amplitude_grid(r_max, settings.amplitude_points, positive=big_l == 1)
    hist = histogram_1d(batch.amplitude, settings.bins, (0.0, r_max))

    curves_name = f"fig2_L{big_l}_curves.csv"
    hist_name = f"fig2_L{big_l}_hist.csv"
    repo.save_table(
        curves_name,
        ["r", "density", "density_legacy"],
        [grid, amplitude_pdf(params, grid), amplitude_pdf_legacy(params, grid)],
    )
    repo.save_table(hist_name, ["r", "density"], [hist.centers, hist.mass])
    return {"L": big_l, "curves": curves_name, "hist": hist_name, "r_max": r_max, "clipped": hist.clipped}


def _phase_panel(repo: CurveRepository, params: ModelParams, batch: SampleBatch, settings: FigureSettings) -> dict[str, Any]:
    big_l = params.big_l
    grid = phase_grid(settings.phase_points)
    exact = make_curve(PhaseEngine(params, PhaseMethod.EXACT), grid)
    header, columns = ["theta", "density"], [grid, exact.values]
    has_approx = big_l >= 2
    if has_approx:
        approx = make_curve(PhaseEngine(params, PhaseMethod.APPROX), grid)
        header.append("density_approx")
        columns.append(approx.values)
    hist = histogram_1d(batch.phase, settings.bins, (-math.pi, math.pi))

    curves_name = f"fig3_L{big_l}_curves.csv"
    hist_name = f"fig3_L{big_l}_hist.csv"
    repo.save_table(curves_name, header, columns)
    repo.save_table(hist_name, ["theta", "density"], [hist.centers, hist.mass])
    return {
        "L": big_l,
        "curves": curves_name,
        "hist": hist_name,
        "has_approx": has_approx,
        "curve_mass": exact.periodic_mass(),
    }


def reproduce_figures(settings: FigureSettings, repo: CurveRepository) -> dict[str, Any]:
    """Write every table and script into `repo` and return the manifest."""
    base = validate(settings.params)
    panels: dict[str, list[dict[str, Any]]] = {"fig1": [], "fig2": [], "fig3": []}
    for big_l in settings.orders:
        params = validate(base.with_order(big_l))
        batch = sample_z(params, settings.n, settings.seed)
        panels["fig1"].append(_joint_panel(repo, params, batch, settings))
        panels["fig2"].append(_amplitude_panel(repo, params, batch, settings))
        panels["fig3"].append(_phase_panel(repo, params, batch, settings))
        logger.info("Figure tables written for L=%d", big_l)

    env = _environment()
    context = {"params": base, "n": settings.n, "seed": settings.seed, "bins_2d": settings.bins_2d}
    scripts = {}
    for figure, entries in panels.items():
        script_name = f"{figure}.gp"
        text = env.get_template(f"{figure}.gp.j2").render(panels=entries, **context)
        repo.save_text(script_name, text)
        scripts[figure] = script_name

    manifest = {
        "params": base.as_dict(),
        "n": settings.n,
        "seed": settings.seed,
        "orders": list(settings.orders),
        "figures": {
            figure: {"script": scripts[figure], "panels": entries}
            for figure, entries in panels.items()
        },
    }
    repo.save_json("manifest.json", manifest)
    logger.info("Figure bundle complete: %s", ", ".join(scripts.values()))
    return manifest


__all__ = ["FIGURE_ORDERS", "FigureSettings", "TEMPLATES_DIR", "reproduce_figures"]
