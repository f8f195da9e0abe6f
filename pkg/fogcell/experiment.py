"""
Command bodies behind the ``fogcell`` CLI.

Each ``cmd_*`` function takes an effective :class:`ExperimentConfig` and returns the
exact text of its output file, so callers (and tests) can compare runs byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from fogcell import __version__
from fogcell.config import ExperimentConfig
from fogcell.exceptions import NoReachablePointError
from fogcell.logging import get_logger
from fogcell.models.bandwidth_allocation import sweep_throughput
from fogcell.models.delay_model import (
    CalibrationResult,
    SweepCurve,
    calibrate,
    find_turning_point,
    sweep_density,
)
from fogcell.models.mmwave_link import link_margin_db, p_hop_analytic, p_hop_monte_carlo
from fogcell.reporting import fmt, header_block, render_csv, render_key_values
from fogcell.simulation import EVENT_COLUMNS, SimSummary, run

logger = get_logger(__name__)

DELAY_COLUMNS = ("la_m", "rho_veh_per_m", "k", "p_hop", "delay_ms", "reachable")
THROUGHPUT_COLUMNS = ("n", "scheme", "mean_throughput_mbps", "ci95_mbps", "trials", "seed")
LINK_CHECK_COLUMNS = ("delta_m", "margin_db", "p_hop_analytic", "p_hop_mc", "ci95", "abs_diff")

TURNING_POINT = "turning_point"
NO_TURNING_POINT = "no_turning_point"


def _header(command: str, config: ExperimentConfig) -> list[str]:
    return header_block(command, __version__, config.header_lines())


@dataclass
class DelaySweepOutput:
    text: str
    curves: list[SweepCurve]

    @property
    def any_reachable(self) -> bool:
        return any(p.result.reachable for curve in self.curves for p in curve.points)


def cmd_delay_sweep(config: ExperimentConfig) -> DelaySweepOutput:
    """
    Delay against density for every L_a.

    Rows run L_a outer, ρ ascending inner. Each L_a block ends with a summary row
    marked ``turning_point`` (or ``no_turning_point`` when the whole curve is
    unreachable).
    """
    link, dp, grid = config.link, config.delay_params, config.rho_grid
    logger.info("delay-sweep: %d densities x %d distances", len(grid), len(config.la_list))
    curves, rows = [], []
    for l_a in config.la_list:
        curve = sweep_density(l_a, grid, link, dp, config.hop_mode)
        curves.append(curve)
        for point in curve.points:
            res = point.result
            rows.append((l_a, point.rho, res.k, res.per_hop_p[0], res.delay_ms, res.reachable))
        try:
            rho_star, _ = find_turning_point(curve)
        except NoReachablePointError:
            logger.warning("L_a=%s m: no reachable density on the grid", fmt(l_a))
            rows.append((l_a, None, None, None, None, NO_TURNING_POINT))
            continue
        best = next(p.result for p in curve.points if p.rho == rho_star)
        rows.append((l_a, rho_star, best.k, best.per_hop_p[0], best.delay_ms, TURNING_POINT))

    text = render_csv(_header("delay-sweep", config), DELAY_COLUMNS, rows)
    return DelaySweepOutput(text=text, curves=curves)


def cmd_throughput(
    config: ExperimentConfig, workers: int = 1, show_progress: bool = False
) -> str:
    """Mean throughput of both schemes for n = 1..n_max."""
    points = sweep_throughput(
        config.n_max,
        config.capacity,
        config.trials,
        config.seed,
        workers=workers,
        show_progress=show_progress,
    )
    rows = [(p.n, p.scheme.value, p.mean_mbps, p.ci95_mbps, p.trials, p.seed) for p in points]
    return render_csv(_header("throughput", config), THROUGHPUT_COLUMNS, rows)


@dataclass
class FogsimOutput:
    event_log: str
    summary_text: str
    summary: SimSummary


def cmd_fogsim(config: ExperimentConfig) -> FogsimOutput:
    """Mobility run: event-log CSV plus a key=value summary."""
    events, summary = run(config.fogcell, config.link, config.capacity)
    header = _header("fogsim", config)
    return FogsimOutput(
        event_log=render_csv(header, EVENT_COLUMNS, (e.to_row() for e in events)),
        summary_text=render_key_values(header, summary.to_lines()),
        summary=summary,
    )


@dataclass
class CalibrationOutput:
    result: CalibrationResult
    fragment: str


def cmd_calibrate(
    config: ExperimentConfig, workers: int = 1, show_progress: bool = False
) -> CalibrationOutput:
    """
    Fit (P_tx − θ, σ) to the target minima.

    The fragment sets ``p_tx_dbm``, ``theta_db`` and ``sigma_db`` and is readable by
    ``parse_config``; residuals and turning points are kept as comments.
    """
    result = calibrate(
        config.target_pairs_s,
        config.margin_grid,
        config.sigma_grid,
        config.delay_params,
        config.rho_grid,
        base_link=config.link,
        mode=config.hop_mode,
        workers=workers,
        show_progress=show_progress,
    )
    fitted = config.model_validate(
        {**config.model_dump(), "p_tx_dbm": result.link.p_tx_dbm, "sigma_db": result.sigma_db}
    )
    comments = [
        f"# margin_offset_db={fmt(result.margin_offset_db)}",
        f"# max_abs_residual={fmt(result.max_abs_residual)}",
    ]
    for (l_a, target), residual, (rho_star, delay_star) in zip(
        result.targets, result.residuals, result.turning_points
    ):
        comments.append(
            f"# la_m={fmt(l_a)} target_ms={fmt(target * 1e3)} min_ms={fmt(delay_star * 1e3)} "
            f"residual={fmt(residual)} turning_rho={fmt(rho_star)}"
        )
    fragment = render_key_values(
        [*_header("calibrate", config), *comments],
        fitted.to_fragment(["p_tx_dbm", "theta_db", "sigma_db"]),
    )
    return CalibrationOutput(result=result, fragment=fragment)


def cmd_link_check(config: ExperimentConfig) -> str:
    """Analytic P_hop against the shadowing Monte Carlo over the hop-distance grid."""
    link = config.link
    rows = []
    for delta in config.link_delta_grid:
        analytic = p_hop_analytic(delta, link)
        estimate, ci = p_hop_monte_carlo(delta, link, config.trials, config.seed)
        rows.append(
            (delta, link_margin_db(delta, link), analytic, estimate, ci, abs(estimate - analytic))
        )
    return render_csv(_header("link-check", config), LINK_CHECK_COLUMNS, rows)


def print_calibration(result: CalibrationResult, console: Optional[Console] = None) -> None:
    """Print the calibration report to stderr; stdout carries only the fragment."""
    console = console or Console(stderr=True)
    console.print(
        Panel(
            f"P_tx − θ = {fmt(result.margin_offset_db)} dB   σ = {fmt(result.sigma_db)} dB   "
            f"P_tx = {fmt(result.link.p_tx_dbm)} dBm\n"
            f"max relative residual = {result.max_abs_residual:.2%}",
            title="Calibration",
        )
    )

    table = Table(title="Curve minima")
    table.add_column("L_a (m)", justify="right", style="cyan")
    table.add_column("Target (ms)", justify="right")
    table.add_column("Minimum (ms)", justify="right")
    table.add_column("Residual", justify="right")
    table.add_column("Turning ρ (veh/m)", justify="right")

    for (l_a, target), residual, (rho_star, delay_star) in zip(
        result.targets, result.residuals, result.turning_points
    ):
        colour = "green" if abs(residual) <= 0.2 else "red"
        table.add_row(
            fmt(l_a),
            fmt(target * 1e3),
            fmt(delay_star * 1e3),
            f"[{colour}]{residual:+.2%}[/{colour}]",
            fmt(rho_star),
        )
    console.print(table)


def print_fogsim_summary(summary: SimSummary, console: Optional[Console] = None) -> None:
    console = console or Console(stderr=True)
    table = Table(title="Fog cell run")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    for line in summary.to_lines():
        key, _, value = line.partition("=")
        if key == "epoch_throughputs_mbps":
            continue
        table.add_row(key, value)
    console.print(table)
