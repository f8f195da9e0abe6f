import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .config import ExperimentConfig, parse_config
from .exceptions import ConfigError, FogCellError
from .experiment import (
    cmd_calibrate,
    cmd_delay_sweep,
    cmd_fogsim,
    cmd_link_check,
    cmd_throughput,
    print_calibration,
    print_fogsim_summary,
)
from .logging import get_logger, setup_logging
from .reporting import write_text

logger = get_logger(__name__)

EXIT_CONFIG = 1
EXIT_MODEL = 2


class FogCellGroup(click.Group):
    """Command group reporting usage errors with exit code 1."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_CONFIG
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_CONFIG
            raise


def config_option(f):
    f = click.option(
        "--out",
        "-o",
        type=click.Path(dir_okay=False),
        help="Output file (default: stdout).",
    )(f)
    f = click.option(
        "--seed", type=click.IntRange(0, 2**64 - 1), help="Master seed (unsigned 64-bit)."
    )(f)
    f = click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Config file: key=value lines, or flat YAML (.yml/.yaml).",
    )(f)
    return f


def link_options(f):
    f = click.option("--sigma-db", type=float, help="Shadowing standard deviation σ (dB).")(f)
    f = click.option("--theta-db", type=float, help="SNR threshold θ (dB).")(f)
    f = click.option("--p-tx-dbm", type=float, help="Transmit power (dBm).")(f)
    return f


def density_options(f):
    f = click.option("--t-slot-us", type=float, help="Slot time t_slot (µs).")(f)
    f = click.option("--la", "la_list", help="RSU distances L_a in m, e.g. 300,400,500.")(f)
    f = click.option("--rho-step", type=float, help="Density grid step (veh/m).")(f)
    f = click.option("--rho-max", type=float, help="Largest density (veh/m).")(f)
    f = click.option("--rho-min", type=float, help="Smallest density (veh/m).")(f)
    return f


def run_options(f):
    f = click.option("--quiet", "-q", is_flag=True, help="Hide progress bars.")(f)
    f = click.option(
        "--workers",
        type=click.IntRange(min=1),
        default=1,
        show_default=True,
        help="Worker threads; outputs do not depend on it.",
    )(f)
    return f


def load_config(config_path: Optional[str], **overrides) -> ExperimentConfig:
    """Effective config or exit code 1."""
    try:
        return parse_config(config_path, overrides)
    except ConfigError as e:
        click.echo(f"Config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)


def emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(text, out)
        logger.info("Wrote %s", out)
    else:
        click.echo(text, nl=False)


def fail_model(e: Exception) -> None:
    if isinstance(e, FogCellError):
        click.echo(f"Error: {e}", err=True)
    else:
        logger.exception("Unexpected error")
        click.echo(f"Unexpected error: {e}", err=True)
    sys.exit(EXIT_MODEL)


@click.group(cls=FogCellGroup)
@click.version_option(__version__, prog_name="fogcell")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--log-file", type=click.Path(), help="Log file path")
@click.pass_context
def cli(ctx, verbose, log_file):
    """Fog-cell vehicular network simulator.

    Units: densities in vehicles/m, distances in m, slot times in µs, delays in ms,
    throughput in Mbps.
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["log_file"] = log_file

    setup_logging(
        level="DEBUG" if verbose else "WARNING",
        log_file=Path(log_file) if log_file else None,
        verbose=verbose,
    )


@cli.command("delay-sweep")
@config_option
@density_options
@link_options
def delay_sweep(
    config_path,
    seed,
    out,
    rho_min,
    rho_max,
    rho_step,
    la_list,
    t_slot_us,
    p_tx_dbm,
    theta_db,
    sigma_db,
):
    """Expected delay (ms) against vehicle density for each L_a."""
    config = load_config(
        config_path,
        seed=seed,
        rho_min=rho_min,
        rho_max=rho_max,
        rho_step=rho_step,
        la_list=la_list,
        t_slot_us=t_slot_us,
        p_tx_dbm=p_tx_dbm,
        theta_db=theta_db,
        sigma_db=sigma_db,
    )
    try:
        output = cmd_delay_sweep(config)
    except Exception as e:
        fail_model(e)
    emit(output.text, out)
    if not output.any_reachable:
        click.echo("Error: no density on the grid gives a reachable path", err=True)
        sys.exit(EXIT_MODEL)


@cli.command()
@config_option
@run_options
@click.option("--trials", type=int, help="Demand profiles per point.")
@click.option("--n-max", type=int, help="Largest vehicle count N.")
def throughput(config_path, seed, out, workers, quiet, trials, n_max):
    """Mean fog-cell throughput (Mbps) of both allocation schemes for N = 1..n_max."""
    config = load_config(config_path, seed=seed, trials=trials, n_max=n_max)
    try:
        text = cmd_throughput(config, workers=workers, show_progress=not quiet)
    except Exception as e:
        fail_model(e)
    emit(text, out)


@cli.command()
@config_option
@click.option(
    "--summary-out",
    type=click.Path(dir_okay=False),
    help="Summary file (key=value); default prints a table to stderr.",
)
@click.option("--max-arrivals", type=click.IntRange(min=0), help="Cap on entering vehicles.")
@click.option("--duration-s", type=float, help="Simulated time (s).")
@click.option("--arrival-density", type=float, help="Arrival density ρ (veh/m).")
@click.option(
    "--arrival-placement",
    type=click.Choice(["equidistant", "poisson"]),
    help="Arrival model.",
)
def fogsim(
    config_path,
    seed,
    out,
    summary_out,
    max_arrivals,
    duration_s,
    arrival_density,
    arrival_placement,
):
    """Mobility run: gateway elections, connectivity and per-epoch allocation."""
    config = load_config(
        config_path,
        seed=seed,
        max_arrivals=max_arrivals,
        duration_s=duration_s,
        arrival_density=arrival_density,
        arrival_placement=arrival_placement,
    )
    try:
        output = cmd_fogsim(config)
    except Exception as e:
        fail_model(e)
    emit(output.event_log, out)
    if summary_out:
        write_text(output.summary_text, summary_out)
    else:
        print_fogsim_summary(output.summary)


@cli.command()
@config_option
@density_options
@link_options
@run_options
def calibrate(
    config_path,
    seed,
    out,
    rho_min,
    rho_max,
    rho_step,
    la_list,
    t_slot_us,
    p_tx_dbm,
    theta_db,
    sigma_db,
    workers,
    quiet,
):
    """Fit P_tx − θ and σ to the target delay minima and write a config fragment."""
    config = load_config(
        config_path,
        seed=seed,
        rho_min=rho_min,
        rho_max=rho_max,
        rho_step=rho_step,
        la_list=la_list,
        t_slot_us=t_slot_us,
        p_tx_dbm=p_tx_dbm,
        theta_db=theta_db,
        sigma_db=sigma_db,
    )
    try:
        output = cmd_calibrate(config, workers=workers, show_progress=not quiet)
    except Exception as e:
        fail_model(e)
    print_calibration(output.result)
    if out:
        write_text(output.fragment, out)
        click.echo(f"Config fragment written to {out}")
    else:
        click.echo(output.fragment, nl=False)


@cli.command("link-check")
@config_option
@link_options
@click.option("--trials", type=int, help="Shadowing samples per distance.")
def link_check(config_path, seed, out, p_tx_dbm, theta_db, sigma_db, trials):
    """Analytic against Monte-Carlo per-hop success probability."""
    config = load_config(
        config_path,
        seed=seed,
        p_tx_dbm=p_tx_dbm,
        theta_db=theta_db,
        sigma_db=sigma_db,
        trials=trials,
    )
    try:
        text = cmd_link_check(config)
    except Exception as e:
        fail_model(e)
    emit(text, out)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
