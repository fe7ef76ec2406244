"""Command-line front end for decay-rate sweeps."""

import functools
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import click
import numpy as np
import structlog

from cavity_decay.configure_logging import configure_logging
from cavity_decay.dielectric import (
    MODEL_VARIANTS,
    VARIANT_ALIASES,
    eval_permittivity,
    kramers_kronig_residual,
    longitudinal_frequency,
    refractive_index,
    static_permittivity_check,
)
from cavity_decay.errors import (
    ConvergenceError,
    DomainError,
    ModelEvaluationError,
    SpecialFunctionOverflow,
)
from cavity_decay.plot import emit_plot_script, write_plot
from cavity_decay.sweep import (
    PRESETS,
    STDOUT,
    build_model,
    emit_csv,
    emit_json,
    load_config,
    read_csv,
    run_sweep,
    spec_from_options,
)

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def _complex(value: str | None) -> complex | None:
    if value is None:
        return None
    try:
        return complex(value.replace(" ", ""))
    except ValueError:
        raise click.BadParameter(f"not a complex number: {value!r}") from None


def model_options(command: Callable) -> Callable:
    """Options that describe the dielectric medium, shared by every command."""
    decorators = [
        click.option(
            "--model",
            type=click.Choice([*MODEL_VARIANTS, *VARIANT_ALIASES]),
            help="Permittivity model (default: fixed-damping-lorentz, alias paper-lorentz)",
        ),
        click.option("--omega-t", type=float, help="Transverse frequency omega_T (default: 1)"),
        click.option("--omega-p", type=float, help="Plasma frequency omega_P (default: 0.46)"),
        click.option("--gamma", type=float, help="Damping in units of omega_T (default: 0.05)"),
        click.option("--eps", help="Permittivity of the constant model, e.g. '2+0.5j'"),
        click.option(
            "--table",
            type=click.Path(dir_okay=False),
            help="CSV with columns omega,eps_re,eps_im for the tabulated model",
        ),
    ]
    return functools.reduce(lambda f, decorator: decorator(f), reversed(decorators), command)


def _given(**values: Any) -> dict[str, Any]:
    return {key: value for key, value in values.items() if value is not None}


@click.group()
@click.option(
    "--log-level",
    default="WARNING",
    type=click.Choice(LOG_LEVELS),
    help="Set the logging level (default: WARNING)",
)
def cli(log_level: str = "WARNING") -> None:
    """Spontaneous-decay rates of an atom in an absorbing dielectric."""
    configure_logging(log_level=log_level)


@cli.command()
@click.option("--preset", type=click.Choice(sorted(PRESETS)), help="Figure preset fig1..fig6")
@model_options
@click.option("--radius-lambda", type=float, help="Cavity radius as a fraction of lambda_A")
@click.option("--radius", type=float, help="Cavity radius in units of c / omega_T")
@click.option("--omega-start", type=float, help="First frequency in units of omega_T")
@click.option("--omega-stop", type=float, help="Last frequency in units of omega_T")
@click.option("--count", type=int, help="Number of grid nodes (default: 600)")
@click.option("--out", help="Output file, '-' for stdout (default: -)")
@click.option("--plot-script", type=click.Path(dir_okay=False), help="Write a plotting script")
@click.option("--plot", type=click.Path(dir_okay=False), help="Render the figure to a PNG file")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of CSV")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="INI file with [model], [geometry], [grid] and [output] sections",
)
def sweep(
    preset: str | None,
    model: str | None,
    omega_t: float | None,
    omega_p: float | None,
    gamma: float | None,
    eps: str | None,
    table: str | None,
    radius_lambda: float | None,
    radius: float | None,
    omega_start: float | None,
    omega_stop: float | None,
    count: int | None,
    out: str | None,
    plot_script: str | None,
    plot: str | None,
    as_json: bool,
    config: str | None,
) -> None:
    """Sweep the transition frequency and emit one row of rates per node."""
    options = load_config(config) if config else {}
    options.update(
        _given(
            preset=preset,
            model=model,
            omega_t=omega_t,
            omega_p=omega_p,
            gamma=gamma,
            eps=_complex(eps),
            table=table,
            radius_lambda=radius_lambda,
            radius=radius,
            omega_start=omega_start,
            omega_stop=omega_stop,
            count=count,
            out=out,
            plot_script=plot_script,
            plot=plot,
            json=as_json or None,
        )
    )
    spec = spec_from_options(options)
    destination = options.get("out", STDOUT)
    if options.get("plot_script") and (destination == STDOUT or "json" in spec.emit):
        raise DomainError(
            "--plot-script reads the CSV output, so it needs --out FILE without --json"
        )

    rows = run_sweep(spec)
    if "json" in spec.emit:
        emit_json(rows, destination, spec.columns)
    else:
        emit_csv(rows, destination, spec.columns)
    if options.get("plot_script"):
        emit_plot_script(rows, options["plot_script"], destination, spec.show_baseline)
    if options.get("plot"):
        write_plot(rows, options["plot"], spec.show_baseline, title=spec.preset)


@cli.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="PNG file to write")
@click.option("--baseline", is_flag=True, help="Also draw the uncorrected real-cavity rate")
def plot(csv_path: str, out: str, baseline: bool = False) -> None:
    """Render a figure from a CSV written by ``sweep``."""
    write_plot(read_csv(csv_path), out, baseline, title=Path(csv_path).stem)


@cli.command()
@model_options
@click.option(
    "--omega",
    "frequencies",
    type=float,
    multiple=True,
    help="Frequency to report eps and n at, in units of omega_T (repeatable)",
)
@click.option("--kk-stop", default=20.0, help="Upper end of the Kramers-Kronig grid (default: 20)")
@click.option("--kk-count", default=4096, help="Nodes of the Kramers-Kronig grid (default: 4096)")
def medium(
    model: str | None,
    omega_t: float | None,
    omega_p: float | None,
    gamma: float | None,
    eps: str | None,
    table: str | None,
    frequencies: Sequence[float],
    kk_stop: float = 20.0,
    kk_count: int = 4096,
) -> None:
    """Report permittivity, refractive index and causality diagnostics of a medium."""
    dielectric = build_model(
        _given(
            model=model,
            omega_t=omega_t,
            omega_p=omega_p,
            gamma=gamma,
            eps=_complex(eps),
            table=table,
        )
    )
    reference = dielectric.reference_frequency
    if dielectric.lorentz is not None:
        omega_L = longitudinal_frequency(dielectric.lorentz) / reference
        click.echo(f"omega_L/omega_T = {omega_L:.12g}")
    for value in frequencies:
        permittivity = eval_permittivity(dielectric, value * reference)
        index = refractive_index(permittivity)
        click.echo(
            f"omega={value:.12g} eps={permittivity.eps_re:.12g}{permittivity.eps_im:+.12g}j "
            f"n={index.eta:.12g}{index.kappa:+.12g}j"
        )

    check = static_permittivity_check(dielectric)
    click.echo(f"static |eps| = {check.magnitude:.12g} ({check.status})")
    if dielectric.variant == "constant":
        return
    if dielectric.table is not None:
        grid = dielectric.table["omega"].to_numpy(dtype=float)
    else:
        grid = np.linspace(1.0e-3, kk_stop, kk_count) * reference
    click.echo(f"Kramers-Kronig residual = {kramers_kronig_residual(dielectric, grid):.6g}")


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and translate failures into exit codes."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        logger.error("Aborted")
        return EXIT_USAGE
    except DomainError as exc:
        logger.error("Invalid input", error=str(exc))
        return EXIT_USAGE
    except (SpecialFunctionOverflow, ConvergenceError, ModelEvaluationError) as exc:
        logger.error("Numerical failure", error=str(exc), kind=type(exc).__name__)
        return EXIT_NUMERICAL
    except OSError as exc:
        logger.error("I/O failure", error=str(exc), path=getattr(exc, "filename", None))
        return EXIT_IO
    except ValueError as exc:
        logger.error("Invalid input", error=str(exc), kind=type(exc).__name__)
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
