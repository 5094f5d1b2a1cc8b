"""Main CLI application."""
import logging
import sys
from contextlib import contextmanager
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import click
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from typer import Context, Exit, Option, Typer, echo

from ehcavity.acceptance import CHECKS, run_checks
from ehcavity.cavity import build_pumps, mode_frequency
from ehcavity.common import write_document
from ehcavity.config import TOML_CONFIG_FILE, get_config, read_config
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.data_models.manifest import RunManifest
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.data_models.report import (
    ConstraintKind,
    GeometryConstraint,
    GeometrySolution,
)
from ehcavity.data_models.simulation import SpectrumSettings
from ehcavity.expressions import evaluate
from ehcavity.fields import FieldPair
from ehcavity.logging import PACKAGE_LOGGER, get_logger, set_verbose
from ehcavity.nonlinear import wave_rhs
from ehcavity.recipes import CookBook, Recipe
from ehcavity.resonance import (
    DISPERSION_TOLERANCE,
    analyze,
    candidate_signals,
    solve_geometry,
)
from ehcavity.simulate import end_to_end, spectrum_drives
from ehcavity.trigpoly import HarmonicKey, describe_key, rational_snap
from ehcavity.tui import (
    format_checks,
    format_geometry,
    format_report,
    format_spectrum,
    format_terms,
    print_report,
    print_summary,
)
from ehcavity.version import __version__

logger = get_logger(__file__)

app = Typer()

DEFAULT_GEOMETRY = "pi,10,10"
#: Options that are not echoed in the run manifest
_NOT_INPUTS = ("config", "help", "verbose", "out")


class Sign(str, Enum):
    """Sign of the second pump frequency in `2ω1 ± ω2`."""

    MINUS = "minus"
    PLUS = "plus"


def _version_callback(show_version: bool) -> None:
    """Return application version."""
    if show_version:
        echo("ehcavity version: " + __version__)
        raise Exit()


def _help_callback(ctx: Context, show_help: Optional[bool]) -> None:
    """Reimplement `help` command to execute eagerly."""
    if show_help:
        echo(ctx.command.get_help(ctx))
        raise Exit()


def _config_callback(ctx: Context, config_path: Optional[Path]) -> Optional[Path]:
    """Get config file and inject values into context to override default args."""
    config_path = (
        get_config(config_filename=TOML_CONFIG_FILE)
        if config_path is None
        else config_path
    )
    logger.debug(f"Loading config file from: {config_path}")

    if config_path is not None:  # config may not be specified
        assert ctx.command.name is not None
        conf = read_config(config_path, ctx.command.name)
        # Merge configuration
        ctx.default_map = {**(ctx.default_map or {}), **conf}
    return config_path


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Turn library errors into one-line diagnostics and exit codes 1 (usage) or 2."""
    try:
        yield
    except Exit:
        raise
    except (ValidationError, ValueError) as err:
        echo(f"Error: {' '.join(str(err).split())}", err=True)
        raise Exit(code=1)
    except (ArithmeticError, RuntimeError) as err:
        echo(f"Error: {' '.join(str(err).split())}", err=True)
        raise Exit(code=2)


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=Console(stderr=True),
        transient=True,
    )


def _inputs(ctx: Context) -> Dict[str, Any]:
    """Command parameters echoed in the run manifest."""
    return {
        name: str(value) if isinstance(value, Path) else value
        for name, value in ctx.params.items()
        if name not in _NOT_INPUTS
    }


def _parse_pumps(
    pumps: Sequence[str], count: Tuple[int, int] = (1, 2)
) -> List[ModeSpec]:
    low, high = count
    if not low <= len(pumps) <= high:
        expected = str(low) if low == high else f"{low} or {high}"
        raise ValueError(f"Expected {expected} `--pump` option(s), got {len(pumps)}.")
    return [ModeSpec.parse(pump) for pump in pumps]


def _scenario(
    geometry: Optional[str], pumps: Sequence[str], recipe: Optional[Recipe]
) -> Tuple[CavityGeometry, List[ModeSpec]]:
    """Geometry and pumps from `--geometry`/`--pump` or from `--recipe`."""
    if recipe is None:
        return CavityGeometry.parse(geometry or DEFAULT_GEOMETRY), _parse_pumps(pumps)
    if pumps:
        raise ValueError("Expected either `--pump` or `--recipe`, got both.")
    scenario = CookBook.get(recipe)
    return CavityGeometry.parse(geometry or scenario.geometry), scenario.modes()


def _snap_scope(
    geometry: CavityGeometry, pumps: Sequence[ModeSpec], constants: PhysicalConstants
) -> Dict[str, float]:
    """Variables of `--snap` expressions."""
    frequencies = [mode_frequency(geometry, m) for m in pumps]
    scope = {
        "k": constants.kappa,
        "beta": constants.beta,
        "F0": pumps[0].amplitude,
        "w": frequencies[0],
        "w1": frequencies[0],
    }
    if len(frequencies) > 1:
        scope["w2"] = frequencies[1]
    return scope


def _terms_document(
    sources: FieldPair, snapped: Optional[Dict[str, Dict[HarmonicKey, Fraction]]]
) -> List[Dict[str, Any]]:
    return [
        {
            "component": name,
            "key": key,
            "amplitude": amplitude,
            "coefficient": snapped[name][key] if snapped is not None else None,
            "description": describe_key(key),
        }
        for name, poly in sources.components().items()
        for amplitude, key in poly.terms
    ]


def _parse_signal(text: str) -> Tuple[int, int, int]:
    """Signal indices from `130` or `1,3,0`."""
    parts = text.split(",") if "," in text else list(text.strip())
    try:
        n, p, q = (int(part) for part in parts)
    except ValueError as err:
        raise ValueError(
            f"Expected signal indices such as `130` or `1,3,10`, got `{text}`."
        ) from err
    return n, p, q


def _write(out: Optional[Path], manifest: RunManifest, **results: Any) -> None:
    if out is not None:
        write_document(out, {"manifest": manifest.document(), **results})
        logger.info(f"Wrote {out}")


@app.callback()
def callback(  # noqa: D103
    version: Optional[bool] = Option(
        None, "--version", callback=_version_callback, is_eager=True
    )
) -> None:
    """CLI tool to find resonant light-by-light scattering signals in cavities."""


@app.command(add_help_option=False)
def expand(
    ctx: Context,
    geometry: str = Option(
        DEFAULT_GEOMETRY, "--geometry", "-g", help="Cavity dimensions `Lx,Ly,Lz`"
    ),
    pump: List[str] = Option(
        (), "--pump", "-p", help="Pump mode(s), such as `TE011` or `1D:n=2,alpha=0.5`"
    ),
    kappa: float = Option(1.0, help="Coupling `κ` of the field invariants"),
    beta: float = Option(7 / 4, help="Ratio `β` of the invariant couplings"),
    snap: Optional[str] = Option(
        None,
        help="Reference scale to express coefficients as rationals, such as"
        " `8*k*F0^3*w^2`",
    ),
    out: Optional[Path] = Option(None, "--out", "-o", help="JSON document path"),
    verbose: bool = Option(
        False, "--verbose", "-v", help="Increase verbosity for debugging"
    ),
    config: Optional[Path] = Option(
        None,
        "--config",
        "-c",
        is_eager=True,
        callback=_config_callback,
        resolve_path=True,
        exists=True,
        help="Get CLI options from configuration file",
    ),
    help: Optional[bool] = Option(
        None,
        "--help",
        is_eager=True,
        callback=_help_callback,
        help="Show this message and exit",
    ),
) -> None:
    """
    List the source terms of the signal wave equations.

    Each line shows the field component, the coefficient and the trigonometric factors
     of one term. With `--snap`, coefficients are divided by the reference scale and
     printed as small rationals. Expressions see `k`, `beta`, `F0`, `w` (or `w1`),
     `w2` and `pi`.
    """
    if verbose:
        set_verbose(logging.getLogger(PACKAGE_LOGGER))
    with _exit_on_error():
        cavity = CavityGeometry.parse(geometry)
        modes = _parse_pumps(pump)
        constants = PhysicalConstants(kappa=kappa, beta=beta)
        sources = wave_rhs(build_pumps(cavity, modes), constants)
        snapped = None
        if snap is not None:
            reference = evaluate(snap, **_snap_scope(cavity, modes, constants))
            snapped = {
                name: rational_snap(poly, reference)
                for name, poly in sources.components().items()
            }
        text = format_terms(sources, snapped)
    if not text:
        logger.info("No source terms (all amplitudes vanish).")
    echo(text, nl=False)
    manifest = RunManifest.create(
        "expand", _inputs(ctx), constants=constants, geometry=cavity, pumps=modes
    )
    _write(out, manifest, terms=_terms_document(sources, snapped))


@app.command(add_help_option=False)
def table(
    ctx: Context,
    geometry: Optional[str] = Option(
        None,
        "--geometry",
        "-g",
        help=f"Cavity dimensions [default: {DEFAULT_GEOMETRY}]",
    ),
    pump: List[str] = Option((), "--pump", "-p", help="Pump mode(s)"),
    recipe: Optional[Recipe] = Option(
        None, "--recipe", "-r", help="Named scenario (instead of `--pump`)"
    ),
    kappa: float = Option(1.0, help="Coupling `κ` of the field invariants"),
    beta: float = Option(7 / 4, help="Ratio `β` of the invariant couplings"),
    tolerance: float = Option(
        DISPERSION_TOLERANCE, help="Relative tolerance of the dispersion match"
    ),
    pretty: bool = Option(False, "--pretty", help="Render table with rich"),
    out: Optional[Path] = Option(None, "--out", "-o", help="JSON document path"),
    verbose: bool = Option(
        False, "--verbose", "-v", help="Increase verbosity for debugging"
    ),
    config: Optional[Path] = Option(
        None,
        "--config",
        "-c",
        is_eager=True,
        callback=_config_callback,
        resolve_path=True,
        exists=True,
        help="Get CLI options from configuration file",
    ),
    help: Optional[bool] = Option(
        None,
        "--help",
        is_eager=True,
        callback=_help_callback,
        help="Show this message and exit",
    ),
) -> None:
    """
    Print the resonance table of the source terms.

    One row per wavenumber combination, listing the frequencies found there. Resonant
     frequencies are marked with `*` and parity mismatches with `!`.
    """
    if verbose:
        set_verbose(logging.getLogger(PACKAGE_LOGGER))
    with _exit_on_error():
        cavity, modes = _scenario(geometry, pump, recipe)
        constants = PhysicalConstants(kappa=kappa, beta=beta)
        report = analyze(cavity, modes, constants, tolerance=tolerance)
    if pretty:
        print_report(report)
    else:
        echo(format_report(report), nl=False)
    manifest = RunManifest.create(
        "table", _inputs(ctx), constants=constants, geometry=cavity, pumps=modes
    )
    _write(out, manifest, report=report.document())


@app.command("geometry", add_help_option=False)
def geometry_cmd(
    ctx: Context,
    pump: List[str] = Option(
        (), "--pump", "-p", help="Two pump modes, the first one doubled"
    ),
    signal: Optional[str] = Option(
        None, help="Signal mode indices, such as `130` (all candidates if omitted)"
    ),
    sign: Sign = Option(Sign.MINUS, help="Sign of the second pump frequency"),
    constraint: ConstraintKind = Option(
        ConstraintKind.LX_EQUALS_LY, help="Geometry family scanned over `r = Lz/Lx`"
    ),
    ratio: float = Option(1.0, help="Ratio `Ly/Lx` of the `fix-ratio-xy` family"),
    interval: Tuple[float, float] = Option((0.1, 1.0), help="Scan interval of `r`"),
    tolerance: float = Option(1e-12, help="Root tolerance"),
    out: Optional[Path] = Option(None, "--out", "-o", help="JSON document path"),
    verbose: bool = Option(
        False, "--verbose", "-v", help="Increase verbosity for debugging"
    ),
    config: Optional[Path] = Option(
        None,
        "--config",
        "-c",
        is_eager=True,
        callback=_config_callback,
        resolve_path=True,
        exists=True,
        help="Get CLI options from configuration file",
    ),
    help: Optional[bool] = Option(
        None,
        "--help",
        is_eager=True,
        callback=_help_callback,
        help="Show this message and exit",
    ),
) -> None:
    """
    Find cavity dimensions where `2ω1 ± ω2` matches a signal eigenfrequency.

    Dimensions follow the family `(1/r, ρ/r, 1)`, and every root `r = Lz/Lx` is printed
     with its geometry.
    """
    if verbose:
        set_verbose(logging.getLogger(PACKAGE_LOGGER))
    with _exit_on_error():
        first, second = _parse_pumps(pump, count=(2, 2))
        family = GeometryConstraint(
            kind=constraint, ratio=ratio, interval=interval, tolerance=tolerance
        )
        signals = (
            [_parse_signal(signal)]
            if signal is not None
            else candidate_signals(first, second)
        )
        factor = -1 if sign is Sign.MINUS else 1
        solutions = []
        for indices in signals:
            geometries = solve_geometry(first, second, indices, factor, family)
            solutions.append(
                GeometrySolution(
                    pumps=(first, second),
                    signal=indices,
                    sign=factor,
                    constraint=family,
                    roots=[g.lz / g.lx for g in geometries],
                    geometries=geometries,
                )
            )
    echo("".join(format_geometry(s) for s in solutions), nl=False)
    manifest = RunManifest.create("geometry", _inputs(ctx), pumps=[first, second])
    _write(out, manifest, solutions=[s.document() for s in solutions])


@app.command(add_help_option=False)
def simulate(
    ctx: Context,
    geometry: Optional[str] = Option(
        None,
        "--geometry",
        "-g",
        help=f"Cavity dimensions [default: {DEFAULT_GEOMETRY}]",
    ),
    pump: List[str] = Option((), "--pump", "-p", help="Pump mode(s)"),
    recipe: Optional[Recipe] = Option(
        None, "--recipe", "-r", help="Named scenario (instead of `--pump`)"
    ),
    kappa: float = Option(1.0, help="Coupling `κ` of the field invariants"),
    beta: float = Option(7 / 4, help="Ratio `β` of the invariant couplings"),
    gamma: Optional[float] = Option(
        None, help="Dissipation coefficient of additional damped runs"
    ),
    cycles: int = Option(100, help="Simulated periods of the slower motion"),
    series: Optional[Path] = Option(
        None, help="Directory receiving the `t q` series of every line"
    ),
    pretty: bool = Option(False, "--pretty", help="Render spectrum with rich"),
    out: Optional[Path] = Option(None, "--out", "-o", help="JSON document path"),
    verbose: bool = Option(
        False, "--verbose", "-v", help="Increase verbosity for debugging"
    ),
    config: Optional[Path] = Option(
        None,
        "--config",
        "-c",
        is_eager=True,
        callback=_config_callback,
        resolve_path=True,
        exists=True,
        help="Get CLI options from configuration file",
    ),
    help: Optional[bool] = Option(
        None,
        "--help",
        is_eager=True,
        callback=_help_callback,
        help="Show this message and exit",
    ),
) -> None:
    """
    Drive one signal oscillator per source term and report its long-time behaviour.

    Lines are `secular` when their envelope grows like a resonantly driven oscillator
     and `bounded` otherwise.
    """
    if verbose:
        set_verbose(logging.getLogger(PACKAGE_LOGGER))
    with _exit_on_error():
        cavity, modes = _scenario(geometry, pump, recipe)
        constants = PhysicalConstants(kappa=kappa, beta=beta)
        settings = SpectrumSettings(gamma=gamma, cycles=cycles)
        report = analyze(cavity, modes, constants)
        with _progress() as progress:
            lines = progress.add_task(
                "[yellow]Evolving signal modes", total=len(spectrum_drives(report))
            )
            summary = end_to_end(
                modes,
                cavity,
                constants,
                settings,
                report=report,
                series_dir=series,
                progress_callback=lambda: progress.update(lines, advance=1),
            )
    if pretty:
        print_summary(summary)
    else:
        echo(format_spectrum(summary), nl=False)
    logger.info(
        f"{len(summary.accumulating)} of {len(summary.lines)} lines grow secularly."
    )
    manifest = RunManifest.create(
        "simulate", _inputs(ctx), constants=constants, geometry=cavity, pumps=modes
    )
    _write(out, manifest, summary=summary.document())


@app.command(add_help_option=False)
def selftest(
    ctx: Context,
    seed: int = Option(0, help="Seed of the randomized checks"),
    samples: int = Option(200, help="Runs per randomized check"),
    out: Optional[Path] = Option(None, "--out", "-o", help="JSON document path"),
    verbose: bool = Option(
        False, "--verbose", "-v", help="Increase verbosity for debugging"
    ),
    config: Optional[Path] = Option(
        None,
        "--config",
        "-c",
        is_eager=True,
        callback=_config_callback,
        resolve_path=True,
        exists=True,
        help="Get CLI options from configuration file",
    ),
    help: Optional[bool] = Option(
        None,
        "--help",
        is_eager=True,
        callback=_help_callback,
        help="Show this message and exit",
    ),
) -> None:
    """Run the acceptance checks, one `PASS`/`FAIL` line each."""
    if verbose:
        set_verbose(logging.getLogger(PACKAGE_LOGGER))
    with _exit_on_error():
        with _progress() as progress:
            checks = progress.add_task("[yellow]Running checks", total=len(CHECKS))
            report = run_checks(
                seed=seed,
                samples=samples,
                progress_callback=lambda: progress.update(checks, advance=1),
            )
    echo(format_checks(report), nl=False)
    manifest = RunManifest.create("selftest", _inputs(ctx), seed=seed)
    _write(out, manifest, selftest=report.document())
    if not report.passed:
        logger.info(
            f"{sum(not c.passed for c in report.checks)} of {len(report.checks)}"
            " checks failed."
        )
        raise Exit(code=2)


def main() -> None:
    """Run the CLI, exiting with code 1 on usage errors."""
    command = typer.main.get_command(app)
    try:
        code = command.main(standalone_mode=False)
    except click.ClickException as err:
        echo(f"Error: {err.format_message()}", err=True)
        sys.exit(1)
    except click.Abort:
        echo("Aborted!", err=True)
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)
