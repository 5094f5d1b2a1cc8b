"""Terminal user interface (TUI) helper functions and components."""
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

from rich.console import Console
from rich.table import Table
from rich.theme import Theme

from ehcavity.common import format_fraction, format_number
from ehcavity.data_models.acceptance import SelftestReport
from ehcavity.data_models.report import (
    GeometrySolution,
    ReportCell,
    ResonanceReport,
    Verdict,
)
from ehcavity.data_models.simulation import Regime, SpectrumSummary
from ehcavity.fields import FieldPair
from ehcavity.trigpoly import HarmonicKey, describe_key

EHCAVITY_TUI = Theme(
    {
        "resonant": "bold green",
        "parity-mismatch": "yellow",
        "non-resonant": "dim",
        "vanishing-amplitude": "dim",
        "secular": "bold green",
        "bounded": "dim",
    }
)

ehcavity_console = Console(theme=EHCAVITY_TUI)

VERDICT_MARKS = {Verdict.RESONANT: "*", Verdict.PARITY_MISMATCH: "!"}
LEGEND = "(* resonant, ! parity mismatch)"
HEADER = ("wavenumbers", "eigenfrequencies")


def _cell_text(cell: ReportCell) -> str:
    return cell.frequency_label + VERDICT_MARKS.get(cell.verdict, "")


def format_report(report: ResonanceReport) -> str:
    """
    Render resonance report as a fixed-width table, one row per wavenumber column.

    Cells list the frequencies found at the wavenumbers, resonant ones marked with `*`
     and parity mismatches with `!`. Vanishing cells are hidden.
    """
    rows = [
        (column.wavenumber_label, ", ".join(_cell_text(c) for c in column.shown_cells))
        for column in report.columns
        if column.shown_cells
    ]
    width = max([len(HEADER[0]), *(len(label) for label, _ in rows)]) + 2
    lines = [f"{label:<{width}}{cells}" for label, cells in [HEADER, *rows]]
    return "\n".join([*lines, LEGEND]) + "\n"


def format_terms(
    sources: FieldPair,
    snapped: Optional[Mapping[str, Dict[HarmonicKey, Fraction]]] = None,
) -> str:
    """
    List source terms, one per line: component, coefficient and trigonometric factors.

    :param sources: Sources `(S_E, S_B)`
    :param snapped: Rational coefficients per component (amplitudes are printed if not)
    :return: Text (empty when there are no terms)
    """
    lines = []
    for name, poly in sources.components().items():
        for amplitude, key in poly.terms:
            value = (
                format_fraction(snapped[name][key])
                if snapped is not None
                else format_number(amplitude)
            )
            lines.append(f"{name:<4} {value:>22}  {describe_key(key)}")
    return "".join(f"{line}\n" for line in lines)


def format_geometry(solution: GeometrySolution) -> str:
    """Render roots `r = L_z/L_x` with their geometries, one per line."""
    first, second = solution.pumps
    sign = "-" if solution.sign < 0 else "+"
    signal = "".join(str(i) for i in solution.signal)
    lines = [
        f"2ω({first.label}) {sign} ω({second.label}) = ω({signal}):"
        f" {len(solution.roots)} root(s)"
    ]
    for r, geometry in zip(solution.roots, solution.geometries):
        lines.append(f"r = {format_number(r)}  geometry = {geometry.label}")
    return "\n".join(lines) + "\n"


def format_spectrum(summary: SpectrumSummary) -> str:
    """Render spectrum lines: labels, frequencies, regime and growth ratio."""
    header = ["wavenumbers", "frequency", "ω_d", "ω_r", "regime", "growth/secular"]
    damped = summary.settings.gamma is not None
    if damped:
        header.append("steady/oracle")
    rows = [header]
    for line in summary.lines:
        row = [
            line.wavenumber_label,
            line.frequency_label + VERDICT_MARKS.get(line.verdict, ""),
            format_number(line.drive_frequency),
            format_number(line.eigenfrequency),
            line.regime.value,
            format_number(line.growth_ratio),
        ]
        if damped:
            if line.steady_amplitude is None or not line.steady_oracle:
                row.append("-")
            else:
                row.append(format_number(line.steady_amplitude / line.steady_oracle))
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) + 2 for i in range(len(header))]
    lines = [
        "".join(f"{v:<{w}}" for v, w in zip(row, widths)).rstrip() for row in rows
    ]
    return "\n".join(lines) + "\n"


def format_checks(report: SelftestReport) -> str:
    """One `PASS`/`FAIL` line per acceptance check."""
    return "".join(
        f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}\n"
        for c in report.checks
    )


def print_report(report: ResonanceReport, console: Console = ehcavity_console) -> None:
    """Show rich representation of resonance report in terminal."""
    table = Table(title=f"Resonance criterion ({report.geometry.label})")
    table.add_column(HEADER[0], style="bold")
    table.add_column(HEADER[1])
    for column in report.columns:
        if not column.shown_cells:
            continue
        cells: List[str] = [
            f"[{c.verdict.value}]{_cell_text(c)}[/{c.verdict.value}]"
            for c in column.shown_cells
        ]
        table.add_row(column.wavenumber_label, ", ".join(cells))
    with console.use_theme(EHCAVITY_TUI):
        console.print(table)
        console.print(LEGEND, style="dim")


def print_summary(
    summary: SpectrumSummary, console: Console = ehcavity_console
) -> None:
    """Show rich representation of spectrum summary in terminal."""
    table = Table(title=f"Signal spectrum ({summary.geometry.label})")
    for name in ("wavenumbers", "frequency", "ω_d", "ω_r", "regime", "growth/secular"):
        table.add_column(name)
    for line in summary.lines:
        style = "secular" if line.regime is Regime.SECULAR else "bounded"
        table.add_row(
            line.wavenumber_label,
            line.frequency_label + VERDICT_MARKS.get(line.verdict, ""),
            format_number(line.drive_frequency),
            format_number(line.eigenfrequency),
            line.regime.value,
            f"{line.growth_ratio:.4f}",
            style=style,
        )
    with console.use_theme(EHCAVITY_TUI):
        console.print(table)
