"""
Modal dynamics of signal modes driven by source terms.

Each trigonometric source term drives a single spatial eigenprofile, so the wave
 equation `(□ + Γ∂t) E = f cos(ω_d t) u(x)` reduces to the oscillator
 `q'' + Γq' + ω_r²q = f cos(ω_d t + φ)` with `ω_r = |k|` of the profile.
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.integrate import solve_ivp

from ehcavity.common import format_number
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.data_models.report import ReportCell, ReportColumn, ResonanceReport
from ehcavity.data_models.simulation import (
    SAMPLES_PER_PERIOD,
    IntegrationMethod,
    Regime,
    SaturationRow,
    SaturationTable,
    SimulationConfig,
    SpectrumLine,
    SpectrumSettings,
    SpectrumSummary,
)
from ehcavity.logging import get_logger
from ehcavity.resonance import SIGNATURE_DIGITS, analyze

logger = get_logger(__file__)

Array = npt.NDArray[np.float64]

#: Damped runs last at least this many decay times `1/Γ`
STEADY_STATE_DECAYS = 20
#: Windows averaged for the steady amplitude, and compared for the steady-state test
STEADY_WINDOWS = 10
STEADY_RTOL = 1e-4
#: Growth slope (relative to `f/(2ω_r)`) from which a line counts as secular
SECULAR_FRACTION = 0.5
#: Amplitudes beyond this multiple of the analytic bound count as blow-up
BLOWUP_FACTOR = 10.0

__all__ = [
    "SAMPLES_PER_PERIOD",
    "STEADY_STATE_DECAYS",
    "UnstableIntegrationError",
    "ModeEvolution",
    "evolve_mode",
    "analytic_response",
    "steady_state_amplitude",
    "saturation_sweep",
    "spectrum_drives",
    "series_filename",
    "end_to_end",
]


class UnstableIntegrationError(RuntimeError):
    """Integrator failed or the amplitude blew up."""


@dataclass(frozen=True, eq=False)
class ModeEvolution:
    """Sampled trajectory `q(t)`, `q'(t)` of one modal oscillator."""

    config: SimulationConfig
    t: Array
    q: Array
    v: Array

    def energy(self) -> Array:
        """Oscillator energy `(q'² + ω_r² q²)/2` at every sample."""
        omega = self.config.eigenfrequency
        return 0.5 * (self.v**2 + omega**2 * self.q**2)

    @property
    def samples_per_window(self) -> int:
        """Number of samples in one envelope window."""
        return max(1, round(self.config.window / self.config.time_step))

    def envelope(self) -> Tuple[Array, Array]:
        """
        Amplitude `max |q|` over consecutive windows.

        :return: Window center times and amplitudes (full windows only)
        """
        size = self.samples_per_window
        count = (len(self.q) - 1) // size
        if count == 0:
            return np.empty(0), np.empty(0)
        windows = np.abs(self.q[: count * size]).reshape(count, size)
        centers = self.t[0 : count * size : size] + 0.5 * size * self.config.time_step
        return centers, windows.max(axis=1)

    def growth_slope(self) -> float:
        """Least-squares slope of the envelope over the last half of the run."""
        centers, amplitudes = self.envelope()
        late = centers >= 0.5 * self.t[-1]
        if np.count_nonzero(late) < 2:
            raise ValueError(
                "Expected at least 2 envelope windows in the last half of the run, got"
                f" `{np.count_nonzero(late)}`. Increase `duration`."
            )
        slope, _ = np.polyfit(centers[late], amplitudes[late], 1)
        return float(slope)

    def steady_amplitude(self) -> float:
        """Mean envelope over the last windows."""
        _, amplitudes = self.envelope()
        if len(amplitudes) == 0:
            raise ValueError(
                "Expected at least one envelope window. Increase `duration`."
            )
        return float(np.mean(amplitudes[-STEADY_WINDOWS:]))

    def is_steady(self) -> bool:
        """Whether the envelope changed by less than `1e-4` over the last windows."""
        _, amplitudes = self.envelope()
        if len(amplitudes) <= STEADY_WINDOWS:
            return False
        late = amplitudes[-STEADY_WINDOWS - 1 :]
        if np.all(late == 0):
            return True
        change = np.abs(np.diff(late)) / np.maximum(late[:-1], np.finfo(float).tiny)
        return bool(np.all(change < STEADY_RTOL))

    def max_amplitude(self) -> float:
        """Largest `|q|` of the run."""
        return float(np.max(np.abs(self.q)))

    def to_columns(self) -> str:
        """Columnar text `t q`, one sample per line."""
        rows = (
            f"{format_number(t)} {format_number(q)}" for t, q in zip(self.t, self.q)
        )
        return "# t q\n" + "\n".join(rows) + "\n"


def _time_grid(duration: float, dt: float) -> Array:
    steps = math.floor(duration / dt + 1e-9)
    return dt * np.arange(steps + 1, dtype=float)


def _duhamel_bound(
    omega: Array, gamma: float, f: Array, q0: float, v0: float, duration: float
) -> Array:
    """Upper bound of `|q|` on `[0, duration]` from the impulse response."""
    if gamma >= 2 * np.min(omega):
        return np.full_like(omega, np.inf)
    damped = np.sqrt(omega**2 - gamma**2 / 4)
    free = abs(q0) + (abs(v0) + gamma * abs(q0) / 2) / damped
    return free + np.abs(f) * duration / damped


def _rk4(
    rhs: Callable[[float, Array], Array], y0: Array, t: Array, dt: float
) -> Array:
    """Classical fixed-step Runge-Kutta scheme of order 4."""
    y = np.empty((len(y0), len(t)))
    y[:, 0] = y0
    for i in range(len(t) - 1):
        ti, yi = t[i], y[:, i]
        k1 = rhs(ti, yi)
        k2 = rhs(ti + dt / 2, yi + dt / 2 * k1)
        k3 = rhs(ti + dt / 2, yi + dt / 2 * k2)
        k4 = rhs(ti + dt, yi + dt * k3)
        y[:, i + 1] = yi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _integrate(
    omega: Array, f: Array, cfg: SimulationConfig
) -> Tuple[Array, Array, Array]:
    """
    Integrate independent oscillators that share drive frequency, damping and grid.

    :param omega: Eigenfrequencies of the oscillators
    :param f: Drive amplitudes of the oscillators
    :param cfg: Shared settings (its `eigenfrequency` and `drive_amplitude` are unused)
    :return: Times, and displacements and velocities of shape `(oscillators, times)`
    """
    size = len(omega)
    drive, phase, gamma = cfg.drive_frequency, cfg.drive_phase, cfg.gamma
    t = _time_grid(cfg.duration, cfg.time_step)

    def rhs(time: float, y: Array) -> Array:
        q, v = y[:size], y[size:]
        a = f * np.cos(drive * time + phase) - gamma * v - omega**2 * q
        return np.concatenate([v, a])

    y0 = np.concatenate(
        [np.full(size, cfg.initial_displacement), np.full(size, cfg.initial_velocity)]
    )
    bound = _duhamel_bound(
        omega,
        gamma,
        f,
        cfg.initial_displacement,
        cfg.initial_velocity,
        cfg.duration,
    )
    if cfg.method is IntegrationMethod.RK4:
        y = _rk4(rhs, y0, t, cfg.time_step)
    else:
        scale = float(np.max(np.where(np.isfinite(bound), bound, 0.0), initial=0.0))
        atol = cfg.atol if cfg.atol is not None else cfg.rtol * (scale or 1.0)
        solution = solve_ivp(
            rhs,
            (0.0, float(t[-1])),
            y0,
            method="DOP853",
            t_eval=t,
            rtol=cfg.rtol,
            atol=atol,
        )
        if not solution.success:
            raise UnstableIntegrationError(
                f"Integration failed ({solution.message}). Try a smaller `dt` or a"
                " looser `rtol`."
            )
        y = solution.y

    q, v = y[:size], y[size:]
    if not np.all(np.isfinite(y)):
        raise UnstableIntegrationError(
            f"Non-finite amplitude with `dt` = {cfg.time_step}. Try a smaller `dt`."
        )
    peak = np.max(np.abs(q), axis=1)
    if np.any(peak > BLOWUP_FACTOR * bound):
        raise UnstableIntegrationError(
            f"Amplitude `{float(np.max(peak))}` exceeds the analytic bound with `dt` ="
            f" {cfg.time_step}. Try a smaller `dt`."
        )
    return t, q, v


def evolve_mode(cfg: SimulationConfig) -> ModeEvolution:
    """
    Integrate `q'' + Γq' + ω_r²q = f cos(ω_d t + φ)`, sampled every `dt`.

    :param cfg: Oscillator, drive and integrator settings
    :return: Sampled trajectory
    """
    t, q, v = _integrate(
        np.array([cfg.eigenfrequency]), np.array([cfg.drive_amplitude]), cfg
    )
    logger.debug(
        f"Evolved mode ω_r={cfg.eigenfrequency:.6g} driven at ω_d="
        f"{cfg.drive_frequency:.6g} with {cfg.method.value} over {len(t)} samples"
    )
    return ModeEvolution(config=cfg, t=t, q=q[0], v=v[0])


def _is_exact_resonance(cfg: SimulationConfig) -> bool:
    return cfg.gamma == 0 and math.isclose(
        cfg.drive_frequency, cfg.eigenfrequency, rel_tol=1e-12
    )


def analytic_response(cfg: SimulationConfig, t: Array) -> Array:
    """
    Closed-form solution of the driven oscillator (undamped or underdamped).

    The undamped resonant drive gives the secular solution
     `q = f t sin(ω t + φ)/(2ω)` plus the free motion fixed by the initial values.
    :param cfg: Oscillator and drive settings
    :param t: Times
    :return: Displacement at `t`
    """
    omega, drive, gamma, f = (
        cfg.eigenfrequency,
        cfg.drive_frequency,
        cfg.gamma,
        cfg.drive_amplitude,
    )
    if gamma >= 2 * omega:
        raise ValueError(
            f"Expected underdamped oscillator (`gamma` < {2 * omega}), got `{gamma}`."
        )
    t = np.asarray(t, dtype=float)
    if _is_exact_resonance(cfg):
        particular = f * t * np.sin(omega * t + cfg.drive_phase) / (2 * omega)
        p0, dp0 = 0.0, f * math.sin(cfg.drive_phase) / (2 * omega)
    else:
        amplitude = (
            f
            * complex(math.cos(cfg.drive_phase), math.sin(cfg.drive_phase))
            / complex(omega**2 - drive**2, gamma * drive)
        )
        particular = np.real(amplitude * np.exp(1j * drive * t))
        p0, dp0 = amplitude.real, -drive * amplitude.imag

    damped = math.sqrt(omega**2 - gamma**2 / 4)
    c1 = cfg.initial_displacement - p0
    c2 = (cfg.initial_velocity - dp0 + gamma * c1 / 2) / damped
    free = np.exp(-gamma * t / 2) * (c1 * np.cos(damped * t) + c2 * np.sin(damped * t))
    return particular + free


def steady_state_amplitude(cfg: SimulationConfig) -> float:
    """Steady amplitude `f / sqrt((ω_r² - ω_d²)² + (Γω_d)²)` (infinite at resonance)."""
    denominator = math.hypot(
        cfg.eigenfrequency**2 - cfg.drive_frequency**2,
        cfg.gamma * cfg.drive_frequency,
    )
    if denominator == 0:
        return math.inf if cfg.drive_amplitude else 0.0
    return abs(cfg.drive_amplitude) / denominator


def saturation_sweep(
    base: SimulationConfig,
    gammas: Sequence[float],
    progress_callback: Callable[[], None] = lambda: None,
) -> SaturationTable:
    """
    Measure steady amplitudes over dissipation coefficients and fit a power law.

    Each run lasts at least `STEADY_STATE_DECAYS/Γ`.
    :param base: Oscillator and drive settings (`gamma` and short `duration` replaced)
    :param gammas: Positive dissipation coefficients
    :param progress_callback: Function called after each run
    :return: Table of steady amplitudes, with exponent `s` of `amplitude ∝ Γ^s`
    """
    if not gammas:
        raise ValueError("Expected at least one dissipation coefficient.")
    if any(g <= 0 for g in gammas):
        raise ValueError(f"Expected all `gamma` > 0, got `{list(gammas)}`.")
    rows = []
    for gamma in gammas:
        cfg = SimulationConfig(
            **{
                **base.dict(),
                "gamma": gamma,
                "duration": max(base.duration, STEADY_STATE_DECAYS / gamma),
            }
        )
        evolution = evolve_mode(cfg)
        rows.append(
            SaturationRow(
                gamma=gamma,
                duration=cfg.duration,
                steady_amplitude=evolution.steady_amplitude(),
                analytic_amplitude=steady_state_amplitude(cfg),
                is_steady=evolution.is_steady(),
            )
        )
        progress_callback()

    exponent = None
    amplitudes = [row.steady_amplitude for row in rows]
    if len(rows) > 1 and all(a > 0 for a in amplitudes):
        exponent = float(np.polyfit(np.log(gammas), np.log(amplitudes), 1)[0])
    logger.debug(f"Fitted saturation exponent {exponent} over {len(rows)} runs")
    return SaturationTable(
        eigenfrequency=base.eigenfrequency,
        drive_frequency=base.drive_frequency,
        drive_amplitude=base.drive_amplitude,
        rows=rows,
        exponent=exponent,
    )


def spectrum_drives(report: ResonanceReport) -> List[Tuple[ReportColumn, ReportCell]]:
    """
    Report cells that drive a signal oscillator.

    Vanishing cells, static terms and spatially uniform profiles drive nothing.
    """
    unit = max((c.omega for col in report.columns for c in col.cells), default=1.0)
    drives = []
    for column in report.columns:
        eigenfrequency = math.hypot(*column.wavevector)
        for cell in column.shown_cells:
            if cell.omega <= 0 or eigenfrequency <= 1e-12 * unit:
                logger.debug(
                    f"Skipping cell {column.wavenumber_label}/{cell.frequency_label}"
                    " without oscillating profile"
                )
                continue
            drives.append((column, cell))
    return drives


def _line_config(
    eigenfrequency: float, cell: ReportCell, settings: SpectrumSettings
) -> SimulationConfig:
    return SimulationConfig(
        eigenfrequency=eigenfrequency,
        drive_frequency=cell.omega,
        drive_amplitude=cell.net_amplitude,
        duration=settings.cycles * 2 * math.pi / min(cell.omega, eigenfrequency),
        method=settings.method,
        rtol=settings.rtol,
    )


def _evolve_batch(
    configs: Sequence[SimulationConfig], gamma: float = 0.0
) -> List[ModeEvolution]:
    """Evolve oscillators sharing one drive frequency as one vectorised system."""
    duration = max(c.duration for c in configs)
    if gamma:
        duration = max(duration, STEADY_STATE_DECAYS / gamma)
    dt = min(c.time_step for c in configs)
    shared = [
        SimulationConfig(
            **{**c.dict(), "gamma": gamma, "duration": duration, "dt": dt}
        )
        for c in configs
    ]
    t, q, v = _integrate(
        np.array([c.eigenfrequency for c in shared]),
        np.array([c.drive_amplitude for c in shared]),
        shared[0],
    )
    return [ModeEvolution(config=c, t=t, q=q[i], v=v[i]) for i, c in enumerate(shared)]


def _spectrum_line(
    column: ReportColumn,
    cell: ReportCell,
    free: ModeEvolution,
    dissipative: Optional[ModeEvolution],
) -> SpectrumLine:
    cfg = free.config
    secular_slope = abs(cfg.drive_amplitude) / (2 * cfg.eigenfrequency)
    slope = free.growth_slope()
    ratio = slope / secular_slope if secular_slope else 0.0
    return SpectrumLine(
        frequency_label=cell.frequency_label,
        wavenumber_label=column.wavenumber_label,
        drive_frequency=cfg.drive_frequency,
        eigenfrequency=cfg.eigenfrequency,
        drive_amplitude=cfg.drive_amplitude,
        verdict=cell.verdict,
        regime=Regime.SECULAR if ratio >= SECULAR_FRACTION else Regime.BOUNDED,
        growth_slope=slope,
        secular_slope=secular_slope,
        max_amplitude=free.max_amplitude(),
        steady_amplitude=dissipative.steady_amplitude() if dissipative else None,
        steady_oracle=steady_state_amplitude(dissipative.config)
        if dissipative
        else None,
    )


def series_filename(index: int) -> str:
    """Name of the time-series file of the spectrum line at `index`."""
    return f"line-{index:03d}.txt"


def end_to_end(
    pumps: Sequence[ModeSpec],
    geometry: CavityGeometry,
    constants: PhysicalConstants,
    settings: SpectrumSettings,
    *,
    report: Optional[ResonanceReport] = None,
    series_dir: Optional[Path] = None,
    progress_callback: Callable[[], None] = lambda: None,
) -> SpectrumSummary:
    """
    Drive one signal oscillator per report cell and classify its long-time behaviour.

    The oscillator eigenfrequency is `|k|` of the cell's spatial profile and the drive
     amplitude is the cell's net amplitude. A line is secular when its undamped growth
     slope reaches half of `f/(2ω_r)`. With `settings.gamma`, a damped run reports the
     steady amplitude against its analytic value (`f/(Γω_r)` on resonance).
    :param pumps: One or two pump modes
    :param geometry: Cavity geometry
    :param constants: Coupling constants
    :param settings: Run length, damping and integrator settings
    :param report: Precomputed resonance report of the same inputs
    :param series_dir: Directory receiving the undamped `t q` series of every line
    :param progress_callback: Function called after each line
    :return: Spectrum lines in report order
    """
    if report is None:
        report = analyze(geometry, pumps, constants)
    drives = spectrum_drives(report)
    configs = [
        _line_config(math.hypot(*column.wavevector), cell, settings)
        for column, cell in drives
    ]

    batches: Dict[float, List[int]] = defaultdict(list)
    for i, cfg in enumerate(configs):
        batches[round(cfg.drive_frequency, SIGNATURE_DIGITS)].append(i)

    lines: Dict[int, SpectrumLine] = {}
    for members in batches.values():
        undamped = _evolve_batch([configs[i] for i in members])
        damped: Sequence[Optional[ModeEvolution]] = (
            _evolve_batch([configs[i] for i in members], settings.gamma)
            if settings.gamma
            else [None] * len(members)
        )
        for i, free, dissipative in zip(members, undamped, damped):
            lines[i] = _spectrum_line(*drives[i], free, dissipative)
            if series_dir is not None:
                series_dir.mkdir(parents=True, exist_ok=True)
                (series_dir / series_filename(i)).write_text(
                    free.to_columns(), encoding="utf-8"
                )
            progress_callback()

    summary = SpectrumSummary(
        geometry=geometry,
        pumps=list(pumps),
        constants=constants,
        settings=settings,
        lines=[lines[i] for i in range(len(drives))],
    )
    logger.debug(
        f"Spectrum of {len(summary.lines)} lines, {len(summary.accumulating)} secular"
    )
    return summary
