"""Data models - Modal oscillator runs, saturation sweeps and spectra."""
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import root_validator, validator

from ehcavity.data_models.base import EhcavityBase
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.data_models.report import Verdict

SAMPLES_PER_PERIOD = 40


class IntegrationMethod(str, Enum):
    """Time integrators of the modal oscillator."""

    DOP853 = "DOP853"
    RK4 = "RK4"


class SimulationConfig(EhcavityBase):
    """
    Driven damped oscillator `q'' + Γq' + ω_r²q = f cos(ω_d t + φ)`.

    When `dt` is omitted, the largest step below `SAMPLES_PER_PERIOD` samples per
     period of the faster motion that divides the envelope window is picked.
    """

    eigenfrequency: float
    drive_frequency: float
    drive_amplitude: float = 1.0
    drive_phase: float = 0.0
    gamma: float = 0.0
    duration: float
    dt: Optional[float] = None
    initial_displacement: float = 0.0
    initial_velocity: float = 0.0
    method: IntegrationMethod = IntegrationMethod.DOP853
    rtol: float = 1e-10
    atol: Optional[float] = None

    @validator("eigenfrequency", "duration")
    def positive(cls, v: float) -> float:
        """Check that value is positive and finite."""
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"Expected positive finite value, got `{v}`.")
        return v

    @validator("drive_frequency", "gamma")
    def nonnegative(cls, v: float) -> float:
        """Check that value is nonnegative and finite."""
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"Expected nonnegative finite value, got `{v}`.")
        return v

    @validator("rtol", "atol")
    def positive_tolerance(cls, v: Optional[float]) -> Optional[float]:
        """Check that tolerances are positive."""
        if v is not None and v <= 0:
            raise ValueError(f"Expected positive tolerance, got `{v}`.")
        return v

    @root_validator(skip_on_failure=True)
    def resolve_time_step(cls, values: Dict) -> Dict:
        """Pick or check the time step against the sampling limit."""
        omegas = [w for w in (values["drive_frequency"], values["eigenfrequency"]) if w]
        fastest, slowest = max(omegas), min(omegas)
        limit = 2 * math.pi / (SAMPLES_PER_PERIOD * fastest)
        dt = values["dt"]
        if dt is None:
            window = 2 * math.pi / slowest
            values["dt"] = window / math.ceil(SAMPLES_PER_PERIOD * fastest / slowest)
        elif not math.isfinite(dt) or dt <= 0 or dt > limit * (1 + 1e-12):
            raise ValueError(f"Expected `dt` <= {limit:.6g}, got `{dt}`.")
        if values["dt"] > values["duration"]:
            raise ValueError(
                f"Expected `duration` >= `dt`, got `{values['duration']}` and"
                f" `{values['dt']}`."
            )
        return values

    @property
    def window(self) -> float:
        """Envelope window: one period of the slower of drive and oscillator."""
        slowest = min(w for w in (self.drive_frequency, self.eigenfrequency) if w)
        return 2 * math.pi / slowest

    @property
    def time_step(self) -> float:
        """Resolved time step."""
        assert self.dt is not None
        return self.dt


class SaturationRow(EhcavityBase):
    """Steady amplitude measured for one dissipation coefficient."""

    gamma: float
    duration: float
    steady_amplitude: float
    analytic_amplitude: float
    is_steady: bool

    @property
    def relative_deviation(self) -> float:
        """Deviation of measured from analytic steady amplitude."""
        if self.analytic_amplitude == 0:
            return abs(self.steady_amplitude)
        return abs(self.steady_amplitude / self.analytic_amplitude - 1)


class SaturationTable(EhcavityBase):
    """Steady amplitudes over dissipation coefficients, with fitted power law."""

    eigenfrequency: float
    drive_frequency: float
    drive_amplitude: float
    rows: List[SaturationRow]
    exponent: Optional[float]


class SpectrumSettings(EhcavityBase):
    """Settings of `end_to_end` spectrum runs."""

    gamma: Optional[float] = None
    cycles: int = 100
    rtol: float = 1e-10
    method: IntegrationMethod = IntegrationMethod.DOP853

    @validator("gamma")
    def positive_gamma(cls, v: Optional[float]) -> Optional[float]:
        """Check that the dissipation coefficient (if any) is positive."""
        if v is not None and (not math.isfinite(v) or v <= 0):
            raise ValueError(f"Expected `gamma` > 0, got `{v}`.")
        return v

    @validator("cycles")
    def positive_cycles(cls, v: int) -> int:
        """Check that at least a few periods are simulated."""
        if v < 4:
            raise ValueError(f"Expected `cycles` >= 4, got `{v}`.")
        return v


class Regime(str, Enum):
    """Long-time behaviour of a driven mode."""

    SECULAR = "secular"
    BOUNDED = "bounded"


class SpectrumLine(EhcavityBase):
    """Dynamics of the mode driven by one report cell."""

    frequency_label: str
    wavenumber_label: str
    drive_frequency: float
    eigenfrequency: float
    drive_amplitude: float
    verdict: Verdict
    regime: Regime
    growth_slope: float
    secular_slope: float
    max_amplitude: float
    steady_amplitude: Optional[float] = None
    steady_oracle: Optional[float] = None

    @property
    def growth_ratio(self) -> float:
        """Measured growth slope relative to the secular slope `f/(2ω_r)`."""
        return self.growth_slope / self.secular_slope if self.secular_slope else 0.0

    @property
    def oracle_deviation(self) -> Optional[float]:
        """Deviation of steady amplitude from `f/(Γω_r)` (damped runs only)."""
        if self.steady_amplitude is None or not self.steady_oracle:
            return None
        return abs(self.steady_amplitude / self.steady_oracle - 1)


class SpectrumSummary(EhcavityBase):
    """Spectrum of signal modes driven by the sources of a pump configuration."""

    geometry: CavityGeometry
    pumps: List[ModeSpec]
    constants: PhysicalConstants
    settings: SpectrumSettings
    lines: List[SpectrumLine]

    @property
    def accumulating(self) -> List[SpectrumLine]:
        """Lines that grow secularly."""
        return [line for line in self.lines if line.regime is Regime.SECULAR]
