"""Data models - Resonance classification reports and geometry studies."""
import math
from collections import Counter
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import root_validator, validator

from ehcavity.data_models.base import EhcavityBase
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.trigpoly import Coefficients, HarmonicKey

Indices = Tuple[int, int, int]
Vector = Tuple[float, float, float]


class Verdict(str, Enum):
    """Outcome of the resonance criterion for a source term."""

    RESONANT = "resonant"
    NON_RESONANT = "non-resonant"
    VANISHING_AMPLITUDE = "vanishing-amplitude"
    PARITY_MISMATCH = "parity-mismatch"


#: Verdict shown for a cell when its records disagree (first one present wins)
VERDICT_PRECEDENCE = (
    Verdict.RESONANT,
    Verdict.PARITY_MISMATCH,
    Verdict.NON_RESONANT,
    Verdict.VANISHING_AMPLITUDE,
)


class SourceTermRecord(EhcavityBase):
    """One source term with its numeric frequency, wavevector and verdict."""

    key: HarmonicKey
    omega: float
    wavevector: Vector
    indices: Optional[Indices]
    amplitudes: Dict[str, float]
    net_amplitude: float
    verdict: Verdict
    self_resonance: bool = False
    frequency_label: str
    wavenumber_label: str


class ReportCell(EhcavityBase):
    """Frequency entry of a report column."""

    frequency_label: str
    time: Coefficients
    omega: float
    verdict: Verdict
    net_amplitude: float
    self_resonance: bool = False

    @property
    def is_shown(self) -> bool:
        """Whether cell is printed in tables (vanishing cells are hidden)."""
        return self.verdict is not Verdict.VANISHING_AMPLITUDE


class ReportColumn(EhcavityBase):
    """All frequencies found at one spatial key (a column of the resonance table)."""

    wavenumber_label: str
    spatial: Tuple[Coefficients, Coefficients, Coefficients]
    wavevector: Vector
    indices: Optional[Indices]
    cells: List[ReportCell]

    @property
    def shown_cells(self) -> List[ReportCell]:
        """Cells that are not vanishing."""
        return [c for c in self.cells if c.is_shown]


class ResonanceReport(EhcavityBase):
    """Classification of every source term, grouped by spatial key."""

    geometry: CavityGeometry
    pumps: List[ModeSpec]
    tolerance: float
    records: List[SourceTermRecord]
    columns: List[ReportColumn]

    @property
    def verdict_counts(self) -> Dict[Verdict, int]:
        """Number of records per verdict (all verdicts present, possibly zero)."""
        counts = Counter(r.verdict for r in self.records)
        return {v: counts.get(v, 0) for v in Verdict}

    @property
    def resonant(self) -> List[SourceTermRecord]:
        """Resonant records."""
        return [r for r in self.records if r.verdict is Verdict.RESONANT]

    def document(self) -> Dict[str, Any]:
        """Return JSON-ready representation, including verdict counts."""
        doc = super().document()
        doc["verdict_counts"] = {v.value: n for v, n in self.verdict_counts.items()}
        return doc


class ConstraintKind(str, Enum):
    """One-parameter families of cavity geometries."""

    LX_EQUALS_LY = "lx-equals-ly"
    FIX_RATIO_XY = "fix-ratio-xy"


class GeometryConstraint(EhcavityBase):
    """
    Family `(L_x, L_y, L_z) = (1/r, ρ/r, 1)` scanned over `r = L_z/L_x`.

    The ratio `ρ = L_y/L_x` is 1 for `lx-equals-ly`.
    """

    kind: ConstraintKind = ConstraintKind.LX_EQUALS_LY
    ratio: float = 1.0
    interval: Tuple[float, float] = (0.1, 1.0)
    tolerance: float = 1e-12
    subdivisions: int = 10_000

    @validator("interval")
    def positive_interval(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        """Check that the scan interval is positive and ordered."""
        low, high = v
        if not (0 < low < high and math.isfinite(high)):
            raise ValueError(f"Expected `0 < low < high` for `interval`, got `{v}`.")
        return v

    @validator("tolerance", "ratio")
    def positive(cls, v: float) -> float:
        """Check that value is positive."""
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"Expected positive value, got `{v}`.")
        return v

    @validator("subdivisions")
    def enough_subdivisions(cls, v: int) -> int:
        """Check that the scan has at least one subdivision."""
        if v < 1:
            raise ValueError(f"Expected `subdivisions` >= 1, got `{v}`.")
        return v

    @root_validator(skip_on_failure=True)
    def ratio_of_kind(cls, values: Dict) -> Dict:
        """Check that `lx-equals-ly` has unit ratio."""
        if values["kind"] is ConstraintKind.LX_EQUALS_LY and values["ratio"] != 1:
            raise ValueError(
                f"Expected `ratio` = 1 for `lx-equals-ly`, got `{values['ratio']}`."
            )
        return values

    def geometry(self, r: float) -> CavityGeometry:
        """Member of the family for `r = L_z/L_x`."""
        return CavityGeometry(lx=1 / r, ly=self.ratio / r, lz=1.0)


class GeometrySolution(EhcavityBase):
    """Roots of a frequency-matching condition over a geometry family."""

    pumps: Tuple[ModeSpec, ModeSpec]
    signal: Indices
    sign: int
    constraint: GeometryConstraint
    roots: List[float]
    geometries: List[CavityGeometry]


class TriangleRecord(EhcavityBase):
    """Triangle inequality `|2k₂| + |k₁| >= |2k₂ + k₁|` for a pair of wavevectors."""

    k1: Vector
    k2: Vector
    lhs: float
    rhs: float
    parallel: bool
    strict: bool

    @property
    def excludes_plus_resonance(self) -> bool:
        """
        Whether `2ω₂ + ω₁` cannot resonate.

        A strict inequality rules out the dispersion match, and equality only happens
         for parallel wavevectors, where the combined-frequency amplitude vanishes.
        """
        return self.strict or self.parallel
