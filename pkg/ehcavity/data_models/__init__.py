"""Validated records of cavities, pump modes, reports and simulations."""
from ehcavity.data_models.cavity import (
    CavityGeometry,
    InvalidModeError,
    ModeKind,
    ModeSpec,
)
from ehcavity.data_models.manifest import RunManifest
from ehcavity.data_models.physics import QED_KAPPA, PhysicalConstants
from ehcavity.data_models.report import (
    GeometryConstraint,
    ResonanceReport,
    SourceTermRecord,
    Verdict,
)
from ehcavity.data_models.simulation import (
    SimulationConfig,
    SpectrumSettings,
    SpectrumSummary,
)
