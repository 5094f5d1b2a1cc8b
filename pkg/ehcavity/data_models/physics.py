"""Data models - Constants of the nonlinear vacuum."""
import math

from pydantic import validator
from scipy.constants import fine_structure, physical_constants

from ehcavity.data_models.base import EhcavityBase

ELECTRON_MASS_EV = physical_constants["electron mass energy equivalent in MeV"][0] * 1e6

#: Physical coupling `α²/(90 m_e⁴)`, in `eV⁻⁴` (natural units)
QED_KAPPA = fine_structure**2 / (90 * ELECTRON_MASS_EV**4)


class PhysicalConstants(EhcavityBase):
    """Coupling `κ` and ratio `β` of the quartic field-invariant terms."""

    kappa: float = 1.0
    beta: float = 7 / 4

    @validator("kappa")
    def nonnegative_kappa(cls, v: float) -> float:
        """Check that coupling is nonnegative and finite."""
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"Expected `kappa` >= 0, got `{v}`.")
        return v

    @validator("beta")
    def finite_beta(cls, v: float) -> float:
        """Check that `beta` is finite."""
        if not math.isfinite(v):
            raise ValueError(f"Expected finite `beta`, got `{v}`.")
        return v

    @classmethod
    def qed(cls) -> "PhysicalConstants":
        """Constants with the physical QED coupling (fields in `eV²`)."""
        return cls(kappa=QED_KAPPA)
