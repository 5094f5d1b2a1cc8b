import pytest
from pydantic import ValidationError

from ehcavity.data_models.physics import QED_KAPPA, PhysicalConstants


def test_constants_defaults() -> None:
    """Use unit coupling and the QED ratio by default."""
    constants = PhysicalConstants()
    assert (constants.kappa, constants.beta) == (1.0, 1.75)


def test_constants_qed() -> None:
    """Physical coupling is `α²/(90 m_e⁴)` in `eV⁻⁴`."""
    assert PhysicalConstants.qed().kappa == QED_KAPPA
    assert QED_KAPPA == pytest.approx(8.678e-30, rel=1e-3)


@pytest.mark.parametrize(
    "fields, message",
    [
        ({"kappa": -1}, "kappa"),
        ({"kappa": float("inf")}, "kappa"),
        ({"beta": float("nan")}, "beta"),
    ],
)
def test_constants_invalid(fields: dict, message: str) -> None:
    """Reject negative or non-finite constants."""
    with pytest.raises(ValidationError, match=message):
        PhysicalConstants(**fields)
