import math

import pytest
from pydantic import ValidationError

from ehcavity.data_models.cavity import (
    CavityGeometry,
    InvalidModeError,
    ModeKind,
    ModeSpec,
    check_indices,
    is_cavity_mode,
)


class TestModeSpec:
    """Pump mode strings."""

    def test_parse_compact(self) -> None:
        """Parse `TE011`, with options after a colon."""
        mode = ModeSpec.parse("TE011")
        assert (mode.kind, mode.indices, mode.amplitude) == (ModeKind.TE, (0, 1, 1), 1)
        assert ModeSpec.parse("TM110:F0=2").amplitude == 2.0

    def test_parse_options(self) -> None:
        """Parse indices and values given as options."""
        mode = ModeSpec.parse("TE:n=1,p=0,q=12")
        assert mode.indices == (1, 0, 12)
        line = ModeSpec.parse("1D:n=2,alpha=pi/4,F0=0.5")
        assert line.is_1d
        assert line.indices == (2, 0, 0)
        assert line.alpha == pytest.approx(math.pi / 4)
        assert line.amplitude == 0.5

    @pytest.mark.parametrize(
        "text", ["TE011", "TM110:F0=2", "TE:n=1,p=0,q=12", "1D:n=2,F0=0.5"]
    )
    def test_label(self, text: str) -> None:
        """Labels parse back into the same mode."""
        mode = ModeSpec.parse(text)
        assert mode.label == text
        assert ModeSpec.parse(mode.label) == mode

    @pytest.mark.parametrize(
        "text, message",
        [
            ("XY011", "Expected mode kind"),
            ("TE011:foo=1", "Expected `name=value`"),
            ("TE:n=1,n=2,q=1", "Duplicate option"),
            ("TE:p=1,q=1", "Missing index `n`"),
            ("TE:n=a,q=1", "Invalid value"),
            ("TE010", "TE"),
            ("TM101", "TM"),
            ("1D:n=0", "1D"),
            ("1D:n=1,q=1", "1D"),
        ],
    )
    def test_parse_invalid(self, text: str, message: str) -> None:
        """Reject malformed strings and index combinations that are not modes."""
        with pytest.raises(InvalidModeError, match=message):
            ModeSpec.parse(text)

    def test_alpha_only_1d(self) -> None:
        """Polarization angles only apply to 1D modes."""
        with pytest.raises(ValidationError, match="alpha"):
            ModeSpec(kind=ModeKind.TE, n=0, p=1, q=1, alpha=0.1)


def test_check_indices() -> None:
    """Validate index combinations per family."""
    check_indices(ModeKind.TE, 1, 0, 1)
    check_indices(ModeKind.TM, 1, 1, 0)
    check_indices(ModeKind.ONE_D, 3, 0, 0)
    with pytest.raises(InvalidModeError, match="nonnegative"):
        check_indices(ModeKind.TE, -1, 0, 1)
    assert is_cavity_mode(1, 3, 0)
    assert is_cavity_mode(0, 1, 1)
    assert not is_cavity_mode(0, 0, 1)
    assert not is_cavity_mode(1, 0, 0)


class TestCavityGeometry:
    """Box dimensions."""

    def test_parse(self) -> None:
        """Parse arithmetic expressions."""
        geometry = CavityGeometry.parse("pi,10,10")
        assert geometry.lengths == (math.pi, 10.0, 10.0)
        assert geometry.label == "3.14159265358979,10,10"

    def test_invalid(self) -> None:
        """Reject non-positive lengths."""
        with pytest.raises(ValidationError, match="positive finite length"):
            CavityGeometry.parse("1,0,1")
        with pytest.raises(ValueError, match="Expected 3"):
            CavityGeometry.parse("1,1")
