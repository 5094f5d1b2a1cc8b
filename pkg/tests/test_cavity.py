import math

import numpy as np
import pytest

from ehcavity.cavity import (
    build_mode,
    build_mode_1d,
    build_mode_3d,
    build_pumps,
    eigenfrequency,
    polarization,
    wavevector,
)
from ehcavity.data_models.cavity import CavityGeometry, InvalidModeError, ModeSpec
from ehcavity.fields import curl, divergence

BOX = CavityGeometry(lx=1.0, ly=1.3, lz=0.7)
MODES = ["TE011", "TE101", "TE012", "TE:n=2,p=1,q=3", "TM110", "TM111", "TM121:F0=2"]


def test_eigenfrequency() -> None:
    """Eigenfrequencies follow `ω = |k|` of the mode indices."""
    slab = CavityGeometry.parse("pi,10,10")
    assert eigenfrequency(slab, 1, 0, 0) == pytest.approx(1.0)
    assert eigenfrequency(slab, 3, 0, 0) == pytest.approx(3.0)
    cube = CavityGeometry(lx=1.0, ly=1.0, lz=1.0)
    assert eigenfrequency(cube, 0, 1, 1) == pytest.approx(math.pi * math.sqrt(2))
    assert wavevector(cube, 1, 0, 2) == pytest.approx((math.pi, 0.0, 2 * math.pi))


def test_eigenfrequency__no_indices() -> None:
    """Reject the all-zero index triple."""
    with pytest.raises(InvalidModeError, match="nonzero index"):
        eigenfrequency(BOX, 0, 0, 0)


@pytest.mark.parametrize("mode", MODES)
def test_maxwell_equations(mode: str) -> None:
    """Pump modes are vacuum solutions: divergence free, Faraday and Ampère."""
    pair = build_mode(BOX, ModeSpec.parse(mode))
    assert not divergence(pair.E)
    assert not divergence(pair.B)
    assert pair.E.differentiate("t") == curl(pair.B)
    assert pair.B.differentiate("t") == -curl(pair.E)


@pytest.mark.parametrize("mode", MODES)
def test_boundary_conditions(mode: str) -> None:
    """Tangential `E` and normal `B` vanish on the conducting walls."""
    pair = build_mode(BOX, ModeSpec.parse(mode))
    rng = np.random.default_rng(0)
    for axis, length in enumerate(BOX.lengths):
        points = rng.uniform(0, 1, size=(40, 4))
        points[:20, axis + 1] = 0.0
        points[20:, axis + 1] = length
        tangential = [i for i in range(3) if i != axis]
        e_values = pair.E.eval_at(points)[:, tangential]
        b_values = pair.B.eval_at(points)[:, axis]
        np.testing.assert_allclose(e_values, 0.0, atol=1e-12)
        np.testing.assert_allclose(b_values, 0.0, atol=1e-12)


def test_polarization() -> None:
    """Scale polarization to the largest component and keep it transverse."""
    cube = CavityGeometry(lx=1.0, ly=1.0, lz=1.0)
    assert polarization(cube, ModeSpec.parse("TE101:F0=2")) == pytest.approx(
        (0.0, -2.0, 0.0)
    )
    for mode in MODES:
        parsed = ModeSpec.parse(mode)
        e = polarization(BOX, parsed)
        k = wavevector(BOX, *parsed.indices)
        assert max(abs(v) for v in e) == pytest.approx(parsed.amplitude)
        assert np.dot(e, k) == pytest.approx(0.0, abs=1e-12)


def test_build_mode_1d() -> None:
    """`E_y = F₀ sin(kx) sin(ωt)` and `B_z = F₀ cos(kx) cos(ωt)` for `α = 0`."""
    slab = CavityGeometry.parse("pi,10,10")
    pair = build_mode_1d(slab, ModeSpec.parse("1D:n=1,F0=0.5"))
    assert not pair.E.x and not pair.E.z
    assert not pair.B.x and not pair.B.y
    points = np.random.default_rng(1).uniform(-3, 3, size=(30, 4))
    t, x = points[:, 0], points[:, 1]
    np.testing.assert_allclose(
        pair.E.eval_at(points)[:, 1], 0.5 * np.sin(x) * np.sin(t), atol=1e-12
    )
    np.testing.assert_allclose(
        pair.B.eval_at(points)[:, 2], 0.5 * np.cos(x) * np.cos(t), atol=1e-12
    )


def test_build_mode_1d__alpha() -> None:
    """A polarization angle rotates the field in the `y-z` plane."""
    slab = CavityGeometry.parse("pi,10,10")
    pair = build_mode_1d(slab, ModeSpec.parse("1D:n=2,alpha=pi/2"))
    assert not pair.E.y
    assert not pair.B.z
    points = np.random.default_rng(2).uniform(-3, 3, size=(30, 4))
    t, x = points[:, 0], points[:, 1]
    np.testing.assert_allclose(
        pair.E.eval_at(points)[:, 2], np.sin(2 * x) * np.sin(2 * t), atol=1e-12
    )
    np.testing.assert_allclose(
        pair.B.eval_at(points)[:, 1], -np.cos(2 * x) * np.cos(2 * t), atol=1e-12
    )


def test_build_mode__wrong_kind() -> None:
    """Builders refuse modes of the other family."""
    with pytest.raises(InvalidModeError, match="1D mode"):
        build_mode_1d(BOX, ModeSpec.parse("TE011"))
    with pytest.raises(InvalidModeError, match="TE or TM mode"):
        build_mode_3d(BOX, ModeSpec.parse("1D:n=1"))


def test_build_pumps() -> None:
    """Place two pumps in separate slots of one lattice."""
    pair = build_pumps(BOX, [ModeSpec.parse("TE011"), ModeSpec.parse("TM110")])
    basis = pair.basis
    assert basis.is_registered(1) and basis.is_registered(2)
    assert basis.omegas == pytest.approx(
        (eigenfrequency(BOX, 0, 1, 1), eigenfrequency(BOX, 1, 1, 0))
    )


def test_build_pumps__invalid() -> None:
    """Accept one or two pumps of the same dimensionality only."""
    te = ModeSpec.parse("TE011")
    with pytest.raises(ValueError, match="1 or 2 pump modes"):
        build_pumps(BOX, [te, te, te])
    with pytest.raises(ValueError, match="1 or 2 pump modes"):
        build_pumps(BOX, [])
    with pytest.raises(InvalidModeError, match="1D and 3D"):
        build_pumps(BOX, [te, ModeSpec.parse("1D:n=1")])
