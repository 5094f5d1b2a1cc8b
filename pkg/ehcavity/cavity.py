"""Pump modes of a rectangular cavity with perfectly conducting walls."""
import math
from typing import Dict, Sequence, Tuple

from ehcavity.data_models.cavity import (
    CavityGeometry,
    InvalidModeError,
    ModeKind,
    ModeSpec,
)
from ehcavity.fields import FieldPair, VectorTrigField, curl
from ehcavity.logging import get_logger
from ehcavity.trigpoly import (
    DROP_TOLERANCE,
    HarmonicKey,
    LatticeBasis,
    Parity,
    TrigPoly,
)

logger = get_logger(__file__)

S, C = Parity.SIN, Parity.COS

#: Spatial `(x, y, z)` parities of each field component under conducting walls
BOUNDARY_PARITIES: Dict[str, Tuple[Parity, Parity, Parity]] = {
    "E_x": (C, S, S),
    "E_y": (S, C, S),
    "E_z": (S, S, C),
    "B_x": (S, C, C),
    "B_y": (C, S, C),
    "B_z": (C, C, S),
}


def wavevector(g: CavityGeometry, n: int, p: int, q: int) -> Tuple[float, float, float]:
    """Wavevector `π (n/L_x, p/L_y, q/L_z)` of mode indices."""
    return math.pi * n / g.lx, math.pi * p / g.ly, math.pi * q / g.lz


def eigenfrequency(g: CavityGeometry, n: int, p: int, q: int) -> float:
    """
    Eigenfrequency `ω = |k| = π sqrt(n²/L_x² + p²/L_y² + q²/L_z²)`.

    :param g: Cavity geometry
    :param n: Index along x
    :param p: Index along y
    :param q: Index along z
    :return: Angular frequency (natural units)
    """
    if n == p == q == 0:
        raise InvalidModeError("Expected at least one nonzero index, got `(0, 0, 0)`.")
    return math.hypot(*wavevector(g, n, p, q))


def _unit(slot: int) -> Tuple[int, int]:
    return (1, 0) if slot == 1 else (0, 1)


def _component(
    basis: LatticeBasis,
    amplitude: float,
    slot: int,
    parities: Tuple[Parity, Parity, Parity],
    axes: Tuple[bool, bool, bool] = (True, True, True),
) -> TrigPoly:
    """Standing wave `amplitude·sin(ωt)·h(k_x x)·h(k_y y)·h(k_z z)` of one slot."""
    if amplitude == 0:
        return TrigPoly.zero(basis)
    unit, null = _unit(slot), (0, 0)
    x, y, z = (unit if on else null for on in axes)
    key = HarmonicKey.build([unit, x, y, z], [S, *parities])
    return TrigPoly(basis, [(amplitude, key)])


def _with_faraday_partner(e: VectorTrigField) -> FieldPair:
    """Complete `E` with the magnetic field solving `∂t B = -curl E`."""
    return FieldPair(E=e, B=(-curl(e)).integrate("t"))


def build_mode_1d(g: CavityGeometry, m: ModeSpec, basis_slot: int = 1) -> FieldPair:
    """
    Standing wave between the walls `x = 0` and `x = L_x`.

    `E = F₀ sin(k x) sin(ω t) (0, cos α, sin α)` with `ω = k = nπ/L_x`, and `B` follows
     from Faraday's law, so that `α = 0` gives `B_z = F₀ cos(k x) cos(ω t)`.
    """
    if m.kind is not ModeKind.ONE_D:
        raise InvalidModeError(f"Expected a 1D mode, got `{m.label}`.")
    k = math.pi * m.n / g.lx
    basis = LatticeBasis.single(basis_slot, k, (k, 0.0, 0.0))
    cos_a, sin_a = math.cos(m.alpha), math.sin(m.alpha)
    # exact zeros for axis-aligned polarizations
    cos_a = 0.0 if abs(cos_a) <= DROP_TOLERANCE else cos_a
    sin_a = 0.0 if abs(sin_a) <= DROP_TOLERANCE else sin_a
    profile = (S, C, C), (True, False, False)
    e = VectorTrigField(
        TrigPoly.zero(basis),
        _component(basis, m.amplitude * cos_a, basis_slot, *profile),
        _component(basis, m.amplitude * sin_a, basis_slot, *profile),
    )
    return _with_faraday_partner(e)


def polarization(g: CavityGeometry, m: ModeSpec) -> Tuple[float, float, float]:
    """
    Electric polarization of a TE or TM mode, scaled to `max |e_i| = F₀`.

    TE modes have `e ∝ (k_y, -k_x, 0)` and TM modes
     `e ∝ (-k_x k_z, -k_y k_z, k_x² + k_y²)`.
    """
    kx, ky, kz = wavevector(g, *m.indices)
    if m.kind is ModeKind.TE:
        e = (ky, -kx, 0.0)
    elif m.kind is ModeKind.TM:
        e = (-kx * kz, -ky * kz, kx**2 + ky**2)
    else:
        raise InvalidModeError(f"Expected a TE or TM mode, got `{m.label}`.")
    scale = m.amplitude / max(abs(v) for v in e)
    ex, ey, ez = (v * scale for v in e)
    return ex, ey, ez


def build_mode_3d(g: CavityGeometry, m: ModeSpec, basis_slot: int = 1) -> FieldPair:
    """
    TE or TM mode of the rectangular cavity.

    `E_x = e_x cos(k_x x) sin(k_y y) sin(k_z z)`, `E_y = e_y sin cos sin` and
     `E_z = e_z sin sin cos`, all times `sin(ω t)`, and `B` from Faraday's law.
    """
    ex, ey, ez = polarization(g, m)
    omega = eigenfrequency(g, *m.indices)
    basis = LatticeBasis.single(basis_slot, omega, wavevector(g, *m.indices))
    e = VectorTrigField(
        _component(basis, ex, basis_slot, BOUNDARY_PARITIES["E_x"]),
        _component(basis, ey, basis_slot, BOUNDARY_PARITIES["E_y"]),
        _component(basis, ez, basis_slot, BOUNDARY_PARITIES["E_z"]),
    )
    return _with_faraday_partner(e)


def build_mode(g: CavityGeometry, m: ModeSpec, basis_slot: int = 1) -> FieldPair:
    """Build pump mode of any kind in `basis_slot`."""
    if m.is_1d:
        return build_mode_1d(g, m, basis_slot)
    return build_mode_3d(g, m, basis_slot)


def mode_frequency(g: CavityGeometry, m: ModeSpec) -> float:
    """Eigenfrequency of a pump mode."""
    return eigenfrequency(g, *m.indices)


def build_pumps(geometry: CavityGeometry, pumps: Sequence[ModeSpec]) -> FieldPair:
    """
    Total field of one or two pump modes, in slots 1 and 2.

    :param geometry: Cavity geometry
    :param pumps: Pump modes (a repeated mode still occupies its own slot)
    :return: Sum of the pump configurations
    """
    if not 1 <= len(pumps) <= 2:
        raise ValueError(f"Expected 1 or 2 pump modes, got {len(pumps)}.")
    if len({m.is_1d for m in pumps}) > 1:
        raise InvalidModeError("Cannot combine 1D and 3D pump modes.")
    pairs = [build_mode(geometry, m, slot) for slot, m in enumerate(pumps, start=1)]
    logger.debug(f"Built pumps {[m.label for m in pumps]} in geometry {geometry.label}")
    total = pairs[0]
    for pair in pairs[1:]:
        total = total + pair
    return total
