"""Cubic vacuum nonlinearity: invariants, constitutive fields and wave sources."""
from typing import Dict, FrozenSet, Tuple

from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.fields import (
    FieldPair,
    VectorTrigField,
    curl,
    divergence,
    gradient,
    laplacian,
)
from ehcavity.logging import get_logger
from ehcavity.trigpoly import (
    COORDINATES,
    SLOTS,
    Coefficients,
    HarmonicKey,
    LatticeBasis,
    Parity,
    TrigPoly,
    canonicalize,
)

logger = get_logger(__file__)

#: Harmonics `(c₁, c₂)` that a cubic product of two pumps can carry (canonical signs)
CUBIC_COMBINATIONS: FrozenSet[Coefficients] = frozenset(
    {(1, 0), (0, 1), (3, 0), (0, 3), (2, 1), (2, -1), (1, 2), (1, -2)}
)


def invariants(f: FieldPair) -> Tuple[TrigPoly, TrigPoly]:
    """
    Field invariants `F = -2(E·E - B·B)` and `G = -4 E·B`.

    :param f: Field configuration
    :return: Invariants `(F, G)`
    """
    e2_minus_b2 = f.E.dot(f.E) - f.B.dot(f.B)
    return e2_minus_b2 * -2, f.E.dot(f.B) * -4


def polarization_magnetization(
    f: FieldPair, c: PhysicalConstants
) -> Tuple[VectorTrigField, VectorTrigField]:
    """
    Vacuum polarization and magnetization.

    `P = 16κ[(E² - B²)E + 2β(E·B)B]` and `M = 16κ[(E² - B²)B - 2β(E·B)E]`.
    :param f: Field configuration
    :param c: Coupling constants
    :return: Fields `(P, M)`
    """
    basis = f.basis
    if c.kappa == 0:
        return VectorTrigField.zero(basis), VectorTrigField.zero(basis)
    e2_minus_b2 = f.E.dot(f.E) - f.B.dot(f.B)
    e_dot_b = f.E.dot(f.B) * (2 * c.beta)
    p = (f.E * e2_minus_b2 + f.B * e_dot_b) * (16 * c.kappa)
    m = (f.B * e2_minus_b2 - f.E * e_dot_b) * (16 * c.kappa)
    return p, m


def sources_from_constitutive(p: VectorTrigField, m: VectorTrigField) -> FieldPair:
    """
    Right-hand sides of the linearized wave equations `□E = S_E`, `□B = S_B`.

    `S_E = ∂t curl M + grad div P - ∂t² P` and `S_B = ∂t curl P - grad div M + ΔM`.
    """
    s_e = (
        curl(m).differentiate("t")
        + gradient(divergence(p))
        - p.differentiate("t").differentiate("t")
    )
    s_b = curl(p).differentiate("t") - gradient(divergence(m)) + laplacian(m)
    return FieldPair(E=s_e, B=s_b)


def wave_rhs(f: FieldPair, c: PhysicalConstants) -> FieldPair:
    """
    Sources `(S_E, S_B)` of the signal fields generated by a pump configuration.

    :param f: Pump configuration (solution of the free wave equations)
    :param c: Coupling constants
    :return: Sources as a field pair
    """
    sources = sources_from_constitutive(*polarization_magnetization(f, c))
    logger.debug(
        "Computed sources with"
        f" {sum(len(p) for p in sources.components().values())} terms"
    )
    return sources


def maxwell_consistency(p: VectorTrigField, m: VectorTrigField) -> FieldPair:
    """
    Residual of the wave-equation sources against the first-order Maxwell system.

    With `D = E + P` and `H = B + M`, the first-order system carries the current
     `J = ∂t P - curl M` and the charge `ρ = -div P`, whose wave equations read
     `□E = -grad ρ - ∂t J` and `□B = curl J`. The residual is empty when
     `sources_from_constitutive` agrees with them.
    """
    current = p.differentiate("t") - curl(m)
    charge = divergence(p) * -1
    expected = FieldPair(
        E=-gradient(charge) - current.differentiate("t"), B=curl(current)
    )
    actual = sources_from_constitutive(p, m)
    return FieldPair(E=actual.E - expected.E, B=actual.B - expected.B)


def combination_lattice(basis: LatticeBasis) -> Dict[str, FrozenSet[Coefficients]]:
    """
    Harmonics that cubic sources of the pumps in `basis` can carry, per coordinate.

    Combinations involving an unregistered slot are skipped, the others are projected
     through the basis (generators that are exactly zero drop out) and brought to
     canonical sign.
    """
    registered = [
        c
        for c in CUBIC_COMBINATIONS
        if all(v == 0 or basis.is_registered(s) for s, v in zip(SLOTS, c))
    ]
    lattice = {}
    for i, coordinate in enumerate(COORDINATES):
        allowed = set()
        for coefficients in registered:
            pattern = [(0, 0)] * 4
            pattern[i] = coefficients
            key = HarmonicKey.build(pattern, [Parity.COS] * 4)
            term = canonicalize(1.0, key, basis=basis)
            if term is not None:
                allowed.add(term.key.coefficients[i])
        lattice[coordinate] = frozenset(allowed)
    return lattice
