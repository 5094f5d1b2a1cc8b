from fractions import Fraction
from typing import Sequence

import numpy as np
import pytest

from ehcavity.trigpoly import (
    HarmonicKey,
    LatticeBasis,
    Parity,
    SnapError,
    TrigPoly,
    canonicalize,
    combination_label,
    describe_key,
    differentiate,
    eval_at,
    integrate,
    multiply,
    rational_snap,
)

S, C = Parity.SIN, Parity.COS

#: Two pumps with `ω = |k|`: `k1 = (3, 4, 0)` and `k2 = (0, 0, 2)`
BASIS = LatticeBasis(omegas=(5.0, 2.0), wavevectors=((3.0, 4.0, 0.0), (0.0, 0.0, 2.0)))


def key(
    t: Sequence[int] = (0, 0),
    x: Sequence[int] = (0, 0),
    y: Sequence[int] = (0, 0),
    z: Sequence[int] = (0, 0),
    parities: Sequence[Parity] = (C, C, C, C),
) -> HarmonicKey:
    """Build key with defaults of constant factors."""
    return HarmonicKey.build([t, x, y, z], parities)


def random_poly(rng: np.random.Generator, size: int = 4) -> TrigPoly:
    """Random polynomial on the two-pump basis."""
    terms = []
    for _ in range(size):
        t, x, y = (tuple(int(c) for c in rng.integers(-2, 3, size=2)) for _ in "txy")
        parities = [S if flip else C for flip in rng.integers(0, 2, size=4)]
        terms.append((float(rng.normal()), key(t, x, y, (0, 1), parities)))
    return TrigPoly(BASIS, terms)


class TestLatticeBasis:
    """Generators of the pump lattice."""

    def test_dispersion(self) -> None:
        """Reject generators with `ω² != |k|²`."""
        with pytest.raises(ValueError, match="dispersion"):
            LatticeBasis.single(1, 1.0, (2.0, 0.0, 0.0))

    def test_merge(self) -> None:
        """Combine bases registering different slots."""
        first = LatticeBasis.single(1, 5.0, (3.0, 4.0, 0.0))
        second = LatticeBasis.single(2, 2.0, (0.0, 0.0, 2.0))
        assert first.merge(second) == BASIS
        assert BASIS.merge(first) == BASIS

    def test_merge__conflict(self) -> None:
        """Refuse to register one slot with two different pumps."""
        first = LatticeBasis.single(1, 5.0, (3.0, 4.0, 0.0))
        other = LatticeBasis.single(1, 2.0, (0.0, 0.0, 2.0))
        with pytest.raises(ValueError, match="registered twice"):
            first.merge(other)

    def test_rates(self) -> None:
        """Numeric rates are integer combinations of generators."""
        assert BASIS.rates(key(t=(2, -1), x=(1, 0), z=(0, 3))) == (8.0, 3.0, 0.0, 6.0)


def test_canonicalize() -> None:
    """Make the first nonzero coefficient positive, flipping `sin` amplitudes."""
    term = canonicalize(2.0, key(t=(-1, 2), x=(-1, 0), parities=(S, C, C, C)))
    assert term is not None
    assert term.amplitude == -2.0
    assert term.key.t == (1, -2)
    assert term.key.x == (1, 0)


def test_canonicalize__vanishing() -> None:
    """Drop `sin` factors of a zero argument, including projected null generators."""
    assert canonicalize(1.0, key(parities=(S, C, C, C))) is None
    single = LatticeBasis.single(1, 1.0, (1.0, 0.0, 0.0))
    projected = key(t=(1, 0), y=(1, 0), parities=(S, C, S, C))
    assert canonicalize(1.0, projected, single) is None


def test_constructor__unregistered_slot() -> None:
    """Reject coefficients on a slot without pump."""
    single = LatticeBasis.single(1, 1.0, (1.0, 0.0, 0.0))
    with pytest.raises(ValueError, match="unregistered slot 2"):
        TrigPoly(single, [(1.0, key(t=(0, 1), parities=(S, C, C, C)))])


def test_square_of_sine() -> None:
    """Expand `sin²(ωt)` into `1/2 - cos(2ωt)/2`."""
    basis = LatticeBasis.single(1, 1.0, (1.0, 0.0, 0.0))
    sine = TrigPoly(basis, [(1.0, key(t=(1, 0), parities=(S, C, C, C)))])
    square = sine * sine
    assert square == TrigPoly(basis, [(0.5, key()), (-0.5, key(t=(2, 0)))])


def test_sum_merges_keys() -> None:
    """Merge equal canonical keys and cancel opposite amplitudes."""
    f = TrigPoly(BASIS, [(1.0, key(t=(1, 0), parities=(S, C, C, C)))])
    g = TrigPoly(BASIS, [(1.0, key(t=(-1, 0), parities=(S, C, C, C)))])
    assert not f + g
    assert len(f - g) == 1
    assert (f - g).amplitude(key(t=(1, 0), parities=(S, C, C, C))) == 2.0


def test_multiply__pointwise() -> None:
    """Products agree with the product of numeric values."""
    rng = np.random.default_rng(42)
    points = rng.uniform(-3, 3, size=(200, 4))
    for _ in range(5):
        f, g = random_poly(rng), random_poly(rng)
        expected = eval_at(f, points) * eval_at(g, points)
        product = eval_at(multiply(f, g), points)
        np.testing.assert_allclose(product, expected, atol=1e-12)


def test_ring_axioms() -> None:
    """Sums and products commute, associate and distribute pointwise."""
    rng = np.random.default_rng(3)
    points = rng.uniform(-3, 3, size=(100, 4))
    for _ in range(5):
        f, g, h = random_poly(rng, 3), random_poly(rng, 3), random_poly(rng, 3)
        pairs = [
            (f * g, g * f),
            (f + g, g + f),
            ((f * g) * h, f * (g * h)),
            ((f + g) + h, f + (g + h)),
            (f * (g + h), f * g + f * h),
        ]
        for left, right in pairs:
            np.testing.assert_allclose(
                eval_at(left, points), eval_at(right, points), atol=1e-10
            )


def test_canonicalize__idempotent() -> None:
    """Canonical terms are left unchanged."""
    rng = np.random.default_rng(5)
    for amplitude, canonical in random_poly(rng, 20):
        again = canonicalize(amplitude, canonical, BASIS)
        assert again is not None
        assert again.key == canonical
        assert again.amplitude == amplitude


def test_canonicalize__equal_generators() -> None:
    """Drop `sin` of a zero rate on equal generators, keep `cos` with its amplitude."""
    basis = LatticeBasis(
        omegas=(5.0, 5.0), wavevectors=((3.0, 4.0, 0.0), (0.0, 4.0, 3.0))
    )
    difference = key(t=(1, 0), y=(1, -1), parities=(S, C, S, C))
    assert canonicalize(2.0, difference, basis) is None
    kept = canonicalize(2.0, difference._replace(parities=(S, C, C, C)), basis)
    assert kept is not None
    assert kept.amplitude == 2.0
    assert kept.key.y == (1, -1)
    assert not differentiate(TrigPoly(basis, [kept]), "y")
    assert canonicalize(2.0, key(t=(1, -1), parities=(S, C, C, C)), basis) is None


def test_differentiate__pointwise() -> None:
    """Derivatives agree with central differences."""
    rng = np.random.default_rng(7)
    f = random_poly(rng)
    points = rng.uniform(-3, 3, size=(50, 4))
    step = 1e-6
    for i, coordinate in enumerate("txyz"):
        shift = np.zeros(4)
        shift[i] = step
        numeric = (eval_at(f, points + shift) - eval_at(f, points - shift)) / (2 * step)
        np.testing.assert_allclose(
            eval_at(differentiate(f, coordinate), points), numeric, atol=1e-6
        )


def test_differentiate__commute() -> None:
    """Mixed partial derivatives do not depend on the order."""
    rng = np.random.default_rng(11)
    for _ in range(5):
        f = random_poly(rng)
        for first, second in [("x", "t"), ("y", "z"), ("t", "z")]:
            assert differentiate(differentiate(f, first), second) == differentiate(
                differentiate(f, second), first
            )


def test_integrate() -> None:
    """Integration inverts differentiation along time."""
    f = TrigPoly(BASIS, [(3.0, key(t=(1, 1), x=(1, 0), parities=(S, S, C, C)))])
    assert differentiate(integrate(f, "t"), "t") == f


def test_integrate__static() -> None:
    """Refuse to integrate terms that do not depend on the coordinate."""
    f = TrigPoly(BASIS, [(1.0, key(x=(1, 0), parities=(C, S, C, C)))])
    with pytest.raises(ValueError, match="does not depend on `t`"):
        integrate(f, "t")


def test_eval_at__shapes() -> None:
    """Evaluate one point as a float and several points as an array."""
    f = TrigPoly(BASIS, [(2.0, key(t=(1, 0), parities=(C, C, C, C)))])
    assert eval_at(f, [0.0, 1.0, 2.0, 3.0]) == 2.0
    assert eval_at(f, np.zeros((3, 4))).shape == (3,)
    with pytest.raises(ValueError, match="shape"):
        eval_at(f, np.zeros((3, 3)))


def test_rational_snap() -> None:
    """Express amplitudes as small rationals of a reference scale."""
    f = TrigPoly(
        BASIS,
        [(1.5, key(t=(1, 0), parities=(S, C, C, C))), (-0.25, key(t=(3, 0)))],
    )
    snapped = rational_snap(f, 0.5)
    assert snapped == {
        key(t=(1, 0), parities=(S, C, C, C)): Fraction(3),
        key(t=(3, 0)): Fraction(-1, 2),
    }


def test_rational_snap__irrational() -> None:
    """Raise `SnapError` for amplitudes far from small rationals."""
    f = TrigPoly(BASIS, [(np.pi, key(t=(1, 0)))])
    with pytest.raises(SnapError):
        rational_snap(f, 1.0)


def test_combination_label() -> None:
    """Render integer combinations with positive terms first."""
    symbols = ("ω1", "ω2")
    assert combination_label((2, -1), symbols) == "2ω1-ω2"
    assert combination_label((-1, 2), symbols) == "2ω2-ω1"
    assert combination_label((1, 2), symbols) == "ω1+2ω2"
    assert combination_label((3, 0), symbols) == "3ω1"
    assert combination_label((0, 0), symbols) == "0"


def test_describe_key() -> None:
    """Render factors of a key, skipping constants."""
    assert describe_key(key(t=(2, -1), x=(1, 0), parities=(S, S, C, C))) == (
        "sin((2ω1-ω2) t)·sin(k1x x)"
    )
    assert describe_key(key()) == "1"
