"""
Exact algebra of trigonometric polynomials over an integer lattice of pump harmonics.

A term reads `A·h(ω t)·h(k_x x)·h(k_y y)·h(k_z z)` where each `h` is `sin` or `cos` and
 every argument is an integer combination of (at most two) pump generators. Keys hold
 the integers only, numeric rates live in `LatticeBasis`.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import numpy.typing as npt

from ehcavity.logging import get_logger

logger = get_logger(__file__)

DROP_TOLERANCE = 1e-12
SNAP_TOLERANCE = 1e-9
DISPERSION_RTOL = 1e-12
COORDINATES = ("t", "x", "y", "z")
SLOTS = (1, 2)

Coefficients = Tuple[int, int]
Vector = Tuple[float, float, float]
Scalar = Union[int, float]


class Parity(str, Enum):
    """Trigonometric factor of one coordinate."""

    SIN = "sin"
    COS = "cos"

    @property
    def toggled(self) -> "Parity":
        """Return the parity of the derivative (or antiderivative)."""
        return Parity.COS if self is Parity.SIN else Parity.SIN


class SnapError(ArithmeticError):
    """Amplitude ratio is not close to a small rational number."""


class HarmonicKey(NamedTuple):
    """Integer coefficients (per pump slot) and parities of `t, x, y, z` factors."""

    t: Coefficients
    x: Coefficients
    y: Coefficients
    z: Coefficients
    parities: Tuple[Parity, Parity, Parity, Parity]

    @property
    def coefficients(
        self,
    ) -> Tuple[Coefficients, Coefficients, Coefficients, Coefficients]:
        """Coefficients of `t, x, y, z` (in that order)."""
        return self.t, self.x, self.y, self.z

    @classmethod
    def build(
        cls,
        coefficients: Sequence[Sequence[int]],
        parities: Sequence[Union[Parity, str]],
    ) -> "HarmonicKey":
        """
        Build key from sequences of coefficients and parities.

        :param coefficients: Four pairs of integers, for `t, x, y, z`
        :param parities: Four parities (or their values `sin`/`cos`)
        :return: Harmonic key (not necessarily canonical)
        """
        if len(coefficients) != 4 or len(parities) != 4:
            raise ValueError(
                "Expected 4 coefficient pairs and 4 parities (for `t, x, y, z`), got"
                f" `{len(coefficients)}` and `{len(parities)}`."
            )
        t, x, y, z = (_as_coefficients(c) for c in coefficients)
        p_t, p_x, p_y, p_z = (Parity(p) for p in parities)
        return cls(t=t, x=x, y=y, z=z, parities=(p_t, p_x, p_y, p_z))

    @property
    def is_static(self) -> bool:
        """Whether the term does not depend on time."""
        return self.t == (0, 0)


class TrigTerm(NamedTuple):
    """Amplitude and canonical key."""

    amplitude: float
    key: HarmonicKey


def _as_coefficients(values: Sequence[int]) -> Coefficients:
    """Convert sequence into a pair of integer coefficients."""
    if len(values) != 2:
        raise ValueError(f"Expected 2 coefficients (one per slot), got `{values}`.")
    first, second = values
    return int(first), int(second)


def _coordinate_index(coordinate: str) -> int:
    """Index of coordinate in `t, x, y, z`."""
    if coordinate not in COORDINATES:
        raise ValueError(
            f"Expected `coordinate` to be one of `{COORDINATES}`, got `{coordinate}`."
        )
    return COORDINATES.index(coordinate)


@dataclass(frozen=True)
class LatticeBasis:
    """
    Numeric generators of the integer lattice: pump frequencies and wavevectors.

    Slot `m` (1 or 2) is registered when its frequency is positive, an unregistered slot
     has zero frequency and wavevector.
    """

    omegas: Tuple[float, float] = (0.0, 0.0)
    wavevectors: Tuple[Vector, Vector] = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))

    def __post_init__(self) -> None:
        """Validate dispersion relation `ω² = |k|²` of each slot."""
        for slot, omega, wavevector in zip(SLOTS, self.omegas, self.wavevectors):
            if not all(math.isfinite(v) for v in (omega, *wavevector)):
                raise ValueError(f"Expected finite generators for slot `{slot}`.")
            if omega < 0:
                raise ValueError(
                    f"Expected `omega` >= 0 for slot {slot}, got `{omega}`."
                )
            k2 = sum(k**2 for k in wavevector)
            if abs(omega**2 - k2) > DISPERSION_RTOL * max(omega**2, k2):
                raise ValueError(
                    f"Slot {slot} violates the dispersion relation: `omega**2` is"
                    f" `{omega**2}` but `|k|**2` is `{k2}`."
                )

    @classmethod
    def single(
        cls, slot: int, omega: float, wavevector: Sequence[float]
    ) -> "LatticeBasis":
        """Basis with one registered slot."""
        if slot not in SLOTS:
            raise ValueError(f"Expected `slot` to be one of `{SLOTS}`, got `{slot}`.")
        if omega <= 0:
            raise ValueError(f"Expected a positive pump frequency, got `{omega}`.")
        kx, ky, kz = (float(k) for k in wavevector)
        omegas = [0.0, 0.0]
        wavevectors = [(0.0, 0.0, 0.0), (0.0, 0.0, 0.0)]
        omegas[slot - 1] = float(omega)
        wavevectors[slot - 1] = (kx, ky, kz)
        return cls(
            omegas=(omegas[0], omegas[1]), wavevectors=(wavevectors[0], wavevectors[1])
        )

    def is_registered(self, slot: int) -> bool:
        """Whether a pump occupies `slot`."""
        return self.omegas[slot - 1] > 0

    def merge(self, other: "LatticeBasis") -> "LatticeBasis":
        """
        Combine two bases slot by slot.

        A slot is taken from whichever basis registers it, registering one slot with two
         different pumps is an error.
        """
        if self == other:
            return self
        omegas, wavevectors = [], []
        for i, slot in enumerate(SLOTS):
            mine = (self.omegas[i], self.wavevectors[i])
            theirs = (other.omegas[i], other.wavevectors[i])
            both = self.is_registered(slot) and other.is_registered(slot)
            if both and mine != theirs:
                raise ValueError(
                    f"Slot {slot} is registered twice with different pumps"
                    f" (`{mine}` and `{theirs}`)."
                )
            omega, wavevector = mine if self.is_registered(slot) else theirs
            omegas.append(omega)
            wavevectors.append(wavevector)
        return LatticeBasis(
            omegas=(omegas[0], omegas[1]), wavevectors=(wavevectors[0], wavevectors[1])
        )

    def generators(self, coordinate: str) -> Tuple[float, float]:
        """Numeric generators of both slots along `coordinate`."""
        i = _coordinate_index(coordinate)
        if i == 0:
            return self.omegas
        return self.wavevectors[0][i - 1], self.wavevectors[1][i - 1]

    @cached_property
    def null_mask(self) -> Tuple[Tuple[bool, bool], ...]:
        """Per coordinate and slot, whether the generator is exactly zero."""
        return tuple(
            (g1 == 0, g2 == 0)
            for g1, g2 in (self.generators(c) for c in COORDINATES)
        )

    def rate(self, key: HarmonicKey, coordinate: str) -> float:
        """Numeric rate `c₁g₁ + c₂g₂` of `key` along `coordinate`."""
        c1, c2 = key.coefficients[_coordinate_index(coordinate)]
        g1, g2 = self.generators(coordinate)
        return c1 * g1 + c2 * g2

    def rates(self, key: HarmonicKey) -> Tuple[float, float, float, float]:
        """Numeric rates of `key` along `t, x, y, z`."""
        t, x, y, z = (self.rate(key, c) for c in COORDINATES)
        return t, x, y, z

    def scale(self, coordinate: str) -> float:
        """Largest generator magnitude along `coordinate`."""
        return max(abs(g) for g in self.generators(coordinate))


def _is_null_rate(basis: LatticeBasis, index: int, c1: int, c2: int) -> bool:
    """Whether `c₁g₁ + c₂g₂` vanishes numerically along coordinate `index`."""
    g1, g2 = basis.generators(COORDINATES[index])
    return abs(c1 * g1 + c2 * g2) <= DROP_TOLERANCE * max(abs(g1), abs(g2))


def canonicalize(
    amplitude: float,
    key: HarmonicKey,
    basis: Optional[LatticeBasis] = None,
    threshold: float = 0.0,
) -> Optional[TrigTerm]:
    """
    Normalize the sign of every coordinate of a term.

    In each coordinate the first nonzero coefficient is made positive, with the sign
     absorbed into the amplitude for `sin` factors. Coefficients on generators that are
     exactly zero in `basis` are projected out. A `sin` factor whose numeric rate
     vanishes (such as `sin((k1y - k2y) y)` when both are equal) drops the term, while a
     `cos` factor of zero rate keeps its coefficients and leaves the amplitude as is.
    :param amplitude: Term amplitude
    :param key: Term key (any signs)
    :param basis: Lattice basis, used to project out null generators and null rates
    :param threshold: Terms with `|amplitude| <= threshold` are dropped
    :return: Canonical term, or `None` when the term vanishes identically
    """
    coefficients: List[Coefficients] = []
    for i, ((c1, c2), parity) in enumerate(zip(key.coefficients, key.parities)):
        if basis is not None:
            null1, null2 = basis.null_mask[i]
            c1, c2 = (0 if null1 else c1), (0 if null2 else c2)
            if parity is Parity.SIN and _is_null_rate(basis, i, c1, c2):
                return None
        first = c1 if c1 != 0 else c2
        if first < 0:
            c1, c2 = -c1, -c2
            if parity is Parity.SIN:
                amplitude = -amplitude
        if c1 == c2 == 0 and parity is Parity.SIN:
            return None
        coefficients.append((c1, c2))
    if abs(amplitude) <= threshold:
        return None
    t, x, y, z = coefficients
    return TrigTerm(amplitude, HarmonicKey(t=t, x=x, y=y, z=z, parities=key.parities))


def _prune(terms: Dict[HarmonicKey, float], scale: float) -> Dict[HarmonicKey, float]:
    """Drop amplitudes at or below `DROP_TOLERANCE` relative to `scale`."""
    largest = max((abs(v) for v in terms.values()), default=0.0)
    limit = DROP_TOLERANCE * max(scale, largest)
    return {k: v for k, v in terms.items() if abs(v) > limit}


class TrigPoly:
    """Sum of canonical trigonometric terms with unique keys."""

    __slots__ = ("_basis", "_terms")

    def __init__(
        self,
        basis: LatticeBasis,
        terms: Iterable[Tuple[float, HarmonicKey]] = (),
    ) -> None:
        """
        Canonicalize and merge terms.

        :param basis: Lattice basis of the pumps
        :param terms: Pairs of amplitude and (possibly uncanonical) key
        """
        merged: Dict[HarmonicKey, float] = {}
        scale = 0.0
        for amplitude, key in terms:
            for coordinate, coefficients in zip(COORDINATES, key.coefficients):
                for slot, c in zip(SLOTS, coefficients):
                    if c != 0 and not basis.is_registered(slot):
                        raise ValueError(
                            f"Coefficient `{c}` of `{coordinate}` refers to"
                            f" unregistered slot {slot}."
                        )
            scale = max(scale, abs(amplitude))
            term = canonicalize(amplitude, key, basis=basis)
            if term is not None:
                merged[term.key] = merged.get(term.key, 0.0) + term.amplitude
        self._basis = basis
        self._terms = _prune(merged, scale)

    @classmethod
    def _wrap(cls, basis: LatticeBasis, terms: Dict[HarmonicKey, float]) -> "TrigPoly":
        """Build polynomial from already canonical and pruned terms."""
        poly = cls.__new__(cls)
        poly._basis = basis
        poly._terms = terms
        return poly

    @classmethod
    def zero(cls, basis: LatticeBasis) -> "TrigPoly":
        """Empty polynomial."""
        return cls._wrap(basis, {})

    @classmethod
    def constant(cls, basis: LatticeBasis, value: float) -> "TrigPoly":
        """Polynomial of a single constant term."""
        key = HarmonicKey.build([(0, 0)] * 4, [Parity.COS] * 4)
        return cls(basis, [(value, key)])

    @property
    def basis(self) -> LatticeBasis:
        """Lattice basis of the polynomial."""
        return self._basis

    @property
    def terms(self) -> Tuple[TrigTerm, ...]:
        """Terms sorted by key."""
        return tuple(TrigTerm(self._terms[k], k) for k in sorted(self._terms))

    def amplitude(self, key: HarmonicKey) -> float:
        """Amplitude of canonical `key` (zero when absent)."""
        return self._terms.get(key, 0.0)

    def max_amplitude(self) -> float:
        """Largest amplitude magnitude (zero for the empty polynomial)."""
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def scaled(self, factor: float) -> "TrigPoly":
        """Multiply every amplitude by a number."""
        if factor == 0:
            return TrigPoly.zero(self._basis)
        terms = {k: v * factor for k, v in self._terms.items()}
        return TrigPoly._wrap(self._basis, terms)

    def _coerce(self, other: Union["TrigPoly", Scalar]) -> Optional["TrigPoly"]:
        if isinstance(other, TrigPoly):
            return other
        if isinstance(other, (int, float)):
            return TrigPoly.constant(self._basis, float(other))
        return None

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[TrigTerm]:
        return iter(self.terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: Union["TrigPoly", Scalar]) -> "TrigPoly":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        basis = _common_basis(self._basis, poly._basis)
        merged = dict(self._terms)
        for k, v in poly._terms.items():
            merged[k] = merged.get(k, 0.0) + v
        return TrigPoly._wrap(
            basis, _prune(merged, max(self.max_amplitude(), poly.max_amplitude()))
        )

    def __radd__(self, other: Union["TrigPoly", Scalar]) -> "TrigPoly":
        if isinstance(other, (int, float)) and other == 0:
            return self
        return self.__add__(other)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._wrap(self._basis, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: Union["TrigPoly", Scalar]) -> "TrigPoly":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        return self + (-poly)

    def __mul__(self, other: Union["TrigPoly", Scalar]) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return multiply(self, other)
        if isinstance(other, (int, float)):
            return self.scaled(float(other))
        return NotImplemented

    def __rmul__(self, other: Scalar) -> "TrigPoly":
        return self.__mul__(other)

    def __eq__(self, other: object) -> bool:
        """Same keys, with amplitudes equal to `1e-12` relative to the larger one."""
        if not isinstance(other, TrigPoly):
            return NotImplemented
        if self._terms.keys() != other._terms.keys():
            return False
        return all(
            abs(v - w) <= DROP_TOLERANCE * max(abs(v), abs(w))
            for v, w in ((v, other._terms[k]) for k, v in self._terms.items())
        )

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        inner = " + ".join(
            f"{t.amplitude:.6g}·{describe_key(t.key)}" for t in self.terms
        )
        return f"TrigPoly({inner or '0'})"


def _common_basis(first: LatticeBasis, second: LatticeBasis) -> LatticeBasis:
    return first if first is second else first.merge(second)


# Product-to-sum: for parities (a, b), the (parity, sign) of the difference `u - v`
#  and of the sum `u + v` arguments, each with half amplitude.
_PRODUCT_RULES: Dict[Tuple[Parity, Parity], Tuple[Tuple[Parity, int], ...]] = {
    (Parity.SIN, Parity.SIN): ((Parity.COS, 1), (Parity.COS, -1)),
    (Parity.SIN, Parity.COS): ((Parity.SIN, 1), (Parity.SIN, 1)),
    (Parity.COS, Parity.SIN): ((Parity.SIN, -1), (Parity.SIN, 1)),
    (Parity.COS, Parity.COS): ((Parity.COS, 1), (Parity.COS, 1)),
}


def multiply(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """
    Exact product through product-to-sum identities.

    Each pair of terms expands into 16 terms (difference or sum argument in each of the
     four coordinates) of amplitude `A_a·A_b/16`.
    :param a: First factor
    :param b: Second factor
    :return: Canonical product
    """
    basis = _common_basis(a.basis, b.basis)
    merged: Dict[HarmonicKey, float] = {}
    for amp_a, key_a in a.terms:
        for amp_b, key_b in b.terms:
            options = []
            for ca, cb, pa, pb in zip(
                key_a.coefficients, key_b.coefficients, key_a.parities, key_b.parities
            ):
                difference, total = _PRODUCT_RULES[pa, pb]
                (diff_parity, diff_sign), (sum_parity, sum_sign) = difference, total
                options.append(
                    (
                        ((ca[0] - cb[0], ca[1] - cb[1]), diff_parity, diff_sign),
                        ((ca[0] + cb[0], ca[1] + cb[1]), sum_parity, sum_sign),
                    )
                )
            for t, x, y, z in product(*options):
                sign = t[2] * x[2] * y[2] * z[2]
                key = HarmonicKey(
                    t=t[0], x=x[0], y=y[0], z=z[0], parities=(t[1], x[1], y[1], z[1])
                )
                term = canonicalize(sign * amp_a * amp_b / 16, key, basis=basis)
                if term is not None:
                    merged[term.key] = merged.get(term.key, 0.0) + term.amplitude
    return TrigPoly._wrap(basis, _prune(merged, a.max_amplitude() * b.max_amplitude()))


def differentiate(f: TrigPoly, coordinate: str) -> TrigPoly:
    """
    Partial derivative along `coordinate` (one of `t, x, y, z`).

    `sin` maps to `cos` times the rate, `cos` maps to `sin` times minus the rate.
    """
    i = _coordinate_index(coordinate)
    terms: Dict[HarmonicKey, float] = {}
    for amplitude, key in f.terms:
        rate = f.basis.rate(key, coordinate)
        if abs(rate) <= DROP_TOLERANCE * f.basis.scale(coordinate):
            continue
        parities = list(key.parities)
        sign = 1 if parities[i] is Parity.SIN else -1
        parities[i] = parities[i].toggled
        terms[key._replace(parities=tuple(parities))] = sign * amplitude * rate
    return TrigPoly._wrap(
        f.basis, _prune(terms, f.max_amplitude() * f.basis.scale(coordinate))
    )


def integrate(f: TrigPoly, coordinate: str) -> TrigPoly:
    """
    Antiderivative along `coordinate`, without integration constant.

    Terms that do not depend on `coordinate` cannot be integrated within the algebra.
    """
    i = _coordinate_index(coordinate)
    limit = DROP_TOLERANCE * f.basis.scale(coordinate)
    terms: Dict[HarmonicKey, float] = {}
    for amplitude, key in f.terms:
        rate = f.basis.rate(key, coordinate)
        if abs(rate) <= limit:
            raise ValueError(
                f"Cannot integrate term `{describe_key(key)}` along `{coordinate}`, it"
                f" does not depend on `{coordinate}`."
            )
        parities = list(key.parities)
        sign = -1 if parities[i] is Parity.SIN else 1
        parities[i] = parities[i].toggled
        terms[key._replace(parities=tuple(parities))] = sign * amplitude / rate
    return TrigPoly._wrap(f.basis, terms)


def eval_at(
    f: TrigPoly, point: npt.ArrayLike
) -> Union[float, npt.NDArray[np.float64]]:
    """
    Evaluate polynomial numerically.

    :param f: Polynomial
    :param point: One point `(t, x, y, z)` or an array of points of shape `(N, 4)`
    :return: Value (for a single point) or array of `N` values
    """
    points = np.asarray(point, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.shape[-1] != 4:
        raise ValueError(
            f"Expected points of shape `(4,)` or `(N, 4)`, got {points.shape}."
        )
    if not f:
        values = np.zeros(points.shape[0])
        return float(values[0]) if single else values

    terms = f.terms
    amplitudes = np.array([t.amplitude for t in terms])
    rates = np.array([f.basis.rates(t.key) for t in terms])  # (T, 4)
    is_sin = np.array([[p is Parity.SIN for p in t.key.parities] for t in terms])
    phases = points[:, None, :] * rates[None, :, :]  # (N, T, 4)
    factors = np.where(is_sin[None, :, :], np.sin(phases), np.cos(phases))
    values = factors.prod(axis=-1) @ amplitudes
    return float(values[0]) if single else values


def rational_snap(
    f: TrigPoly,
    reference: float,
    max_denominator: int = 16,
    tolerance: float = SNAP_TOLERANCE,
) -> Dict[HarmonicKey, Fraction]:
    """
    Express amplitudes as small rational multiples of a reference scale.

    :param f: Polynomial
    :param reference: Scale that amplitudes are divided by (such as `8κF₀³ω²`)
    :param max_denominator: Largest accepted denominator
    :param tolerance: Accepted distance between ratio and rational number
    :return: Rational coefficient per key
    """
    if reference == 0 or not math.isfinite(reference):
        raise ValueError(f"Expected a finite nonzero `reference`, got `{reference}`.")
    snapped = {}
    for amplitude, key in f.terms:
        ratio = amplitude / reference
        fraction = Fraction(ratio).limit_denominator(max_denominator)
        if abs(ratio - float(fraction)) > tolerance * max(1.0, abs(ratio)):
            raise SnapError(
                f"Ratio `{ratio}` of term `{describe_key(key)}` is not within"
                f" `{tolerance}` of a rational with denominator <= {max_denominator}."
            )
        snapped[key] = fraction
    logger.debug(f"Snapped {len(snapped)} terms against reference {reference}")
    return snapped


def combination_label(coefficients: Sequence[int], symbols: Sequence[str]) -> str:
    """
    Render integer combination of symbols, such as `2ω1-ω2`.

    Positive terms come first, so that `(-1, 2)` reads `2ω2-ω1`.
    :param coefficients: Integer coefficients
    :param symbols: Symbol of each coefficient
    :return: Label (`0` when all coefficients vanish)
    """
    parts: List[str] = []
    pairs = sorted(zip(coefficients, symbols), key=lambda pair: pair[0] < 0)
    for c, symbol in pairs:
        if c == 0:
            continue
        magnitude = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else ("+" if parts else "")
        parts.append(f"{sign}{magnitude}{symbol}")
    return "".join(parts) or "0"


def describe_key(key: HarmonicKey) -> str:
    """Render key as `sin(ω1 t)·sin(k1x x)`, omitting constant factors."""
    symbols = (
        ("ω1", "ω2"),
        ("k1x", "k2x"),
        ("k1y", "k2y"),
        ("k1z", "k2z"),
    )
    factors = []
    for coordinate, coefficients, parity, names in zip(
        COORDINATES, key.coefficients, key.parities, symbols
    ):
        if coefficients == (0, 0):
            continue
        label = combination_label(coefficients, names)
        if "+" in label or "-" in label:
            label = f"({label})"
        factors.append(f"{parity.value}({label} {coordinate})")
    return "·".join(factors) or "1"
