"""
Resonance criterion for source terms, and the resonant-geometry study.

A source term drives a signal mode secularly when its frequency and wavevector satisfy
 the cavity dispersion relation `ω = |k|` for valid mode indices, its amplitude does not
 vanish and its sin/cos pattern matches the boundary conditions of the field component.
"""
import math
from collections import defaultdict
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import bisect

from ehcavity.cavity import BOUNDARY_PARITIES, build_pumps, eigenfrequency
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec, is_cavity_mode
from ehcavity.data_models.report import (
    VERDICT_PRECEDENCE,
    GeometryConstraint,
    ReportCell,
    ReportColumn,
    ResonanceReport,
    SourceTermRecord,
    TriangleRecord,
    Verdict,
)
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.fields import FieldPair
from ehcavity.logging import get_logger
from ehcavity.nonlinear import wave_rhs
from ehcavity.trigpoly import (
    COORDINATES,
    DROP_TOLERANCE,
    Coefficients,
    HarmonicKey,
    LatticeBasis,
    Parity,
    combination_label,
)

logger = get_logger(__file__)

DISPERSION_TOLERANCE = 1e-9
INDEX_TOLERANCE = 1e-9
SIGNATURE_DIGITS = 9

Indices = Tuple[int, int, int]
Signature = Tuple[Tuple[float, ...], Tuple[Parity, ...]]
Spatial = Tuple[Coefficients, Coefficients, Coefficients]

_FREQUENCY_SYMBOLS = ("ω1", "ω2")
_AXIS_SYMBOLS = {
    1: (("n", "n'"), ("p", "p'"), ("q", "q'")),
    2: (("n1", "n2"), ("p1", "p2"), ("q1", "q2")),
}
_LINE_SYMBOLS = ("n", "p")


def _is_one_dimensional(basis: LatticeBasis, pumps: Sequence[ModeSpec]) -> bool:
    if pumps:
        return all(m.is_1d for m in pumps)
    return all(k[1] == k[2] == 0 for k in basis.wavevectors)


def _signature(
    key: HarmonicKey, basis: LatticeBasis, unit: float
) -> Tuple[Signature, int, bool]:
    """
    Numeric signature of a term: rounded rate magnitudes and parities.

    :return: Signature, sign picked up by normalizing rates to be nonnegative, and
     whether a sine factor has a zero rate (the term vanishes identically)
    """
    rates, sign, null = [], 1, False
    for coordinate, parity in zip(COORDINATES, key.parities):
        rate = basis.rate(key, coordinate)
        if abs(rate) <= DROP_TOLERANCE * basis.scale(coordinate):
            rate = 0.0
            null = null or parity is Parity.SIN
        if rate < 0 and parity is Parity.SIN:
            sign = -sign
        rates.append(round(abs(rate) / unit, SIGNATURE_DIGITS))
    return (tuple(rates), key.parities), sign, null


def _oriented(coefficients: Coefficients, rate: float) -> Coefficients:
    """Flip coefficients so that their numeric rate is nonnegative."""
    c1, c2 = coefficients
    return (-c1, -c2) if rate < 0 else (c1, c2)


def frequency_label(key: HarmonicKey, basis: LatticeBasis) -> str:
    """Time harmonic of `key` as a combination of pump frequencies, such as `2ω1-ω2`."""
    return combination_label(_oriented(key.t, basis.rate(key, "t")), _FREQUENCY_SYMBOLS)


def wavenumber_label(key: HarmonicKey, basis: LatticeBasis, one_d: bool) -> str:
    """
    Spatial harmonic of `key` in terms of pump indices.

    1D runs read like `2p-n`, 3D runs like `(n1, 2p2+p1, q1)` (or `(3n, p, q)` for a
     single pump).
    """
    if one_d:
        return combination_label(_oriented(key.x, basis.rate(key, "x")), _LINE_SYMBOLS)
    n_pumps = sum(basis.is_registered(slot) for slot in (1, 2))
    symbols = _AXIS_SYMBOLS[2 if n_pumps == 2 else 1]
    labels = [
        combination_label(_oriented(c, basis.rate(key, axis)), names)
        for c, axis, names in zip((key.x, key.y, key.z), ("x", "y", "z"), symbols)
    ]
    return "(" + ", ".join(labels) + ")"


def mode_indices(
    wavevector: Sequence[float], geometry: CavityGeometry, one_d: bool
) -> Optional[Indices]:
    """
    Integer indices of a wavevector, `k_i L_i / π`, if they index a cavity mode.

    :param wavevector: Wavevector magnitudes per axis
    :param geometry: Cavity geometry
    :param one_d: Whether only the x axis is bounded
    :return: Indices, or `None` when not integer or not a valid mode
    """
    indices = []
    for k, length in zip(wavevector, geometry.lengths):
        value = abs(k) * length / math.pi
        index = round(value)
        if abs(value - index) > INDEX_TOLERANCE * max(1.0, value):
            return None
        indices.append(int(index))
    n, p, q = indices
    if one_d:
        return (n, 0, 0) if n >= 1 and p == q == 0 else None
    return (n, p, q) if is_cavity_mode(n, p, q) else None


def _parity_matches(
    key: HarmonicKey, components: Sequence[str], one_d: bool
) -> bool:
    """Whether spatial parities agree with the boundary pattern on bounded axes."""
    bounded = 1 if one_d else 3
    spatial = key.parities[1:]
    return all(
        spatial[:bounded] == BOUNDARY_PARITIES[name][:bounded] for name in components
    )


def _is_self_resonance(
    indices: Optional[Indices],
    omega: float,
    pumps: Sequence[ModeSpec],
    geometry: CavityGeometry,
    tolerance: float,
) -> bool:
    for m in pumps:
        pump_omega = eigenfrequency(geometry, *m.indices)
        if indices == m.indices and abs(omega - pump_omega) <= tolerance * pump_omega:
            return True
    return False


def classify(
    sources: FieldPair,
    basis: LatticeBasis,
    geometry: CavityGeometry,
    *,
    pumps: Sequence[ModeSpec] = (),
    tolerance: float = DISPERSION_TOLERANCE,
) -> ResonanceReport:
    """
    Classify every source term against the resonance criterion.

    Each canonical key gives one record. Keys whose functions coincide numerically
     (equal rate magnitudes and parities) share their amplitudes when deciding whether
     a component vanishes, so that cancellations between different keys are seen.
    :param sources: Sources `(S_E, S_B)`
    :param basis: Lattice basis of the pumps
    :param geometry: Cavity geometry
    :param pumps: Pump modes (used for labels, boundary axes and self-resonances)
    :param tolerance: Relative tolerance of the dispersion match
    :return: Report of records and table columns
    """
    one_d = _is_one_dimensional(basis, pumps)
    unit = max(basis.scale(c) for c in COORDINATES) or 1.0
    components = sources.components()
    largest = max((p.max_amplitude() for p in components.values()), default=0.0)
    limit = DROP_TOLERANCE * largest

    merged: Dict[Signature, Dict[str, float]] = defaultdict(dict)
    terms: Dict[HarmonicKey, Dict[str, float]] = defaultdict(dict)
    signatures: Dict[HarmonicKey, Signature] = {}
    for name, poly in components.items():
        for amplitude, key in poly.terms:
            signature, sign, null = _signature(key, basis, unit)
            group = merged[signature]
            group[name] = group.get(name, 0.0) + (0.0 if null else sign * amplitude)
            terms[key][name] = 0.0 if null else amplitude
            signatures[key] = signature

    records = []
    for key, amplitudes in terms.items():
        group = merged[signatures[key]]
        rates = basis.rates(key)
        omega, wavevector = abs(rates[0]), tuple(abs(r) for r in rates[1:])
        indices = mode_indices(wavevector, geometry, one_d)
        carriers = [n for n in amplitudes if abs(group[n]) > limit]
        k2 = sum(k**2 for k in wavevector)

        if not carriers:
            verdict = Verdict.VANISHING_AMPLITUDE
        elif (
            key.is_static
            or omega <= DROP_TOLERANCE * unit
            or abs(omega**2 - k2) > tolerance * omega**2
            or indices is None
        ):
            verdict = Verdict.NON_RESONANT
        elif not _parity_matches(key, carriers, one_d):
            verdict = Verdict.PARITY_MISMATCH
        else:
            verdict = Verdict.RESONANT
        records.append(
            SourceTermRecord(
                key=key,
                omega=omega,
                wavevector=wavevector,
                indices=indices,
                amplitudes=amplitudes,
                net_amplitude=max(amplitudes.values(), key=abs),
                verdict=verdict,
                self_resonance=verdict is Verdict.RESONANT
                and _is_self_resonance(indices, omega, pumps, geometry, tolerance),
                frequency_label=frequency_label(key, basis),
                wavenumber_label=wavenumber_label(key, basis, one_d),
            )
        )
    records.sort(key=lambda r: (r.key.x, r.key.y, r.key.z, r.key.t, r.key.parities))
    report = ResonanceReport(
        geometry=geometry,
        pumps=list(pumps),
        tolerance=tolerance,
        records=records,
        columns=_columns(records),
    )
    logger.debug(
        f"Classified {len(records)} source terms:"
        f" { {v.value: n for v, n in report.verdict_counts.items()} }"
    )
    return report


def _columns(records: Sequence[SourceTermRecord]) -> List[ReportColumn]:
    """Group records by spatial coefficients (columns) and time coefficients (cells)."""
    by_space: Dict[Spatial, List[SourceTermRecord]] = defaultdict(list)
    for record in records:
        by_space[record.key.x, record.key.y, record.key.z].append(record)

    columns = []
    for spatial, members in by_space.items():
        by_time: Dict[Coefficients, List[SourceTermRecord]] = defaultdict(list)
        for record in members:
            by_time[record.key.t].append(record)
        cells = []
        for time, cell_records in by_time.items():
            verdicts = {r.verdict for r in cell_records}
            verdict = next(v for v in VERDICT_PRECEDENCE if v in verdicts)
            lead = cell_records[0]
            cells.append(
                ReportCell(
                    frequency_label=lead.frequency_label,
                    time=time,
                    omega=lead.omega,
                    verdict=verdict,
                    net_amplitude=max(
                        (r.net_amplitude for r in cell_records), key=abs
                    ),
                    self_resonance=any(r.self_resonance for r in cell_records),
                )
            )
        cells.sort(key=lambda c: c.time)
        first = members[0]
        columns.append(
            ReportColumn(
                wavenumber_label=first.wavenumber_label,
                spatial=spatial,
                wavevector=first.wavevector,
                indices=first.indices,
                cells=cells,
            )
        )
    columns.sort(key=lambda c: c.spatial)
    return columns


def triangle_exclusion(
    k1: Sequence[float], k2: Sequence[float]
) -> TriangleRecord:
    """
    Compare `|2k₂| + |k₁|` with `|2k₂ + k₁|`.

    The sum frequency `2ω₂ + ω₁` equals the left-hand side, so a strict inequality
     rules out its dispersion match. Equality requires parallel wavevectors.
    :param k1: First pump wavevector
    :param k2: Second pump wavevector
    :return: Inequality record
    """
    v1, v2 = np.asarray(k1, dtype=float), np.asarray(k2, dtype=float)
    n1, n2 = float(np.linalg.norm(v1)), float(np.linalg.norm(v2))
    if n1 == 0 or n2 == 0:
        raise ValueError("Expected nonzero wavevectors.")
    lhs = 2 * n2 + n1
    rhs = float(np.linalg.norm(2 * v2 + v1))
    parallel = float(np.linalg.norm(np.cross(v1, v2))) <= DROP_TOLERANCE * n1 * n2
    return TriangleRecord(
        k1=tuple(v1.tolist()),
        k2=tuple(v2.tolist()),
        lhs=lhs,
        rhs=rhs,
        parallel=parallel,
        strict=lhs - rhs > DROP_TOLERANCE * lhs,
    )


def candidate_signals(pump1: ModeSpec, pump2: ModeSpec) -> List[Indices]:
    """
    Signal modes that a `2ω₁ ± ω₂` source term can carry.

    Along each axis the signal index is `i₂`, `2i₁ + i₂` or `|2i₁ - i₂|`.
    """
    per_axis = [
        sorted({i2, 2 * i1 + i2, abs(2 * i1 - i2)})
        for i1, i2 in zip(pump1.indices, pump2.indices)
    ]
    return [
        (n, p, q) for n, p, q in product(*per_axis) if is_cavity_mode(n, p, q)
    ]


def _family_frequency(
    indices: Indices, r: npt.NDArray[np.float64], ratio: float
) -> npt.NDArray[np.float64]:
    """Eigenfrequency over the family `(L_x, L_y, L_z) = (1/r, ρ/r, 1)`."""
    n, p, q = indices
    return math.pi * np.sqrt((n * r) ** 2 + (p * r / ratio) ** 2 + q**2)


def solve_geometry(
    pump1: ModeSpec,
    pump2: ModeSpec,
    signal_indices: Indices,
    sign: int,
    constraint: GeometryConstraint,
) -> List[CavityGeometry]:
    """
    Find geometries where `2ω₁ ± ω₂` equals the signal eigenfrequency.

    The free ratio `r = L_z/L_x` is scanned uniformly, and every sign change is refined
     by bisection.
    :param pump1: Pump mode whose frequency is doubled
    :param pump2: Second pump mode
    :param signal_indices: Signal mode indices `(n, p, q)`
    :param sign: `-1` for `2ω₁ - ω₂`, `+1` for `2ω₁ + ω₂`
    :param constraint: Geometry family, scan interval and root tolerance
    :return: Resonant geometries (possibly none)
    """
    if sign not in (1, -1):
        raise ValueError(f"Expected `sign` to be 1 or -1, got `{sign}`.")
    signal = tuple(int(i) for i in signal_indices)
    if signal not in candidate_signals(pump1, pump2):
        logger.warning(
            f"Signal {signal} cannot be carried by a `2ω1±ω2` source of"
            f" {pump1.label} and {pump2.label}. No geometry to solve for."
        )
        return []

    def mismatch(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return (
            2 * _family_frequency(pump1.indices, r, constraint.ratio)
            + sign * _family_frequency(pump2.indices, r, constraint.ratio)
            - _family_frequency(signal, r, constraint.ratio)  # type: ignore
        )

    low, high = constraint.interval
    grid = np.linspace(low, high, constraint.subdivisions + 1)
    values = mismatch(grid)
    scale = float(
        np.max(
            2 * _family_frequency(pump1.indices, grid, constraint.ratio)
            + _family_frequency(pump2.indices, grid, constraint.ratio)
        )
    )
    if np.max(np.abs(values)) <= DROP_TOLERANCE * scale:
        logger.warning(
            "Frequency mismatch vanishes identically over the scan (parallel"
            " wavevectors). No isolated resonant geometry."
        )
        return []

    def scalar_mismatch(r: float) -> float:
        return float(mismatch(np.array([r]))[0])

    roots: List[float] = []
    for i in range(len(grid) - 1):
        a, b, fa, fb = grid[i], grid[i + 1], values[i], values[i + 1]
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            root = bisect(scalar_mismatch, a, b, xtol=constraint.tolerance)
            roots.append(float(root))
    if values[-1] == 0:
        roots.append(float(grid[-1]))

    unique: List[float] = []
    for root in sorted(roots):
        if not unique or root - unique[-1] > 10 * constraint.tolerance:
            unique.append(root)
    logger.debug(f"Found {len(unique)} root(s) for signal {signal}: {unique}")
    return [constraint.geometry(r) for r in unique]


def dimension_condition(geometry: CavityGeometry) -> float:
    """
    Residual of the closed-form resonance condition of TE011, TM110 and signal 130.

    `(L_z/L_x)²(L_z/L_y)² + (L_z/L_x)² + 3(L_z/L_y)² - 1`, zero at resonant geometries.
    """
    a = (geometry.lz / geometry.lx) ** 2
    b = (geometry.lz / geometry.ly) ** 2
    return a * b + a + 3 * b - 1


def analyze(
    geometry: CavityGeometry,
    pumps: Sequence[ModeSpec],
    constants: PhysicalConstants,
    tolerance: float = DISPERSION_TOLERANCE,
) -> ResonanceReport:
    """
    Build the pumps, compute their cubic sources and classify them.

    :param geometry: Cavity geometry
    :param pumps: One or two pump modes
    :param constants: Coupling constants
    :param tolerance: Relative tolerance of the dispersion match
    :return: Resonance report
    """
    pump_field = build_pumps(geometry, pumps)
    sources = wave_rhs(pump_field, constants)
    basis = pump_field.basis
    return classify(sources, basis, geometry, pumps=pumps, tolerance=tolerance)
