"""
Acceptance checks of the analysis, run by `ehcavity selftest`.

Every check builds its own inputs (randomized ones from a seeded generator) and returns
 whether the property holds together with a one-line detail.
"""
import math
import time
from typing import (
    Callable,
    FrozenSet,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
import numpy.typing as npt

from ehcavity.cavity import (
    BOUNDARY_PARITIES,
    build_pumps,
    eigenfrequency,
    polarization,
    wavevector,
)
from ehcavity.data_models.acceptance import CheckResult, SelftestReport
from ehcavity.data_models.cavity import (
    CavityGeometry,
    InvalidModeError,
    ModeKind,
    ModeSpec,
    check_indices,
)
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.data_models.report import (
    GeometryConstraint,
    ResonanceReport,
    Verdict,
)
from ehcavity.data_models.simulation import SimulationConfig, SpectrumSettings
from ehcavity.expressions import evaluate
from ehcavity.logging import get_logger
from ehcavity.nonlinear import polarization_magnetization, wave_rhs
from ehcavity.recipes import RESONANT_RATIO, CookBook, ScenarioInfo
from ehcavity.resonance import (
    analyze,
    dimension_condition,
    solve_geometry,
    triangle_exclusion,
)
from ehcavity.simulate import end_to_end, evolve_mode, saturation_sweep
from ehcavity.trigpoly import Coefficients, Parity, rational_snap
from ehcavity.tui import format_report

logger = get_logger(__file__)

Array = npt.NDArray[np.float64]
Outcome = Tuple[bool, str]

TABLE_1 = (
    "wavenumbers  eigenfrequencies\n"
    "n            ω1*, 3ω1\n"
    "3n           ω1\n"
    "(* resonant, ! parity mismatch)\n"
)
#: Two 1D pumps `n = 1`, `p = 2`: the `2n-p` column is the uniform profile, so its
#:  amplitude vanishes, and `2ω1-ω2` is static
TABLE_2 = (
    "wavenumbers  eigenfrequencies\n"
    "p            ω2*, 3ω2, 2ω1-ω2, 2ω1+ω2\n"
    "3p           ω2\n"
    "2p-n         ω1, ω1+2ω2\n"
    "n            2ω2-ω1, ω1*, ω1+2ω2, 3ω1\n"
    "n+2p         2ω2-ω1, ω1\n"
    "2n+p         ω2, 2ω1-ω2\n"
    "3n           ω1\n"
    "(* resonant, ! parity mismatch)\n"
)
TABLE_3 = (
    "wavenumbers   eigenfrequencies\n"
    "(n, p, q)     ω1*, 3ω1\n"
    "(n, p, 3q)    ω1, 3ω1\n"
    "(n, 3p, q)    ω1, 3ω1\n"
    "(n, 3p, 3q)   ω1, 3ω1\n"
    "(3n, p, q)    ω1, 3ω1\n"
    "(3n, p, 3q)   ω1, 3ω1\n"
    "(3n, 3p, q)   ω1, 3ω1\n"
    "(3n, 3p, 3q)  ω1\n"
    "(* resonant, ! parity mismatch)\n"
)
#: Snapped E_y and B_z coefficients of a single 1D pump, keyed by `(x, t)` harmonics
SINGLE_1D_COEFFICIENTS = {
    "E_y": {((1, 0), (1, 0)): 2, ((1, 0), (3, 0)): -3, ((3, 0), (1, 0)): 1},
    "B_z": {((1, 0), (1, 0)): 2, ((1, 0), (3, 0)): -1, ((3, 0), (1, 0)): 3},
}
TRIPLE: FrozenSet[Coefficients] = frozenset({(3, 0), (0, 3)})
COMBINED: FrozenSet[Coefficients] = frozenset({(2, 1), (2, -1), (1, 2), (1, -2)})
PLUS: FrozenSet[Coefficients] = frozenset({(2, 1), (1, 2)})

ORACLE_RTOL = 1e-12
GEOMETRY_RANGE = (0.3, 3.0)


class _Jet:
    """Values with first and second derivatives in `(t, x, y, z)`, at many points."""

    __slots__ = ("v", "g", "h")

    def __init__(self, v: Array, g: Array, h: Array) -> None:
        self.v, self.g, self.h = v, g, h

    @classmethod
    def factor(
        cls, points: Array, axis: int, rate: float, parity: Parity
    ) -> "_Jet":
        """`sin(rate·u)` or `cos(rate·u)` of coordinate `axis`."""
        phase = rate * points[:, axis]
        sin, cos = np.sin(phase), np.cos(phase)
        value, slope = (sin, rate * cos) if parity is Parity.SIN else (cos, -rate * sin)
        g = np.zeros((len(points), 4))
        h = np.zeros((len(points), 4, 4))
        g[:, axis] = slope
        h[:, axis, axis] = -(rate**2) * value
        return cls(value, g, h)

    @classmethod
    def zeros(cls, size: int) -> "_Jet":
        return cls(np.zeros(size), np.zeros((size, 4)), np.zeros((size, 4, 4)))

    def __add__(self, other: "_Jet") -> "_Jet":
        return _Jet(self.v + other.v, self.g + other.g, self.h + other.h)

    def __sub__(self, other: "_Jet") -> "_Jet":
        return _Jet(self.v - other.v, self.g - other.g, self.h - other.h)

    def __mul__(self, other: Union["_Jet", float]) -> "_Jet":
        if not isinstance(other, _Jet):
            return _Jet(self.v * other, self.g * other, self.h * other)
        outer = np.einsum("na,nb->nab", self.g, other.g)
        return _Jet(
            self.v * other.v,
            self.g * other.v[:, None] + self.v[:, None] * other.g,
            self.h * other.v[:, None, None]
            + outer
            + outer.transpose(0, 2, 1)
            + self.v[:, None, None] * other.h,
        )

    __rmul__ = __mul__


JetVector = List[_Jet]


def _dot(a: JetVector, b: JetVector) -> _Jet:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _standing_wave(
    points: Array,
    amplitude: float,
    omega: float,
    time_parity: Parity,
    rates: Sequence[float],
    parities: Sequence[Parity],
) -> _Jet:
    jet = _Jet.factor(points, 0, omega, time_parity) * amplitude
    for axis, (rate, parity) in enumerate(zip(rates, parities), start=1):
        jet = jet * _Jet.factor(points, axis, rate, parity)
    return jet


def _pump_jets(
    points: Array, geometry: CavityGeometry, pumps: Sequence[ModeSpec]
) -> Tuple[JetVector, JetVector]:
    """
    Pump fields evaluated pointwise from their closed forms.

    `E = e sin(ωt)·(profile)` and `B = (k × e)/ω cos(ωt)·(profile)`.
    """
    E: JetVector = [_Jet.zeros(len(points)) for _ in range(3)]
    B: JetVector = [_Jet.zeros(len(points)) for _ in range(3)]
    S, C = Parity.SIN, Parity.COS
    for m in pumps:
        k = np.array(wavevector(geometry, *m.indices))
        omega = eigenfrequency(geometry, *m.indices)
        if m.is_1d:
            e = m.amplitude * np.array([0.0, math.cos(m.alpha), math.sin(m.alpha)])
            e_parities = [(S, C, C)] * 3
            b_parities = [(C, C, C)] * 3
        else:
            e = np.array(polarization(geometry, m))
            e_parities = [BOUNDARY_PARITIES[f"E_{a}"] for a in "xyz"]
            b_parities = [BOUNDARY_PARITIES[f"B_{a}"] for a in "xyz"]
        b = np.cross(k, e) / omega
        for i in range(3):
            E[i] = E[i] + _standing_wave(points, e[i], omega, S, k, e_parities[i])
            B[i] = B[i] + _standing_wave(points, b[i], omega, C, k, b_parities[i])
    return E, B


def _constitutive_jets(
    E: JetVector, B: JetVector, c: PhysicalConstants
) -> Tuple[JetVector, JetVector]:
    e2_minus_b2 = _dot(E, E) - _dot(B, B)
    e_dot_b = _dot(E, B) * (2 * c.beta)
    P = [(E[i] * e2_minus_b2 + B[i] * e_dot_b) * (16 * c.kappa) for i in range(3)]
    M = [(B[i] * e2_minus_b2 - E[i] * e_dot_b) * (16 * c.kappa) for i in range(3)]
    return P, M


def _source_values(P: JetVector, M: JetVector) -> Tuple[Array, Array]:
    """
    Pointwise sources from the second derivatives of `P` and `M`.

    `S_E = ∂t curl M + grad div P - ∂t²P` and `S_B = ∂t curl P - grad div M + ΔM`.
    """

    def dt_curl(F: JetVector) -> Array:
        return np.stack(
            [
                F[(i + 2) % 3].h[:, 0, (i + 1) % 3 + 1]
                - F[(i + 1) % 3].h[:, 0, (i + 2) % 3 + 1]
                for i in range(3)
            ],
            axis=-1,
        )

    def grad_div(F: JetVector) -> Array:
        return np.stack(
            [sum(F[j].h[:, i + 1, j + 1] for j in range(3)) for i in range(3)], axis=-1
        )

    def laplace(F: JetVector) -> Array:
        return np.stack(
            [sum(F[i].h[:, j, j] for j in range(1, 4)) for i in range(3)], axis=-1
        )

    s_e = dt_curl(M) + grad_div(P) - np.stack([p.h[:, 0, 0] for p in P], axis=-1)
    s_b = dt_curl(P) - grad_div(M) + laplace(M)
    return s_e, s_b


def _relative_error(symbolic: Array, numeric: Array) -> float:
    scale = float(np.max(np.abs(numeric)))
    error = float(np.max(np.abs(symbolic - numeric)))
    if scale == 0:
        return error
    return error / scale


def _random_geometry(rng: np.random.Generator) -> CavityGeometry:
    lx, ly, lz = rng.uniform(*GEOMETRY_RANGE, size=3)
    return CavityGeometry(lx=float(lx), ly=float(ly), lz=float(lz))


def _random_mode(rng: np.random.Generator, allow_1d: bool = True) -> ModeSpec:
    kinds = [ModeKind.ONE_D, ModeKind.TE, ModeKind.TM] if allow_1d else [
        ModeKind.TE,
        ModeKind.TM,
    ]
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind is ModeKind.ONE_D:
        return ModeSpec(kind=kind, n=int(rng.integers(1, 5)))
    while True:
        n, p, q = (int(i) for i in rng.integers(0, 4, size=3))
        try:
            check_indices(kind, n, p, q)
        except InvalidModeError:
            continue
        return ModeSpec(kind=kind, n=n, p=p, q=q)


def check_single_1d_coefficients(rng: np.random.Generator, samples: int) -> Outcome:
    """Single 1D pump: E_y and B_z carry three terms each with exact coefficients."""
    c = PhysicalConstants()
    geometry = CavityGeometry(lx=math.pi, ly=10.0, lz=10.0)
    for n in range(1, 5):
        pump = ModeSpec(kind=ModeKind.ONE_D, n=n)
        sources = wave_rhs(build_pumps(geometry, [pump]), c)
        reference = 8 * c.kappa * pump.amplitude**3 * float(n) ** 2
        components = sources.components()
        for name, poly in components.items():
            expected = SINGLE_1D_COEFFICIENTS.get(name, {})
            snapped = rational_snap(poly, reference)
            found = {(key.x, key.t): value for key, value in snapped.items()}
            if found != expected:
                return False, f"n={n}: {name} has coefficients {found}"
    return True, "E_y (2, -3, 1) and B_z (2, -1, 3) for n = 1..4"


def _resonant_cells(report: ResonanceReport) -> Set[Tuple]:
    return {
        (column.spatial, cell.time)
        for column in report.columns
        for cell in column.cells
        if cell.verdict is Verdict.RESONANT
    }


def _resonant_indices(report: ResonanceReport) -> Set[Tuple]:
    return {
        (column.indices, cell.time)
        for column in report.columns
        for cell in column.cells
        if cell.verdict is Verdict.RESONANT
    }


def _scenario_report(scenario: ScenarioInfo) -> ResonanceReport:
    return analyze(scenario.cavity(), scenario.modes(), PhysicalConstants())


def check_tables(rng: np.random.Generator, samples: int) -> Outcome:
    """Resonance tables of single and two pumps in 1D and 3D cavities."""
    for scenario, expected in (
        (CookBook.table_1, TABLE_1),
        (CookBook.table_2, TABLE_2),
        (CookBook.table_3, TABLE_3),
    ):
        table = format_report(_scenario_report(scenario))
        if table != expected:
            return False, f"table of {', '.join(scenario.pumps)} differs:\n{table}"

    table_2 = _scenario_report(CookBook.table_2)
    if _resonant_cells(table_2) != {
        (((1, 0), (0, 0), (0, 0)), (1, 0)),
        (((0, 1), (0, 0), (0, 0)), (0, 1)),
    }:
        return False, "two 1D pumps: resonant cells are not the pump frequencies"

    table_3 = _scenario_report(CookBook.table_3)
    if _resonant_cells(table_3) != {(((1, 0), (1, 0), (1, 0)), (1, 0))}:
        return False, "single 3D pump: resonant cells are not the pump frequency"

    modes = CookBook.table_4.modes()
    table_4 = _scenario_report(CookBook.table_4)
    for column in table_4.columns:
        times = {cell.time for cell in column.shown_cells}
        if TRIPLE & set(column.spatial) and times & COMBINED:
            return False, f"two 3D pumps: triple column {column.spatial} has {times}"
        if COMBINED & set(column.spatial) and times & TRIPLE:
            return False, f"two 3D pumps: combined column {column.spatial} has {times}"
    expected_resonances = {
        (modes[0].indices, (1, 0)),
        (modes[1].indices, (0, 1)),
    }
    if _resonant_indices(table_4) != expected_resonances:
        found = sorted(_resonant_indices(table_4))
        return False, f"two 3D pumps: resonances {found} are not the pump modes"
    return True, "tables of 1D and 3D cavities with one and two pumps"


def check_third_harmonic(rng: np.random.Generator, samples: int) -> Outcome:
    """Randomized single pumps never resonate at the third harmonic."""
    for i in range(samples):
        geometry, pump = _random_geometry(rng), _random_mode(rng)
        report = analyze(geometry, [pump], PhysicalConstants())
        hits = [r for r in report.resonant if r.key.t == (3, 0)]
        if hits:
            return False, f"{pump.label} in {geometry.label} resonates at 3ω"
    return True, f"{samples} single-pump runs without resonance at 3ω"


def check_plus_exclusion(rng: np.random.Generator, samples: int) -> Outcome:
    """Randomized two-pump runs never resonate at `2ωi + ωj`, triangle inequality."""
    for i in range(samples):
        geometry = _random_geometry(rng)
        first = _random_mode(rng, allow_1d=False)
        second = first
        while second.indices == first.indices:
            second = _random_mode(rng, allow_1d=False)
        report = analyze(geometry, [first, second], PhysicalConstants())
        hits = [r for r in report.resonant if r.key.t in PLUS]
        if hits:
            return False, (
                f"{first.label}+{second.label} in {geometry.label} resonates at"
                f" {hits[0].frequency_label}"
            )

    pairs = 50 * samples
    for k1, k2 in rng.normal(size=(pairs, 2, 3)):
        record = triangle_exclusion(k1, k2)
        if not record.parallel and not record.strict:
            return False, f"triangle inequality not strict for {k1} and {k2}"
    return True, f"{samples} two-pump runs and {pairs} wavevector pairs"


def check_resonant_geometry(rng: np.random.Generator, samples: int) -> Outcome:
    """TE011 and TM110 resonate with signal 130 at a single ratio, never with 132."""
    pump1, pump2 = ModeSpec.parse("TE011"), ModeSpec.parse("TM110")
    constraint = GeometryConstraint()
    geometries = solve_geometry(pump1, pump2, (1, 3, 0), -1, constraint)
    if len(geometries) != 1:
        return False, f"expected one geometry for signal 130, got {len(geometries)}"
    r = geometries[0].lz / geometries[0].lx
    expected = evaluate(RESONANT_RATIO)
    residual = dimension_condition(geometries[0])
    if abs(r - expected) > 1e-10 or abs(residual) > 1e-9:
        return False, f"root r = {r} with dimension residual {residual}"
    if solve_geometry(pump1, pump2, (1, 3, 2), -1, constraint):
        return False, "signal 132 has a resonant geometry"
    return True, f"r = {r:.15g}, signal 132 without root"


def check_symbolic_oracle(rng: np.random.Generator, samples: int) -> Outcome:
    """Symbolic P, M, S_E and S_B agree with pointwise evaluation of their formulas."""
    scenarios = [
        (CookBook.resonant_geometry.cavity(), CookBook.resonant_geometry.modes()),
        (
            CavityGeometry(lx=math.pi, ly=10.0, lz=10.0),
            [ModeSpec.parse("1D:n=1"), ModeSpec.parse("1D:n=2,alpha=pi/5,F0=0.7")],
        ),
    ]
    c = PhysicalConstants()
    worst = 0.0
    for geometry, pumps in scenarios:
        field = build_pumps(geometry, pumps)
        period = 2 * math.pi / min(eigenfrequency(geometry, *m.indices) for m in pumps)
        points = rng.uniform(0, 1, size=(1000, 4)) * [period, *geometry.lengths]
        E, B = _pump_jets(points, geometry, pumps)
        P, M = _constitutive_jets(E, B, c)
        s_e, s_b = _source_values(P, M)
        p_sym, m_sym = polarization_magnetization(field, c)
        sources = wave_rhs(field, c)
        pairs = {
            "P": (p_sym.eval_at(points), np.stack([j.v for j in P], axis=-1)),
            "M": (m_sym.eval_at(points), np.stack([j.v for j in M], axis=-1)),
            "S_E": (sources.E.eval_at(points), s_e),
            "S_B": (sources.B.eval_at(points), s_b),
        }
        for name, (symbolic, numeric) in pairs.items():
            error = _relative_error(symbolic, numeric)
            worst = max(worst, error)
            if error > ORACLE_RTOL:
                return False, f"{name} deviates by {error:.3g} for {pumps[0].label}"
    return True, f"largest relative deviation {worst:.3g}"


def check_dynamics(rng: np.random.Generator, samples: int) -> Outcome:
    """Secular growth, saturation law and bounded off-resonant response."""
    period = 2 * math.pi
    resonant = SimulationConfig(
        eigenfrequency=1.0, drive_frequency=1.0, duration=100 * period
    )
    slope = evolve_mode(resonant).growth_slope()
    if abs(slope / 0.5 - 1) > 0.01:
        return False, f"growth slope {slope} instead of f/(2ω_r) = 0.5"

    table = saturation_sweep(resonant, [0.01, 0.02, 0.05, 0.1])
    if table.exponent is None or abs(table.exponent + 1) > 0.02:
        return False, f"saturation exponent {table.exponent}"

    bound = 1 / abs(3.0**2 - 1.0**2)
    off = SimulationConfig(
        eigenfrequency=1.0, drive_frequency=3.0, duration=100 * period
    )
    peak = evolve_mode(off).max_amplitude()
    if peak > 2 * bound * 1.01:
        return False, f"undamped off-resonant amplitude {peak} exceeds {2 * bound}"
    steady = saturation_sweep(off, [0.05]).rows[0].steady_amplitude
    if steady > bound * 1.01:
        return False, f"off-resonant steady amplitude {steady} exceeds {bound}"
    return True, f"slope {slope:.6g}, exponent {table.exponent:.4f}, bounded 3ω drive"


def check_null(rng: np.random.Generator, samples: int) -> Outcome:
    """Zero coupling gives no sources and no spectrum, co-directional terms vanish."""
    scenario = CookBook.resonant_geometry
    zero = PhysicalConstants(kappa=0.0)
    sources = wave_rhs(build_pumps(scenario.cavity(), scenario.modes()), zero)
    if not sources.is_empty():
        return False, "sources do not vanish with zero coupling"
    summary = end_to_end(
        scenario.modes(), scenario.cavity(), zero, SpectrumSettings(cycles=4)
    )
    if summary.lines:
        return False, f"{len(summary.lines)} spectrum lines with zero coupling"

    geometry = CavityGeometry(lx=1.0, ly=1.0, lz=1.3)
    pumps = [ModeSpec.parse("TE022"), ModeSpec.parse("TE033")]
    report = analyze(geometry, pumps, PhysicalConstants())
    for record in report.records:
        key = record.key
        co_directional = key.t in COMBINED and key.y == key.z == key.t
        if co_directional and record.verdict is not Verdict.VANISHING_AMPLITUDE:
            return False, f"parallel pumps keep term {record.frequency_label}"
    return True, "zero coupling and parallel pumps"


CHECKS: List[Tuple[str, Callable[[np.random.Generator, int], Outcome]]] = [
    ("single-1d-coefficients", check_single_1d_coefficients),
    ("resonance-tables", check_tables),
    ("third-harmonic-exclusion", check_third_harmonic),
    ("plus-exclusion", check_plus_exclusion),
    ("resonant-geometry", check_resonant_geometry),
    ("symbolic-oracle", check_symbolic_oracle),
    ("dynamics", check_dynamics),
    ("null-tests", check_null),
]


def run_checks(
    seed: int = 0,
    samples: int = 200,
    names: Optional[Sequence[str]] = None,
    progress_callback: Callable[[], None] = lambda: None,
) -> SelftestReport:
    """
    Run acceptance checks.

    :param seed: Seed of the random generator shared by randomized checks
    :param samples: Number of randomized runs per randomized check
    :param names: Names of checks to run (all by default)
    :param progress_callback: Function called after each check
    :return: Check outcomes
    """
    if samples < 1:
        raise ValueError(f"Expected `samples` >= 1, got `{samples}`.")
    selected = [(n, f) for n, f in CHECKS if names is None or n in names]
    if names is not None and len(selected) != len(set(names)):
        known = [n for n, _ in CHECKS]
        raise ValueError(f"Expected check names in `{known}`, got `{list(names)}`.")
    rng = np.random.default_rng(seed)
    results = []
    for name, check in selected:
        start = time.perf_counter()
        try:
            passed, detail = check(rng, samples)
        except (ArithmeticError, RuntimeError, ValueError) as err:
            passed, detail = False, f"{type(err).__name__}: {err}"
        seconds = time.perf_counter() - start
        outcome = "passed" if passed else "failed"
        logger.debug(f"Check {name} {outcome} in {seconds:.2f}s")
        results.append(
            CheckResult(name=name, passed=passed, detail=detail, seconds=seconds)
        )
        progress_callback()
    return SelftestReport(seed=seed, samples=samples, checks=results)
