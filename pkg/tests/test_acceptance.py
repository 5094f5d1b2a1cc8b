import numpy as np
import pytest
from _pytest.monkeypatch import MonkeyPatch

from ehcavity.acceptance import CHECKS, run_checks
from ehcavity.tui import format_checks


def test_run_checks() -> None:
    """All acceptance checks pass on a small randomized sample."""
    calls = []
    report = run_checks(seed=1, samples=5, progress_callback=lambda: calls.append(1))
    assert [c.name for c in report.checks] == [name for name, _ in CHECKS]
    assert len(calls) == len(CHECKS)
    assert report.passed, format_checks(report)


def test_run_checks__selection() -> None:
    """Run named checks only, in their canonical order."""
    report = run_checks(samples=1, names=["null-tests", "resonant-geometry"])
    assert [c.name for c in report.checks] == ["resonant-geometry", "null-tests"]
    assert report.passed, format_checks(report)


def test_run_checks__invalid() -> None:
    """Reject unknown names and empty samples."""
    with pytest.raises(ValueError, match="check names"):
        run_checks(names=["resonant-geometry", "unknown"])
    with pytest.raises(ValueError, match="samples"):
        run_checks(samples=0)


def test_run_checks__errors(monkeypatch: MonkeyPatch) -> None:
    """Turn errors raised by a check into a failed outcome."""

    def broken(rng: np.random.Generator, samples: int):
        raise RuntimeError("boom")

    monkeypatch.setattr("ehcavity.acceptance.CHECKS", [("broken", broken)])
    report = run_checks()
    assert not report.passed
    (check,) = report.checks
    assert check.detail == "RuntimeError: boom"


def test_document__without_timings() -> None:
    """Documents of repeated runs are identical."""
    first = run_checks(samples=1, names=["single-1d-coefficients"])
    second = run_checks(samples=1, names=["single-1d-coefficients"])
    assert first.document() == second.document()
    assert "seconds" not in first.document()["checks"][0]


def test_run_checks__exclusions() -> None:
    """Exclude `3ω` and `2ωi+ωj` resonances over 200 runs and 10⁴ wavevector pairs."""
    names = ["third-harmonic-exclusion", "plus-exclusion"]
    report = run_checks(seed=0, samples=200, names=names)
    assert report.passed, format_checks(report)
    third, plus = report.checks
    assert third.detail == "200 single-pump runs without resonance at 3ω"
    assert plus.detail == "200 two-pump runs and 10000 wavevector pairs"
