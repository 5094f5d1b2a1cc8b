from ehcavity.data_models.acceptance import CheckResult, SelftestReport


def test_selftest_report() -> None:
    """Pass only when all checks pass, and drop timings from documents."""
    checks = [
        CheckResult(name="a", passed=True, detail="ok", seconds=0.25),
        CheckResult(name="b", passed=False, detail="off", seconds=1.5),
    ]
    report = SelftestReport(seed=1, samples=3, checks=checks)
    assert not report.passed
    assert SelftestReport(seed=1, samples=3, checks=checks[:1]).passed
    assert report.document() == {
        "seed": 1,
        "samples": 3,
        "checks": [
            {"name": "a", "passed": True, "detail": "ok"},
            {"name": "b", "passed": False, "detail": "off"},
        ],
    }
