"""Data models - Acceptance check results."""
from typing import Any, Dict, List

from ehcavity.common import jsonable
from ehcavity.data_models.base import EhcavityBase


class CheckResult(EhcavityBase):
    """Outcome of one acceptance check."""

    name: str
    passed: bool
    detail: str
    seconds: float


class SelftestReport(EhcavityBase):
    """Outcomes of all acceptance checks of a run."""

    seed: int
    samples: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return all(c.passed for c in self.checks)

    def document(self) -> Dict[str, Any]:
        """Return JSON-ready representation without timings (identical across runs)."""
        return jsonable(self.dict(exclude={"checks": {"__all__": {"seconds"}}}))
