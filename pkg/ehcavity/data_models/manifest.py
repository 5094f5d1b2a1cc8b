"""Data models - Manifest embedded in every output document."""
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from ehcavity.data_models.base import EhcavityBase
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.version import __version__


def run_timestamp() -> str:
    """UTC timestamp of the run, honouring `SOURCE_DATE_EPOCH` when set."""
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    moment = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        if epoch
        else datetime.now(tz=timezone.utc)
    )
    return moment.replace(microsecond=0).isoformat()


class RunManifest(EhcavityBase):
    """Tool version, inputs and parameters of a run."""

    tool: str = "ehcavity"
    version: str = __version__
    command: str
    inputs: Dict[str, Any]
    constants: Optional[PhysicalConstants] = None
    geometry: Optional[CavityGeometry] = None
    pumps: List[ModeSpec] = []
    seed: Optional[int] = None
    timestamp: str

    @classmethod
    def create(
        cls,
        command: str,
        inputs: Dict[str, Any],
        *,
        constants: Optional[PhysicalConstants] = None,
        geometry: Optional[CavityGeometry] = None,
        pumps: Sequence[ModeSpec] = (),
        seed: Optional[int] = None,
    ) -> "RunManifest":
        """Build manifest for the current run."""
        return cls(
            command=command,
            inputs=inputs,
            constants=constants,
            geometry=geometry,
            pumps=list(pumps),
            seed=seed,
            timestamp=run_timestamp(),
        )
