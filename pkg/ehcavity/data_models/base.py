"""Data models - Base Pydantic model with custom methods."""
from typing import Any, Dict

from pydantic import BaseModel, Extra

from ehcavity.common import jsonable


class EhcavityBase(BaseModel):
    """Base Pydantic class for validated (immutable) records."""

    class Config:
        """Default configuration for base class."""

        extra = Extra.forbid
        allow_mutation = False

    def document(self) -> Dict[str, Any]:
        """
        Return JSON-ready representation of the model.

        Floats are rounded to 15 significant digits and enums are replaced by their
         values, so that documents are stable across runs.
        """
        return jsonable(self.dict())

    def __str__(self) -> str:
        """Return outputs of __repr__."""
        return repr(self)
