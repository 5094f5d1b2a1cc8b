from enum import Enum

import pytest
from pydantic import ValidationError

from ehcavity.data_models.base import EhcavityBase


class Shade(str, Enum):
    """Enum field for document tests."""

    DARK = "dark"


class Sample(EhcavityBase):
    """Model for base class tests."""

    name: str
    value: float
    shade: Shade = Shade.DARK


def test_base_document() -> None:
    """Round floats and replace enums in documents."""
    model = Sample(name="x", value=0.1 + 0.2)
    assert model.document() == {"name": "x", "value": 0.3, "shade": "dark"}


def test_base_forbids_extra() -> None:
    """Reject unknown fields."""
    with pytest.raises(ValidationError, match="extra fields not permitted"):
        Sample(name="x", value=1.0, other=2)


def test_base_immutable() -> None:
    """Refuse to change validated records."""
    model = Sample(name="x", value=1.0)
    with pytest.raises(TypeError):
        model.value = 2.0  # type: ignore


def test_base_str() -> None:
    """Show the same representation for `str` and `repr`."""
    model = Sample(name="x", value=1.0)
    assert str(model) == repr(model)
