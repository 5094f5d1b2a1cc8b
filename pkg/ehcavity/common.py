"""Common set of miscellaneous functions."""
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from ehcavity.logging import get_logger

logger = get_logger(__file__)

SIGNIFICANT_DIGITS = 15


def find_obj(
    obj_name: str, start: Path, finish: Path, is_dir: bool = False
) -> Optional[Path]:
    """
    Find file (or directory) in `finish` or its parents, up to `start` included.

    :param obj_name: Name to locate
    :param start: Outermost (parent) directory of the search
    :param finish: Innermost (child) directory of the search
    :param is_dir: Whether object is a directory or a file
    :return: Path of the closest match to `finish`, if any
    """
    if not start.is_dir() or not finish.is_dir():
        raise ValueError("Parameters `start` and `finish` must be directories.")
    stop = start.resolve()
    if stop not in (finish.resolve(), *finish.resolve().parents):
        logger.debug(f"{start} is not a parent of {finish}, cannot find {obj_name}.")
        return None

    for directory in (finish, *finish.parents):
        candidate = directory / obj_name
        if candidate.is_dir() if is_dir else candidate.is_file():
            return candidate
        if directory.resolve() == stop:
            break
    logger.debug(f"{obj_name} not found between {start} and {finish}.")
    return None


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round `value` to a number of significant digits (non-finite values untouched)."""
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def format_number(value: float) -> str:
    """Format number for text output, with 15 significant digits."""
    if value == 0:
        return "0"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def format_fraction(value: Fraction) -> str:
    """Format rational coefficient as `p/q` (or just `p` for integers)."""
    return str(value.numerator) if value.denominator == 1 else str(value)


def jsonable(obj: Any) -> Any:
    """
    Convert nested results into JSON-ready values.

    Floats are rounded to 15 significant digits, enums become their values, named
     tuples become mappings and other tuples become lists.
    """
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return round_significant(obj)
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, Mapping):
        return {str(jsonable(k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
        return {k: jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return jsonable(obj.tolist())
    raise TypeError(f"Cannot convert object of type `{type(obj).__name__}` to JSON.")


def write_document(path: Path, document: Dict[str, Any]) -> None:
    """
    Write machine-readable (JSON) document.

    :param path: Output file path (parent directories are created)
    :param document: JSON-ready mapping
    :return:
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(jsonable(document), indent=2, sort_keys=True, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )
    logger.debug(f"Document written to {path}")
