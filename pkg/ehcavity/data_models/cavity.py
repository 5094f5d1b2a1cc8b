"""Data models - Cavity geometry and pump mode descriptors."""
import math
import re
from enum import Enum
from typing import Dict, Tuple

from pydantic import root_validator, validator

from ehcavity.common import format_number
from ehcavity.data_models.base import EhcavityBase
from ehcavity.expressions import ExpressionError, evaluate, evaluate_many

_COMPACT_MODE = re.compile(r"^(TE|TM)(\d)(\d)(\d)$")
_INDEX_KEYS = ("n", "p", "q")
_VALUE_KEYS = ("F0", "alpha")


class InvalidModeError(ValueError):
    """Mode string is malformed or the index combination is not a cavity mode."""


class ModeKind(str, Enum):
    """Pump mode families."""

    ONE_D = "1D"
    TE = "TE"
    TM = "TM"


def check_indices(kind: ModeKind, n: int, p: int, q: int) -> None:
    """
    Raise `InvalidModeError` unless `(n, p, q)` is a valid mode of `kind`.

    1D modes need `n >= 1, p = q = 0`, TE modes need `q >= 1` and `(n, p) != (0, 0)`
     and TM modes need `n, p >= 1`.
    """
    label = f"{kind.value}({n},{p},{q})"
    if min(n, p, q) < 0:
        raise InvalidModeError(f"Expected nonnegative indices, got `{label}`.")
    if kind is ModeKind.ONE_D and (n < 1 or p != 0 or q != 0):
        raise InvalidModeError(f"Expected `n >= 1, p = q = 0` for 1D, got `{label}`.")
    if kind is ModeKind.TE and (q < 1 or n == p == 0):
        raise InvalidModeError(
            f"Expected `q >= 1` and `(n, p) != (0, 0)` for TE, got `{label}`."
        )
    if kind is ModeKind.TM and (n < 1 or p < 1):
        raise InvalidModeError(f"Expected `n, p >= 1` for TM, got `{label}`.")


def is_cavity_mode(n: int, p: int, q: int) -> bool:
    """Whether `(n, p, q)` indexes a TE or a TM mode of a rectangular cavity."""
    for kind in (ModeKind.TE, ModeKind.TM):
        try:
            check_indices(kind, n, p, q)
        except InvalidModeError:
            continue
        return True
    return False


class CavityGeometry(EhcavityBase):
    """Box dimensions `(L_x, L_y, L_z)` in natural units."""

    lx: float
    ly: float
    lz: float

    @validator("lx", "ly", "lz")
    def positive_finite(cls, v: float) -> float:
        """Check that lengths are positive and finite."""
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"Expected positive finite length, got `{v}`.")
        return v

    @classmethod
    def parse(cls, text: str) -> "CavityGeometry":
        """
        Parse comma-separated dimensions, such as `pi,10,10` or `1,1,sqrt(sqrt(5)-2)`.

        :param text: Three arithmetic expressions
        :return: Geometry
        """
        lx, ly, lz = evaluate_many(text, size=3)
        return cls(lx=lx, ly=ly, lz=lz)

    @property
    def lengths(self) -> Tuple[float, float, float]:
        """Dimensions as a tuple."""
        return self.lx, self.ly, self.lz

    @property
    def label(self) -> str:
        """Dimensions with 15 significant digits."""
        return ",".join(format_number(v) for v in self.lengths)


class ModeSpec(EhcavityBase):
    """Pump mode: family, indices, peak field amplitude and (1D) polarization angle."""

    kind: ModeKind
    n: int
    p: int = 0
    q: int = 0
    amplitude: float = 1.0
    alpha: float = 0.0

    @root_validator(skip_on_failure=True)
    def valid_mode(cls, values: Dict) -> Dict:
        """Check index combination and amplitude."""
        check_indices(values["kind"], values["n"], values["p"], values["q"])
        if not math.isfinite(values["amplitude"]) or not math.isfinite(values["alpha"]):
            raise ValueError("Expected finite `amplitude` and `alpha`.")
        if values["alpha"] != 0 and values["kind"] is not ModeKind.ONE_D:
            raise ValueError("The polarization angle `alpha` only applies to 1D modes.")
        return values

    @classmethod
    def parse(cls, text: str) -> "ModeSpec":
        """
        Parse mode string.

        Accepted forms are `TE011`, `TM110`, `TE011:F0=2`, `TE:n=1,p=0,q=12` and
         `1D:n=2,alpha=pi/4,F0=1`.
        :param text: Mode string
        :return: Mode specification
        """
        head, _, options = text.strip().partition(":")
        compact = _COMPACT_MODE.match(head)
        fields: Dict = {}
        if compact is not None:
            kind_str, *indices = compact.groups()
            values = dict(zip(_INDEX_KEYS, map(int, indices)))
            fields.update(kind=ModeKind(kind_str), **values)
        elif head in {k.value for k in ModeKind}:
            fields["kind"] = ModeKind(head)
        else:
            raise InvalidModeError(
                f"Expected mode kind `1D`, `TE` or `TM` (or compact form like `TE011`),"
                f" got `{head}` in `{text}`."
            )

        for token in filter(None, (t.strip() for t in options.split(","))):
            name, sep, value = token.partition("=")
            name = name.strip()
            if not sep or name not in (*_INDEX_KEYS, *_VALUE_KEYS):
                raise InvalidModeError(
                    f"Expected `name=value` with name in"
                    f" `{(*_INDEX_KEYS, *_VALUE_KEYS)}`, got `{token}` in `{text}`."
                )
            if name in fields:
                raise InvalidModeError(f"Duplicate option `{name}` in `{text}`.")
            try:
                if name in _INDEX_KEYS:
                    fields[name] = int(value.strip())
                else:
                    fields["amplitude" if name == "F0" else name] = evaluate(value)
            except (ValueError, ExpressionError) as err:
                message = f"Invalid value in `{token}` of `{text}`."
                raise InvalidModeError(message) from err

        if "n" not in fields:
            raise InvalidModeError(f"Missing index `n` in `{text}`.")
        check_indices(
            fields["kind"], fields["n"], fields.get("p", 0), fields.get("q", 0)
        )
        return cls(**fields)

    @property
    def indices(self) -> Tuple[int, int, int]:
        """Mode indices `(n, p, q)`."""
        return self.n, self.p, self.q

    @property
    def is_1d(self) -> bool:
        """Whether mode is a 1D standing wave."""
        return self.kind is ModeKind.ONE_D

    @property
    def label(self) -> str:
        """Canonical mode string (parsed back into the same mode)."""
        if self.is_1d:
            label = f"1D:n={self.n}"
        elif max(self.indices) <= 9:
            label = f"{self.kind.value}{self.n}{self.p}{self.q}"
        else:
            label = f"{self.kind.value}:n={self.n},p={self.p},q={self.q}"
        extras = []
        if self.alpha != 0:
            extras.append(f"alpha={format_number(self.alpha)}")
        if self.amplitude != 1:
            extras.append(f"F0={format_number(self.amplitude)}")
        if not extras:
            return label
        return label + ("," if ":" in label else ":") + ",".join(extras)
