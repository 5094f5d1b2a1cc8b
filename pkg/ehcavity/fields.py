"""Vector fields of trigonometric polynomials and vector calculus on them."""
from dataclasses import dataclass
from typing import Dict, Iterator, Tuple, TypeVar, Union, overload

import numpy as np
import numpy.typing as npt

from ehcavity.logging import get_logger
from ehcavity.trigpoly import (
    LatticeBasis,
    Scalar,
    TrigPoly,
    differentiate,
    eval_at,
    integrate,
)

logger = get_logger(__file__)

COMPONENT_NAMES = ("E_x", "E_y", "E_z", "B_x", "B_y", "B_z")

F = TypeVar("F", TrigPoly, "VectorTrigField")


@dataclass(frozen=True)
class VectorTrigField:
    """Three trigonometric polynomials, the `x, y, z` components of a vector field."""

    x: TrigPoly
    y: TrigPoly
    z: TrigPoly

    @classmethod
    def zero(cls, basis: LatticeBasis) -> "VectorTrigField":
        """Field with empty components."""
        return cls(TrigPoly.zero(basis), TrigPoly.zero(basis), TrigPoly.zero(basis))

    @property
    def components(self) -> Tuple[TrigPoly, TrigPoly, TrigPoly]:
        """Components `x, y, z`."""
        return self.x, self.y, self.z

    @property
    def basis(self) -> LatticeBasis:
        """Lattice basis shared by the components."""
        return self.x.basis.merge(self.y.basis).merge(self.z.basis)

    def __iter__(self) -> Iterator[TrigPoly]:
        return iter(self.components)

    def is_empty(self) -> bool:
        """Whether all components are empty."""
        return not any(self.components)

    def __add__(self, other: "VectorTrigField") -> "VectorTrigField":
        return VectorTrigField(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "VectorTrigField") -> "VectorTrigField":
        return VectorTrigField(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "VectorTrigField":
        return VectorTrigField(-self.x, -self.y, -self.z)

    def __mul__(self, other: Union[TrigPoly, Scalar]) -> "VectorTrigField":
        """Multiply every component by a number or by a scalar field."""
        return VectorTrigField(self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other: Union[TrigPoly, Scalar]) -> "VectorTrigField":
        return self.__mul__(other)

    def dot(self, other: "VectorTrigField") -> TrigPoly:
        """Scalar product."""
        return self.x * other.x + self.y * other.y + self.z * other.z

    def differentiate(self, coordinate: str) -> "VectorTrigField":
        """Componentwise partial derivative."""
        return VectorTrigField(
            *(differentiate(c, coordinate) for c in self.components)
        )

    def integrate(self, coordinate: str) -> "VectorTrigField":
        """Componentwise antiderivative."""
        return VectorTrigField(*(integrate(c, coordinate) for c in self.components))

    def eval_at(self, point: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Evaluate components at one point (shape `(3,)`) or `N` points (`(N, 3)`)."""
        values = [np.asarray(eval_at(c, point), dtype=float) for c in self.components]
        return np.stack(values, axis=-1)


def gradient(phi: TrigPoly) -> VectorTrigField:
    """Spatial gradient of a scalar field."""
    return VectorTrigField(*(differentiate(phi, c) for c in ("x", "y", "z")))


def divergence(f: VectorTrigField) -> TrigPoly:
    """Spatial divergence of a vector field."""
    return differentiate(f.x, "x") + differentiate(f.y, "y") + differentiate(f.z, "z")


def curl(f: VectorTrigField) -> VectorTrigField:
    """Spatial curl of a vector field."""
    return VectorTrigField(
        differentiate(f.z, "y") - differentiate(f.y, "z"),
        differentiate(f.x, "z") - differentiate(f.z, "x"),
        differentiate(f.y, "x") - differentiate(f.x, "y"),
    )


def _second(f: F, coordinate: str) -> F:
    if isinstance(f, VectorTrigField):
        return f.differentiate(coordinate).differentiate(coordinate)
    return differentiate(differentiate(f, coordinate), coordinate)


@overload
def laplacian(f: TrigPoly) -> TrigPoly:
    ...


@overload
def laplacian(f: VectorTrigField) -> VectorTrigField:
    ...


def laplacian(
    f: Union[TrigPoly, VectorTrigField]
) -> Union[TrigPoly, VectorTrigField]:
    """Spatial Laplacian `Δ` of a scalar or (componentwise) vector field."""
    return _second(f, "x") + _second(f, "y") + _second(f, "z")  # type: ignore


@overload
def dalembertian(f: TrigPoly) -> TrigPoly:
    ...


@overload
def dalembertian(f: VectorTrigField) -> VectorTrigField:
    ...


def dalembertian(
    f: Union[TrigPoly, VectorTrigField]
) -> Union[TrigPoly, VectorTrigField]:
    """Wave operator `□ = ∂t² - Δ`."""
    return _second(f, "t") - laplacian(f)  # type: ignore


@overload
def damped_dalembertian(f: TrigPoly, gamma: float) -> TrigPoly:
    ...


@overload
def damped_dalembertian(f: VectorTrigField, gamma: float) -> VectorTrigField:
    ...


def damped_dalembertian(
    f: Union[TrigPoly, VectorTrigField], gamma: float
) -> Union[TrigPoly, VectorTrigField]:
    """
    Damped wave operator `□ + Γ∂t`.

    :param f: Scalar or vector field
    :param gamma: Dissipation coefficient `Γ >= 0`
    :return: Field of the same kind
    """
    if gamma < 0:
        raise ValueError(f"Expected `gamma` >= 0, got `{gamma}`.")
    if isinstance(f, VectorTrigField):
        return dalembertian(f) + f.differentiate("t") * gamma
    return dalembertian(f) + differentiate(f, "t") * gamma


@dataclass(frozen=True)
class FieldPair:
    """Electric and magnetic fields of a configuration (pump mode or source)."""

    E: VectorTrigField
    B: VectorTrigField

    @classmethod
    def zero(cls, basis: LatticeBasis) -> "FieldPair":
        """Empty configuration."""
        return cls(VectorTrigField.zero(basis), VectorTrigField.zero(basis))

    @property
    def basis(self) -> LatticeBasis:
        """Lattice basis shared by both fields."""
        return self.E.basis.merge(self.B.basis)

    def components(self) -> Dict[str, TrigPoly]:
        """The six named components `E_x, ..., B_z`."""
        return dict(zip(COMPONENT_NAMES, (*self.E.components, *self.B.components)))

    def is_empty(self) -> bool:
        """Whether all six components are empty."""
        return self.E.is_empty() and self.B.is_empty()

    def __add__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.E + other.E, self.B + other.B)

    def scaled(self, factor: float) -> "FieldPair":
        """Multiply both fields by a number."""
        return FieldPair(self.E * factor, self.B * factor)
