"""Recipes for `ehcavity table ...` and `ehcavity simulate ...`."""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple

from ehcavity.data_models.cavity import CavityGeometry, ModeSpec

RESONANT_RATIO = "sqrt(sqrt(5)-2)"


@dataclass
class ScenarioInfo:
    """Geometry and pump modes of a named analysis scenario."""

    geometry: str
    pumps: Tuple[str, ...]
    description: str

    def cavity(self) -> CavityGeometry:
        """Parsed cavity geometry."""
        return CavityGeometry.parse(self.geometry)

    def modes(self) -> List[ModeSpec]:
        """Parsed pump modes."""
        return [ModeSpec.parse(pump) for pump in self.pumps]


@dataclass
class CookBook:
    """Common scenarios of the nonlinear cavity analysis."""

    table_1 = ScenarioInfo(
        geometry="pi,10,10",
        pumps=("1D:n=1",),
        description="Single pump mode in a 1D cavity: only the pump frequency"
        " resonates, the third harmonic does not.",
    )
    table_2 = ScenarioInfo(
        geometry="pi,10,10",
        pumps=("1D:n=1", "1D:n=2"),
        description="Two pump modes in a 1D cavity: the mixed wavenumbers `2n±p` do"
        " not resonate.",
    )
    table_3 = ScenarioInfo(
        geometry="1,1.3,1.7",
        pumps=("TM111",),
        description="Single pump mode in a 3D cavity: only the pump frequency"
        " resonates.",
    )
    table_4 = ScenarioInfo(
        geometry="1,1.3,1.7",
        pumps=("TM111", "TE121"),
        description="Two pump modes in a 3D cavity: triple wavenumbers carry no"
        " combined frequencies and combined wavenumbers carry no triple frequencies.",
    )
    resonant_geometry = ScenarioInfo(
        geometry=f"1/{RESONANT_RATIO},1/{RESONANT_RATIO},1",
        pumps=("TE011", "TM110"),
        description="TE011 and TM110 in the geometry where `2ω1-ω2` matches the"
        " eigenfrequency of signal mode 130.",
    )
    detuned_geometry = ScenarioInfo(
        geometry=f"1/(1.05*{RESONANT_RATIO}),1/(1.05*{RESONANT_RATIO}),1",
        pumps=("TE011", "TM110"),
        description="TE011 and TM110 with `L_z/L_x` detuned by 5% from the resonant"
        " geometry.",
    )

    @classmethod
    def _recipes(cls) -> Dict[str, str]:
        """
        Get the recipes as a {`recipe_name`: `recipe-value`} dictionary.

        `Typer` expects the user to pass `Enum.value`, not `Enum.name`.
        """
        names = (
            attr for attr in dir(cls) if isinstance(getattr(cls, attr), ScenarioInfo)
        )
        return {name: name.replace("_", "-") for name in names}

    @classmethod
    def get(cls, recipe: "Recipe") -> ScenarioInfo:
        """Scenario of a recipe."""
        return getattr(cls, recipe.name)


# https://github.com/python/mypy/issues/5317
Recipe = Enum("Recipe", CookBook._recipes())  # type: ignore
