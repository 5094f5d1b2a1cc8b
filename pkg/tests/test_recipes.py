import pytest

from ehcavity.expressions import evaluate
from ehcavity.recipes import RESONANT_RATIO, CookBook, Recipe
from ehcavity.resonance import dimension_condition


def test_recipe_values() -> None:
    """Recipes are passed on the command line by their dashed names."""
    assert {r.value for r in Recipe} == {
        "table-1",
        "table-2",
        "table-3",
        "table-4",
        "resonant-geometry",
        "detuned-geometry",
    }
    assert CookBook.get(Recipe("table-1")) is CookBook.table_1


@pytest.mark.parametrize("recipe", list(Recipe))
def test_recipes_parse(recipe: Recipe) -> None:
    """Every recipe holds a valid geometry and one or two pump modes."""
    scenario = CookBook.get(recipe)
    geometry = scenario.cavity()
    modes = scenario.modes()
    assert all(length > 0 for length in geometry.lengths)
    assert 1 <= len(modes) <= 2
    assert len({m.is_1d for m in modes}) == 1
    assert scenario.description


def test_resonant_geometry() -> None:
    """The resonant recipe sits at `L_z/L_x = sqrt(sqrt(5) - 2)` with `L_x = L_y`."""
    geometry = CookBook.resonant_geometry.cavity()
    assert geometry.lx == geometry.ly
    assert geometry.lz / geometry.lx == pytest.approx(evaluate(RESONANT_RATIO))
    assert dimension_condition(geometry) == pytest.approx(0.0, abs=1e-12)

    detuned = CookBook.detuned_geometry.cavity()
    assert detuned.lz / detuned.lx == pytest.approx(1.05 * evaluate(RESONANT_RATIO))
