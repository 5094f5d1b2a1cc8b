import json
import re
import sys
from importlib import resources
from pathlib import Path

import pytest
import tomli
from _pytest.capture import CaptureFixture
from _pytest.monkeypatch import MonkeyPatch
from typer import Context
from typer.core import TyperCommand
from typer.testing import CliRunner

from ehcavity.cli import _config_callback, app, main
from ehcavity.data_models.acceptance import CheckResult, SelftestReport
from ehcavity.simulate import UnstableIntegrationError
from ehcavity.version import __version__

runner = CliRunner()

with resources.path("tests.files", "table1.txt") as table_path:
    table_1 = table_path.read_text(encoding="utf-8")


def config_file() -> Path:
    """Configuration file for easy access."""
    with resources.path("tests.files", "pyproject.toml") as conf:
        return conf


def test_version_callback() -> None:
    """Print version and help."""
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"ehcavity version: {__version__}\n" == result.stdout


def test_config_callback() -> None:
    """Overwrite default parameters from `typer.Context`."""
    ctx: Context = Context(TyperCommand(name="test-config"))
    conf = config_file()
    assert ctx.default_map is None
    parsed_config = _config_callback(ctx=ctx, config_path=conf)
    assert ctx.default_map == dict(config_default="config-value")
    assert parsed_config == conf


def test_help() -> None:
    """Show help eagerly, even with invalid options."""
    result = runner.invoke(app, ["table", "--help"])
    assert result.exit_code == 0
    assert "Print the resonance table" in result.output


class TestExpand:
    """List source terms."""

    def test_snap(self) -> None:
        """Print rational coefficients of a single 1D pump."""
        result = runner.invoke(
            app, ["expand", "-p", "1D:n=1", "--snap", "8*k*F0^3*w^2"]
        )
        assert result.exit_code == 0
        rows = [line.split() for line in result.stdout.splitlines()]
        terms = [row for row in rows if row and row[0] in ("E_y", "B_z")]
        assert sorted(row[1] for row in terms if row[0] == "E_y") == ["-3", "1", "2"]
        assert sorted(row[1] for row in terms if row[0] == "B_z") == ["-1", "2", "3"]

    def test_config(self) -> None:
        """Read pump and snap reference from the configuration file."""
        result = runner.invoke(app, ["expand", "--config", str(config_file())])
        assert result.exit_code == 0
        rows = [line.split() for line in result.stdout.splitlines()]
        terms = [row for row in rows if row and row[0] in ("E_y", "B_z")]
        assert len(terms) == 6
        assert sorted(row[1] for row in terms if row[0] == "E_y") == ["-3", "1", "2"]

    def test_out(self, tmp_path: Path, monkeypatch: MonkeyPatch) -> None:
        """Write terms and a reproducible manifest."""
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        out = tmp_path / "terms.json"
        result = runner.invoke(app, ["expand", "-p", "1D:n=1", "-o", str(out)])
        assert result.exit_code == 0
        document = json.loads(out.read_text(encoding="utf-8"))
        manifest = document["manifest"]
        assert manifest["command"] == "expand"
        assert manifest["version"] == __version__
        assert manifest["timestamp"] == "1970-01-01T00:00:00+00:00"
        assert manifest["inputs"]["pump"] == ["1D:n=1"]
        assert "out" not in manifest["inputs"]
        assert len(document["terms"]) == 6
        assert {t["component"] for t in document["terms"]} == {"E_y", "B_z"}

    def test_no_terms(self) -> None:
        """Print nothing without coupling."""
        result = runner.invoke(app, ["expand", "-p", "1D:n=1", "--kappa", "0"])
        assert result.exit_code == 0
        assert not [line for line in result.stdout.splitlines() if "E_" in line]


class TestTable:
    """Print resonance tables."""

    def test_recipe(self) -> None:
        """Print the table of the single 1D pump."""
        result = runner.invoke(app, ["table", "--recipe", "table-1"])
        assert result.exit_code == 0
        assert table_1 in result.stdout

    def test_pumps(self) -> None:
        """Give geometry and pumps explicitly."""
        result = runner.invoke(app, ["table", "-g", "pi,10,10", "-p", "1D:n=1"])
        assert result.exit_code == 0
        assert table_1 in result.stdout

    def test_config(self) -> None:
        """Read the recipe from the configuration file."""
        result = runner.invoke(app, ["table", "-c", str(config_file())])
        assert result.exit_code == 0
        assert table_1 in result.stdout

    def test_pretty(self) -> None:
        """Render table with rich."""
        result = runner.invoke(app, ["table", "-r", "table-1", "--pretty"])
        assert result.exit_code == 0
        assert "ω1*, 3ω1" in result.stdout

    def test_out(self, tmp_path: Path) -> None:
        """Write report with verdict counts."""
        out = tmp_path / "nested" / "report.json"
        result = runner.invoke(app, ["table", "-r", "table-1", "-o", str(out)])
        assert result.exit_code == 0
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["manifest"]["inputs"]["recipe"] == "table-1"
        assert document["manifest"]["geometry"]["lx"] == 3.14159265358979
        assert document["report"]["verdict_counts"]["resonant"] >= 1

    @pytest.mark.parametrize(
        "args, message",
        [
            (["-r", "table-1", "-p", "TE011"], "Expected either `--pump`"),
            (["-g", "1,2", "-p", "TE011"], "Expected 3 comma-separated"),
            (["-p", "TE000"], "TE"),
            (["-p", "TE011", "-p", "TM110", "-p", "TM111"], "Expected 1 or 2"),
            (["-p", "TE011", "--kappa", "-1"], "kappa"),
        ],
    )
    def test_invalid_input(self, args, message: str) -> None:
        """Exit with code 1 and a one-line diagnostic on invalid input."""
        result = runner.invoke(app, ["table", *args])
        assert result.exit_code == 1
        lines = result.output.splitlines()
        error_lines = [line for line in lines if line.startswith("Error")]
        assert len(error_lines) == 1
        assert message in error_lines[0]


class TestGeometry:
    """Solve for resonant geometries."""

    def test_signal(self) -> None:
        """Find the resonant ratio of TE011 and TM110."""
        result = runner.invoke(
            app, ["geometry", "-p", "TE011", "-p", "TM110", "--signal", "130"]
        )
        assert result.exit_code == 0
        assert "2ω(TE011) - ω(TM110) = ω(130): 1 root(s)" in result.stdout
        assert "r = 0.4858682717" in result.stdout

    def test_config(self, tmp_path: Path) -> None:
        """Read pumps and signal from the configuration file."""
        out = tmp_path / "geometry.json"
        result = runner.invoke(
            app, ["geometry", "-c", str(config_file()), "-o", str(out)]
        )
        assert result.exit_code == 0
        (solution,) = json.loads(out.read_text(encoding="utf-8"))["solutions"]
        assert solution["signal"] == [1, 3, 0]
        assert solution["roots"][0] == pytest.approx(0.48586827175664, abs=1e-10)

    def test_all_candidates(self) -> None:
        """Solve for every candidate signal when none is given."""
        result = runner.invoke(app, ["geometry", "-p", "TE011", "-p", "TM110"])
        assert result.exit_code == 0
        for signal in ("110", "112", "130", "132"):
            assert f"ω({signal})" in result.stdout

    def test_one_pump(self) -> None:
        """Require exactly two pumps."""
        result = runner.invoke(app, ["geometry", "-p", "TE011"])
        assert result.exit_code == 1
        assert "Error: Expected 2 `--pump` option(s), got 1." in result.output


class TestSimulate:
    """Drive signal oscillators."""

    def test_recipe(self, tmp_path: Path) -> None:
        """Simulate the single 1D pump and write series."""
        out, series = tmp_path / "summary.json", tmp_path / "series"
        result = runner.invoke(
            app,
            [
                "simulate",
                "-r",
                "table-1",
                "--cycles",
                "20",
                "--series",
                str(series),
                "-o",
                str(out),
            ],
        )
        assert result.exit_code == 0
        rows = [line.split() for line in result.stdout.splitlines()]
        assert ["n", "ω1*", "1", "1", "secular"] in [row[:5] for row in rows]
        summary = json.loads(out.read_text(encoding="utf-8"))["summary"]
        assert len(summary["lines"]) == 3
        assert len(list(series.iterdir())) == 3

    def test_unstable(self, monkeypatch: MonkeyPatch) -> None:
        """Exit with code 2 when the integration fails."""

        def unstable(*args, **kwargs):
            raise UnstableIntegrationError("Integration failed. Try a smaller `dt`.")

        monkeypatch.setattr("ehcavity.cli.end_to_end", unstable)
        result = runner.invoke(app, ["simulate", "-r", "table-1"])
        assert result.exit_code == 2
        assert "Error: Integration failed. Try a smaller `dt`." in result.output

    def test_invalid_cycles(self) -> None:
        """Reject runs shorter than a few periods."""
        result = runner.invoke(app, ["simulate", "-r", "table-1", "--cycles", "2"])
        assert result.exit_code == 1
        assert "cycles" in result.output


class TestSelftest:
    """Run acceptance checks."""

    def test_failure(self, monkeypatch: MonkeyPatch, tmp_path: Path) -> None:
        """Exit with code 2 when a check fails, writing the outcomes first."""

        def failing(seed: int, samples: int, progress_callback) -> SelftestReport:
            progress_callback()
            return SelftestReport(
                seed=seed,
                samples=samples,
                checks=[CheckResult(name="x", passed=False, detail="no", seconds=1.0)],
            )

        monkeypatch.setattr("ehcavity.cli.run_checks", failing)
        out = tmp_path / "selftest.json"
        result = runner.invoke(app, ["selftest", "--seed", "3", "-o", str(out)])
        assert result.exit_code == 2
        assert "FAIL x: no" in result.stdout
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["manifest"]["seed"] == 3
        assert document["selftest"]["checks"] == [
            {"name": "x", "passed": False, "detail": "no"}
        ]

    def test_success(self) -> None:
        """Print one passing line per check."""
        result = runner.invoke(app, ["selftest", "--samples", "2"])
        assert result.exit_code == 0, result.output
        assert "PASS resonant-geometry" in result.stdout
        assert "FAIL" not in result.stdout


def test_main__usage_error(
    monkeypatch: MonkeyPatch, capsys: CaptureFixture[str]
) -> None:
    """Exit with code 1 on unknown options."""
    monkeypatch.setattr(sys, "argv", ["ehcavity", "table", "--unknown"])
    with pytest.raises(SystemExit) as exit_info:
        main()
    assert exit_info.value.code == 1
    assert "Error: No such option: --unknown" in capsys.readouterr().err


def test_main__error_code(monkeypatch: MonkeyPatch) -> None:
    """Propagate exit codes of commands."""
    monkeypatch.setattr(sys, "argv", ["ehcavity", "table", "-p", "TE000"])
    with pytest.raises(SystemExit) as exit_info:
        main()
    assert exit_info.value.code == 1


def test_main__declared_dependencies() -> None:
    """Declare the third-party packages imported by the CLI."""
    root = Path(__file__).parents[1]
    with open(root / "pyproject.toml", "rb") as f:
        declared = {n.lower() for n in tomli.load(f)["tool"]["poetry"]["dependencies"]}
    source = (root / "ehcavity" / "cli.py").read_text(encoding="utf-8")
    imported = set(re.findall(r"^(?:import|from) (\w+)", source, flags=re.MULTILINE))
    third_party = {"click", "typer", "rich", "pydantic", "tomli", "numpy", "scipy"}
    assert "click" in imported
    assert imported & third_party <= declared
