"""Configuration discovery and `[tool.ehcavity.<command>]` tables."""
from pathlib import Path
from typing import Any, Dict, Optional

import tomli
from git import InvalidGitRepositoryError, NoSuchPathError, Repo

from ehcavity.common import find_obj
from ehcavity.logging import get_logger

TOML_CONFIG_FILE = "pyproject.toml"
TOOL_TABLE = "ehcavity"

ConfigFields = Dict[str, Any]

logger = get_logger(__file__)


def get_repo_root(path: Path) -> Optional[Path]:
    """Find git repository root of `path` (if inside a repository)."""
    try:
        repo = Repo(path=path, search_parent_directories=True)
    except (InvalidGitRepositoryError, NoSuchPathError):
        logger.debug(f"No git repository found from {path}.")
        return None
    return Path(repo.working_dir) if repo.working_dir is not None else None


def get_config(
    start: Optional[Path] = None, config_filename: str = TOML_CONFIG_FILE
) -> Optional[Path]:
    """
    Find configuration file from the working directory upwards.

    The search stops at the repository root, or at the file system anchor when `start`
     is not inside a git repository.
    :param start: Directory to search from (defaults to current working directory)
    :param config_filename: Name of configuration file
    :return: Configuration file path, if any
    """
    start = (start or Path.cwd()).resolve()
    repo_root = get_repo_root(start)
    return find_obj(
        obj_name=config_filename,
        start=repo_root if repo_root is not None else Path(start.anchor),
        finish=start,
    )


def read_config(config_path: Path, command: str) -> ConfigFields:
    """
    Read the `[tool.ehcavity.<command>]` table of a configuration file.

    :param config_path: TOML file path
    :param command: CLI command name
    :return: Option names (with dashes replaced by underscores) and values
    """
    with config_path.open("rb") as f:
        conf = tomli.load(f).get("tool", {}).get(TOOL_TABLE, {}).get(command, {})
    return {k.replace("-", "_"): v for k, v in conf.items()}
