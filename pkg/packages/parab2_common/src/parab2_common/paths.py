# packages/parab2_common/src/parab2_common/paths.py

# =============================================================================
# Copyright © {2025} The parab2 authors
# SPDX-License-Identifier: AGPL-3.0-or-later
# =============================================================================
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# If you did not receive a copy of the GNU Affero General Public License
# along with this program, see <https://www.gnu.org/licenses/>.
# =============================================================================

"""
Filesystem layout helpers shared by the parab2 packages.

Every directory helper resolves, in order, a ``PARAB2_*`` environment
variable, a folder under the repository root, and finally ``~/.parab2``.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

# N/A

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

ENV_PREFIX = "PARAB2_"
HOME_FALLBACK = Path.home() / ".parab2"

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def _looks_like_repo_root(p: Path) -> bool:
    """
    Heuristic check for the monorepo root: a ``pyproject.toml`` next to a
    ``packages/`` folder, or a ``.git`` folder next to ``packages/``.

    Parameters
    ----------
    p : Path
        Candidate directory.

    Returns
    -------
    bool
        True if ``p`` looks like the repository root.
    """
    try:
        names = {e.name for e in p.iterdir()}
    except OSError:
        return False
    if {"pyproject.toml", "packages"} <= names:
        return True
    return ".git" in names and "packages" in names


def _search_upwards(start: Path) -> Optional[Path]:
    """Walk up from ``start`` and return the first directory that looks like the repo root."""
    start = start.resolve()
    for parent in (start, *start.parents):
        if _looks_like_repo_root(parent):
            return parent
    return None


@lru_cache(maxsize=1)
def repo_root() -> Path:
    """
    Return the repository root.

    Search order:
        1. ``PARAB2_REPO_ROOT`` environment variable
        2. upward from this file (editable installs)
        3. upward from the current working directory
        4. ``~/.parab2``

    Returns
    -------
    Path
        Absolute path of the repository root.
    """
    env = os.getenv(f"{ENV_PREFIX}REPO_ROOT")
    if env:
        return Path(env).expanduser().resolve()

    found = _search_upwards(Path(__file__).resolve())
    if found:
        return found

    found = _search_upwards(Path.cwd())
    if found:
        return found

    return HOME_FALLBACK.resolve()


def _env_or_default(
        env_name: str,
        default_rel: str
        ) -> Path:
    """
    Resolve a directory from an environment variable, else ``<repo_root>/<default_rel>``.

    Parameters
    ----------
    env_name : str
        Environment variable name, without the ``PARAB2_`` prefix.
    default_rel : str
        Folder relative to the repository root.

    Returns
    -------
    Path
        Resolved directory.
    """
    v = os.getenv(f"{ENV_PREFIX}{env_name}")
    if v:
        return Path(v).expanduser().resolve()
    return (repo_root() / default_rel).resolve()


def _maybe_create(p: Path, create: bool) -> Path:
    if create:
        p.mkdir(parents=True, exist_ok=True)
    return p


def data_dir(create: bool = False) -> Path:
    """
    Return the artifact directory (``PARAB2_DATA_DIR`` or ``<repo_root>/data``).

    Run outputs land in ``data_dir()/<command>`` unless ``--out`` is given.
    """
    return _maybe_create(_env_or_default("DATA_DIR", "data"), create)


def config_dir(create: bool = False) -> Path:
    """Return the configuration directory (``PARAB2_CONFIG_DIR`` or ``<repo_root>/configs``)."""
    return _maybe_create(_env_or_default("CONFIG_DIR", "configs"), create)


def cache_dir(create: bool = False) -> Path:
    """Return the cache directory (``PARAB2_CACHE_DIR`` or ``<repo_root>/.cache``)."""
    return _maybe_create(_env_or_default("CACHE_DIR", ".cache"), create)


def log_dir(create: bool = False) -> Path:
    """
    Return the log directory (``PARAB2_LOG_DIR`` or ``<repo_root>/logs``).

    Parameters
    ----------
    create : bool
        Whether to create the directory if it doesn't exist.

    Returns
    -------
    Path
        Path to the log directory.
    """
    return _maybe_create(_env_or_default("LOG_DIR", "logs"), create)


def ensure_dirs() -> None:
    """Create the data, cache and log directories if missing."""
    for d in (data_dir(), cache_dir(), log_dir()):
        d.mkdir(parents=True, exist_ok=True)


def resolve_under(
        base: Path,
        maybe_rel: str | Path
        ) -> Path:
    """
    Resolve ``maybe_rel`` against ``base`` unless it is already absolute.

    Parameters
    ----------
    base : Path
        Base directory for relative paths.
    maybe_rel : str | Path
        Path to resolve.

    Returns
    -------
    Path
        Resolved absolute path.
    """
    p = Path(maybe_rel).expanduser()
    return p if p.is_absolute() else (base / p).resolve()


def find_config(
        filename: str,
        subdir: str | None = None
        ) -> Path:
    """
    Locate a configuration file across the standard locations.

    Search order:
        1. ``config_dir()[/subdir]/``
        2. ``~/.parab2/configs[/subdir]/``

    e.g. >>> find_config("scalar_calibration.json", subdir="solve")

    Parameters
    ----------
    filename : str
        Name of the config file.
    subdir : str | None
        Optional subdirectory under ``configs/``, usually the command name.

    Returns
    -------
    Path
        Resolved path to the config file.

    Raises
    ------
    FileNotFoundError
        If no candidate exists.
    """
    candidates = []
    for base in (config_dir(), HOME_FALLBACK / "configs"):
        if subdir:
            candidates.append(base / subdir / filename)
        candidates.append(base / filename)

    for c in candidates:
        if c.exists():
            return c.resolve()
    raise FileNotFoundError("Config not found. Tried: " + ", ".join(str(c) for c in candidates))
