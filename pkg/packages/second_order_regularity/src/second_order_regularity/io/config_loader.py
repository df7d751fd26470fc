# packages/second_order_regularity/src/second_order_regularity/io/config_loader.py

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

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import json
from pathlib import Path

import yaml

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from parab2_common.paths import config_dir, resolve_under
from second_order_regularity.utils.data_validation import Config, validate_config
from second_order_regularity.utils.errors import ConfigError

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

YAML_SUFFIXES = (".yaml", ".yml")

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def load_and_validate_config(path: str | Path, command: str) -> tuple[Config, Path]:
    """
    Load a JSON or YAML config and validate it for ``command``.

    Parameters
    ----------
    path : str | Path
        Config file; relative paths resolve against ``parab2_common.paths.config_dir()``
        when they do not exist relative to the working directory.
    command : str
        CLI command.

    Returns
    -------
    tuple[Config, Path]
        Validated config and the resolved file path (its folder anchors
        relative ``matrix_file`` paths).

    Raises
    ------
    ConfigError
        Missing file, parse error or schema violation.
    """
    cfg_path = _resolve_config_path(path)
    return validate_config(load_config(cfg_path), command), cfg_path


def load_config(file_path: str | Path) -> object:
    """Parse a config file without validation."""
    p = Path(file_path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {p}: {e}") from e
    try:
        if p.suffix.lower() in YAML_SUFFIXES:
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Malformed config {p}: {e}") from e


def _resolve_config_path(path: str | Path) -> Path:
    """Resolve ``path`` as given, else under ``config_dir()``."""
    p = Path(path).expanduser()
    if p.exists():
        return p.resolve()
    resolved = resolve_under(config_dir(), p)
    if not resolved.exists():
        raise ConfigError(f"Configuration file not found: {path}")
    return resolved
