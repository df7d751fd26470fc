# packages/second_order_regularity/src/second_order_regularity/io/cli.py

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

import argparse
from typing import Sequence

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.utils.data_validation import COMMANDS
from second_order_regularity.utils.errors import ConfigError

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


class _ConfigErrorParser(argparse.ArgumentParser):
    """Usage errors exit through the config-error path (exit 4), not argparse's exit 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _ConfigErrorParser(
        prog="parab2",
        description="Certify and measure maximal regularity of ü + Bů + Au = f from a config file.",
    )
    p.add_argument("command", choices=COMMANDS, help="What to run.")
    p.add_argument("--config", required=True, help="Path to a JSON or YAML config file.")
    p.add_argument(
        "--out",
        default=None,
        help="Output directory. Defaults to the config's output_dir, then <data_dir>/<command>.",
    )
    p.add_argument("--verbose", action="store_true", help="Also echo log messages to the console.")
    return p


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Parameters
    ----------
    argv : Sequence[str] | None
        Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns
    -------
    argparse.Namespace
        ``command``, ``config``, ``out`` and ``verbose``.
    """
    return build_parser().parse_args(argv)
