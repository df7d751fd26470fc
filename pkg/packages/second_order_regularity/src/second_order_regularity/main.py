# packages/second_order_regularity/src/second_order_regularity/main.py

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
Main entry point for the ``parab2`` command line.

    parab2 <check|solve|sweep|norms> --config <path> [--out <dir>] [--verbose]

Loads ``PARAB2_*`` settings from a ``.env`` file at the repository root, sets
up the run logger and hands over to :func:`second_order_regularity.runner.run`.

Typically invoked through the CLI command: `parab2` or `sor`.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import sys
from typing import Sequence

from dotenv import load_dotenv

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from parab2_common.paths import repo_root
from second_order_regularity.io.cli import parse_args
from second_order_regularity.io.emit import to_json_text
from second_order_regularity.runner import run
from second_order_regularity.utils.errors import ConfigError, EXIT_CONFIG
from second_order_regularity.utils.logging import log_msg, setup_logger

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def main(argv: Sequence[str] | None = None) -> None:
    """
    Entry point for the ``parab2`` CLI.

    1. Loads ``.env`` (existing environment variables win).
    2. Parses the command line; usage errors exit with code 4.
    3. Initializes the run logger under ``log_dir()/second_order_regularity``.
    4. Runs the command and exits with its code.
    """
    load_dotenv(repo_root() / ".env", override=False)

    try:
        args = parse_args(argv)
    except ConfigError as e:
        sys.stderr.write(to_json_text({"command": None, "error": type(e).__name__, "message": str(e), "exit_code": EXIT_CONFIG}))
        sys.exit(EXIT_CONFIG)

    logger = setup_logger(command=args.command, verbose=args.verbose)
    try:
        code = run(args.command, args.config, args.out, logger=logger, verbose=args.verbose)
    except Exception as e:
        # run() maps its own errors; this only catches failures in that mapping
        log_msg(f"Critical error: {e}", logger, level="exception", echo_console=True, force=True)
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
