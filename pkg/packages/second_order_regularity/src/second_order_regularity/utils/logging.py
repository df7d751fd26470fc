# packages/second_order_regularity/src/second_order_regularity/utils/logging.py

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

import datetime
import logging
from pathlib import Path
from typing import Mapping

from tqdm import tqdm

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from parab2_common.paths import log_dir

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

LOGGER_NAME = "parab2"
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"
PACKAGE_LOG_SUBDIR = "second_order_regularity"

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def setup_logger(
        save_dir: str | Path | None = None,
        command: str = "run",
        verbose: bool = False,
        ) -> logging.Logger:
    """
    Initialize and return the run logger.

    Logs are written to ``<log_dir>/second_order_regularity`` by default, one
    file per run named ``run_<command>_<timestamp>.log``. Console output is
    handled by :func:`log_msg`, not by a stream handler.

    Parameters
    ----------
    save_dir : str | Path | None, optional
        Directory for the log file. Defaults to ``log_dir()/second_order_regularity``.
    command : str, optional
        CLI command, used in the file name.
    verbose : bool, optional
        Recorded on the logger so helpers can default their console echo.

    Returns
    -------
    logging.Logger
        Configured logger instance.
    """
    base_dir = Path(save_dir) if save_dir else log_dir(create=True) / PACKAGE_LOG_SUBDIR
    base_dir.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
    log_path = base_dir / f"run_{command}_{timestamp}.log"

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    for h in list(logger.handlers):
        logger.removeHandler(h)
        h.close()

    fh = logging.FileHandler(log_path, encoding="utf-8")
    fh.setLevel(logging.DEBUG)
    fh.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(fh)

    logger.verbose = verbose  # type: ignore[attr-defined]
    return logger


def log_msg(
        msg: str,
        logger: logging.Logger | None,
        *,
        level: str = "info",
        echo_console: bool = False,
        force: bool = False,
        ) -> None:
    """
    Unified logging utility.

    - Logs through ``logger`` when one is given.
    - Optionally echoes to the console via ``tqdm.write`` so progress bars stay intact.

    Parameters
    ----------
    msg : str
        Message text.
    logger : logging.Logger | None
        Target logger. ``None`` turns the call into a console echo only.
    level : str
        Logger method name: ``debug``, ``info``, ``warning``, ``error`` or ``exception``.
    echo_console : bool
        Print to console when True (verbose mode).
    force : bool
        Print to console regardless of ``echo_console`` (summaries and errors).
    """
    if logger is not None:
        log_fn = getattr(logger, level, logger.info)
        log_fn(msg)

    if force or echo_console:
        tqdm.write(s=msg)


def log_banner(
        title: str,
        logger: logging.Logger | None,
        *,
        echo_console: bool = False,
        char: str = "=",
        width: int = 60,
        ) -> None:
    """Log ``title`` between two rules of ``char``."""
    log_msg(char * width, logger, echo_console=echo_console)
    log_msg(title, logger, echo_console=echo_console, force=True)
    log_msg(char * width, logger, echo_console=echo_console)


def log_mapping(
        header: str,
        values: Mapping[str, object],
        logger: logging.Logger | None,
        *,
        echo_console: bool = False,
        ) -> None:
    """Log a header followed by one tab-indented ``key : value`` line per entry."""
    log_msg(header, logger, echo_console=echo_console)
    width = max((len(k) for k in values), default=0)
    for key, value in values.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        log_msg(f"\t{key:<{width}} : {value}", logger, echo_console=echo_console)
