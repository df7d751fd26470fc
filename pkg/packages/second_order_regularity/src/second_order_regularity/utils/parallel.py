# packages/second_order_regularity/src/second_order_regularity/utils/parallel.py

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
Thread-pool helpers.

Work is split into independent items, submitted to a ``ThreadPoolExecutor``
and collected with ``as_completed``; results are stored by submission index
so the caller always reduces in a fixed order.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, Sequence, TypeVar

from tqdm import tqdm

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.utils.errors import ConfigError

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

THREADS_ENV = "PARAB2_THREADS"
DEFAULT_MAX_THREADS = 8

T = TypeVar("T")
R = TypeVar("R")

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def thread_count(requested: int | None = None) -> int:
    """
    Number of worker threads to use.

    ``PARAB2_THREADS`` caps every pool; without it the cap is
    ``min(8, os.cpu_count())``.

    Parameters
    ----------
    requested : int | None
        Caller preference, clipped to the cap.

    Returns
    -------
    int
        A positive thread count.

    Raises
    ------
    ConfigError
        If ``PARAB2_THREADS`` is set but not a positive integer.
    """
    raw = os.getenv(THREADS_ENV)
    if raw is not None and raw.strip() != "":
        try:
            cap = int(raw)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from e
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    else:
        cap = min(DEFAULT_MAX_THREADS, os.cpu_count() or 1)
    if requested is None:
        return cap
    return max(1, min(int(requested), cap))


def chunk_slices(total: int, chunks: int) -> list[slice]:
    """Split ``range(total)`` into at most ``chunks`` contiguous slices, in order."""
    chunks = max(1, min(chunks, total)) if total > 0 else 1
    bounds = [round(i * total / chunks) for i in range(chunks + 1)]
    return [slice(bounds[i], bounds[i + 1]) for i in range(chunks) if bounds[i + 1] > bounds[i]]


def map_ordered(
        fn: Callable[[T], R],
        items: Sequence[T] | Iterable[T],
        *,
        max_workers: int | None = None,
        progress: bool = False,
        desc: str | None = None,
        ) -> list[R]:
    """
    Apply ``fn`` to every item, possibly concurrently, returning results in input order.

    Parameters
    ----------
    fn : Callable
        Pure function of one item.
    items : Sequence
        Work items.
    max_workers : int | None
        Requested pool size, capped by :func:`thread_count`.
    progress : bool
        Show a tqdm progress bar.
    desc : str | None
        Progress bar label.

    Returns
    -------
    list
        ``[fn(item) for item in items]``.
    """
    items = list(items)
    workers = thread_count(max_workers)
    if workers == 1 or len(items) <= 1:
        iterator = tqdm(items, desc=desc, disable=not progress)
        return [fn(item) for item in iterator]

    results: list = [None] * len(items)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): idx for idx, item in enumerate(items)}
        for fut in tqdm(as_completed(futures), total=len(futures), desc=desc, disable=not progress):
            results[futures[fut]] = fut.result()
    return results
