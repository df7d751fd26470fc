# packages/second_order_regularity/src/second_order_regularity/io/matrix_file.py

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
Plain-text dense matrix files.

Format::

    3
    2 -1 0
    -1 2+0.5j -1
    0 -1 2

Line 1 holds the dimension ``n``; then ``n`` lines of ``n`` whitespace-separated
entries written ``re``, ``re+imj`` or ``re-imj``. Blank lines and lines starting
with ``#`` are ignored.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.utils.errors import MatrixFormatError

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def parse_complex(token: object) -> complex:
    """
    Parse one complex entry.

    Accepts numbers, ``[re, im]`` pairs and strings such as ``"1"``, ``"1.5-2j"``,
    ``"-3e-2+1e-1j"``.

    Raises
    ------
    ValueError
        If the token cannot be read as a finite complex number.
    """
    if isinstance(token, complex):
        value = token
    elif isinstance(token, (int, float)) and not isinstance(token, bool):
        value = complex(token)
    elif isinstance(token, (list, tuple)) and len(token) == 2:
        value = complex(float(token[0]), float(token[1]))
    elif isinstance(token, str):
        value = complex(token.strip().replace(" ", "").replace("i", "j"))
    else:
        raise ValueError(f"Cannot read {token!r} as a complex number")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"Non-finite entry {token!r}")
    return value


def format_complex(value: complex) -> str:
    """Round-trip exact text form of ``value`` (``re`` when the imaginary part is zero)."""
    value = complex(value)
    if value.imag == 0.0:
        return repr(value.real)
    sign = "-" if math.copysign(1.0, value.imag) < 0 else "+"
    return f"{value.real!r}{sign}{abs(value.imag)!r}j"


def read_matrix_file(path: str | Path) -> np.ndarray:
    """
    Read a square complex matrix from the documented text format.

    Parameters
    ----------
    path : str | Path
        File to read.

    Returns
    -------
    np.ndarray
        ``(n, n)`` complex array.

    Raises
    ------
    MatrixFormatError
        On a missing file, bad header, wrong shape or unreadable entry.
    """
    p = Path(path)
    try:
        raw = p.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise MatrixFormatError(f"Cannot read matrix file {p}: {e}") from e

    lines = [ln.strip() for ln in raw if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFormatError(f"{p}: empty matrix file")

    try:
        n = int(lines[0])
    except ValueError as e:
        raise MatrixFormatError(f"{p}: first line must be the dimension, got {lines[0]!r}") from e
    if n < 1:
        raise MatrixFormatError(f"{p}: dimension must be >= 1, got {n}")
    if len(lines) - 1 != n:
        raise MatrixFormatError(f"{p}: expected {n} rows, found {len(lines) - 1}")

    out = np.empty((n, n), dtype=complex)
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != n:
            raise MatrixFormatError(f"{p}: row {i + 1} has {len(tokens)} entries, expected {n}")
        for j, tok in enumerate(tokens):
            try:
                out[i, j] = parse_complex(tok)
            except ValueError as e:
                raise MatrixFormatError(f"{p}: row {i + 1}, column {j + 1}: {e}") from e
    return out


def write_matrix_file(path: str | Path, entries: np.ndarray) -> Path:
    """
    Write a square matrix in the documented text format.

    Parameters
    ----------
    path : str | Path
        Destination file; parent folders are created.
    entries : np.ndarray
        Square matrix.

    Returns
    -------
    Path
        The written path.
    """
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixFormatError(f"Matrix must be square, got shape {arr.shape}")
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    rows = [" ".join(format_complex(v) for v in row) for row in arr]
    p.write_text("\n".join([str(arr.shape[0]), *rows]) + "\n", encoding="utf-8")
    return p
