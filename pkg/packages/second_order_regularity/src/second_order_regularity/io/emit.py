# packages/second_order_regularity/src/second_order_regularity/io/emit.py

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
Artifact writers.

Output is byte-stable for identical input: field order is the order of the
report's ``to_dict``, floats carry 17 significant digits, complex numbers are
written as ``[re, im]`` and non-finite floats as ``Infinity``/``NaN`` (which
``json.loads`` reads back).
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

FLOAT_FORMAT = "%.17g"
INDENT = "  "

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def _float_token(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj: Any, level: int) -> str:
    pad = INDENT * (level + 1)
    end = INDENT * level
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_token(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return f"[{_float_token(z.real)}, {_float_token(z.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Path):
        return json.dumps(obj.as_posix(), ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(f"{pad}{_encode(v, level + 1)}" for v in seq) + "\n" + end + "]"
    raise TypeError(f"Cannot serialise {type(obj).__name__}")


def to_json_text(obj: Any) -> str:
    """Deterministic JSON text for a report mapping (trailing newline included)."""
    return _encode(obj, 0) + "\n"


def emit(report: Any, fmt: Literal["json", "csv"], path: str | Path) -> Path:
    """
    Write ``report`` as JSON or CSV.

    Parameters
    ----------
    report : Any
        An object with ``to_dict()`` (JSON) or ``to_frame()`` (CSV), a mapping, or a DataFrame.
    fmt : {"json", "csv"}
        Output format.
    path : str | Path
        Destination; parent folders are created.

    Returns
    -------
    Path
        The written file.
    """
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = report.to_dict() if hasattr(report, "to_dict") and not isinstance(report, (dict, pd.DataFrame)) else report
        if isinstance(payload, pd.DataFrame):
            payload = payload.to_dict(orient="list")
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(to_json_text(payload))
    elif fmt == "csv":
        frame = report if isinstance(report, pd.DataFrame) else report.to_frame()
        frame.to_csv(p, float_format=FLOAT_FORMAT, lineterminator="\n", index=False)
    else:
        raise ValueError(f"Unknown format {fmt!r}; expected 'json' or 'csv'")
    return p


def read_json(path: str | Path) -> Any:
    """Parse an artifact written by :func:`emit`."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
