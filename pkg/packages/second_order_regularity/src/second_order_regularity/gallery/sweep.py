# packages/second_order_regularity/src/second_order_regularity/gallery/sweep.py

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

import itertools
import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.analysis.pencil import (
    DEFAULT_ANGULAR_COUNT,
    DEFAULT_RADIAL_COUNT,
    PencilSymbol,
    SectorGrid,
    certify_failure,
    predict_parabolic_angle,
)
from second_order_regularity.operators.core import Operator
from second_order_regularity.utils.errors import UnsupportedParametersError
from second_order_regularity.utils.logging import log_msg
from second_order_regularity.utils.parallel import map_ordered

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

DEFAULT_MARGIN = 0.05
SWEEP_COLUMNS = [
    "eps", "alpha", "phi", "predicted", "certified", "certified_failure", "sup_H", "sup_l2H", "sup_lBH", "sup_AH",
]

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def rotated_scalar_pencil(eps: float, alpha: float, phi: float) -> PencilSymbol:
    """``A = [e^{iφ}]``, ``B = [α·e^{iεφ}]``: a scalar with sectoriality angle ``φ`` and damping ``α·A^ε``."""
    a = complex(math.cos(phi), math.sin(phi))
    b = alpha * complex(math.cos(eps * phi), math.sin(eps * phi))
    return PencilSymbol(Operator(np.array([[a]]), f"e^(i{phi})"), Operator(np.array([[b]]), f"{alpha}*e^(i{eps * phi})"))


def _predicted(eps: float, alpha: float, phi: float) -> bool:
    try:
        return phi < predict_parabolic_angle(eps, alpha)
    except UnsupportedParametersError:
        return False


def sweep_row(
        eps: float,
        alpha: float,
        phi: float,
        *,
        margin: float = DEFAULT_MARGIN,
        radial_count: int = DEFAULT_RADIAL_COUNT,
        angular_count: int = DEFAULT_ANGULAR_COUNT,
        ) -> dict:
    """One phase-diagram row, certified at ``φ₂ = π/2 + margin``."""
    pencil = rotated_scalar_pencil(eps, alpha, phi)
    phi2 = math.pi / 2 + margin
    grid = SectorGrid.for_operator(pencil.A, phi2, radial_count=radial_count, angular_count=angular_count)
    report = certify_failure(pencil, phi2, grid, max_workers=1)
    return {
        "eps": float(eps),
        "alpha": float(alpha),
        "phi": float(phi),
        "predicted": _predicted(eps, alpha, phi),
        "certified": report.passes,
        # False on a pass and on a failure that refinement did not confirm
        "certified_failure": bool(report.certified_failure),
        "sup_H": report.sup_H,
        "sup_l2H": report.sup_l2H,
        "sup_lBH": report.sup_lBH,
        "sup_AH": report.sup_AH,
    }


def sweep(
        eps_grid: Sequence[float],
        alpha_grid: Sequence[float],
        phi_grid: Sequence[float],
        *,
        margin: float = DEFAULT_MARGIN,
        radial_count: int = DEFAULT_RADIAL_COUNT,
        angular_count: int = DEFAULT_ANGULAR_COUNT,
        threads: int | None = None,
        logger: logging.Logger | None = None,
        progress: bool = False,
        ) -> pd.DataFrame:
    """
    Map the ``(ε, α, φ)`` phase diagram on rotated scalar pencils.

    Rows are evaluated concurrently and returned ε-major, then α, then φ.

    Parameters
    ----------
    eps_grid, alpha_grid, phi_grid : Sequence[float]
        Non-empty parameter grids.
    margin : float
        ``φ₂ = π/2 + margin``.
    radial_count, angular_count : int
        Sector grid resolution per row.
    threads : int | None
        Pool size request, capped by ``PARAB2_THREADS``.
    logger : logging.Logger | None
        Receives a summary line.
    progress : bool
        Show a tqdm bar.

    Returns
    -------
    pd.DataFrame
        Columns ``eps, alpha, phi, predicted, certified, certified_failure, sup_H, sup_l2H, sup_lBH, sup_AH``.
        ``certified_failure`` is true only for failures that persist on the refined grid.
    """
    if not (len(eps_grid) and len(alpha_grid) and len(phi_grid)):
        raise ValueError("eps, alpha and phi grids must be non-empty")
    if not 0.0 < margin < math.pi / 2:
        raise ValueError(f"margin must lie in (0, π/2), got {margin}")

    triples = list(itertools.product(eps_grid, alpha_grid, phi_grid))
    rows = map_ordered(
        lambda p: sweep_row(*p, margin=margin, radial_count=radial_count, angular_count=angular_count),
        triples,
        max_workers=threads,
        progress=progress,
        desc="sweep",
    )
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    disagree = int((table["predicted"] != table["certified"]).sum())
    log_msg(f"Sweep finished: {len(table)} rows, {disagree} predicted/certified disagreements", logger)
    unconfirmed = int((~table["certified"] & ~table["certified_failure"]).sum())
    if unconfirmed:
        log_msg(f"{unconfirmed} sweep failures were not confirmed by refinement", logger, level="warning")
    return table
