# packages/second_order_regularity/src/second_order_regularity/solvers/timestep.py

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

import warnings

import numpy as np
import scipy.linalg as sla

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.analysis.norms import SampledPath
from second_order_regularity.operators.core import SINGULAR_RTOL, Operator
from second_order_regularity.utils.errors import SingularSystemError

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def _as_vector(v: np.ndarray | None, n: int, name: str) -> np.ndarray:
    if v is None:
        return np.zeros(n, dtype=complex)
    arr = np.asarray(v, dtype=complex).ravel()
    if arr.size != n:
        raise ValueError(f"{name} has length {arr.size}, expected {n}")
    return arr


def timestep_oracle(
        A: Operator,
        B: Operator,
        f: SampledPath,
        u0: np.ndarray | None = None,
        u1: np.ndarray | None = None,
        *,
        return_velocity: bool = False,
        ) -> SampledPath | tuple[SampledPath, SampledPath]:
    """
    Crank–Nicolson reference solution of ``ü + Bů + Au = f``, ``u(0) = u0``, ``ů(0) = u1``.

    The state ``v = (u, ů)`` obeys ``v̇ = Mv + (0, f)`` with ``M = [[0, I], [−A, −B]]``;
    the step matrix ``I − (Δt/2)M`` is factorised once.

    Parameters
    ----------
    A, B : Operator
        Coefficients (any square matrices of the same size).
    f : SampledPath
        Forcing on the output grid.
    u0, u1 : np.ndarray | None
        Initial data, zero when omitted.
    return_velocity : bool
        Also return ``ů`` from the state.

    Returns
    -------
    SampledPath or tuple[SampledPath, SampledPath]
        ``u`` (and ``ů``).

    Raises
    ------
    SingularSystemError
        If the step matrix is singular.
    """
    n = A.dim
    if B.dim != n or f.dim != n:
        raise ValueError("A, B and f must share a dimension")
    x0 = _as_vector(u0, n, "u0")
    x1 = _as_vector(u1, n, "u1")

    dt = f.dt
    eye = np.eye(n)
    M = np.block([[np.zeros((n, n)), eye], [-A.entries, -B.entries]])
    lhs = np.eye(2 * n) - 0.5 * dt * M
    rhs = np.eye(2 * n) + 0.5 * dt * M

    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu, piv = sla.lu_factor(lhs)
        except (sla.LinAlgError, sla.LinAlgWarning) as e:
            raise SingularSystemError(f"Crank–Nicolson step matrix is singular: {e}") from e
    if np.abs(np.diag(lu)).min() <= SINGULAR_RTOL * np.abs(lhs).max():
        raise SingularSystemError("Crank–Nicolson step matrix is singular")

    F = np.zeros((f.N, 2 * n), dtype=complex)
    F[:, n:] = f.values
    V = np.empty((f.N, 2 * n), dtype=complex)
    V[0, :n] = x0
    V[0, n:] = x1
    for k in range(f.N - 1):
        V[k + 1] = sla.lu_solve((lu, piv), rhs @ V[k] + 0.5 * dt * (F[k] + F[k + 1]))

    u = f.with_values(V[:, :n], label="u")
    if return_velocity:
        return u, f.with_values(V[:, n:], label="du")
    return u
