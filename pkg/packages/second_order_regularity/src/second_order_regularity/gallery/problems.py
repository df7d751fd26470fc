# packages/second_order_regularity/src/second_order_regularity/gallery/problems.py

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
Prebuilt damped wave problems.

- ``strong_damping``: ``A = −Δ_h``, ``B = α·A``.
- ``strong_damping_drift``: ``A = E``, ``B = α·E`` with ``E`` a non-symmetric
  elliptic operator (diffusion, drift, potential).
- ``intermediate_damping``: ``A = Δ_h²``, ``B = α·A^{1/2}``.
- ``scalar`` / ``scalar(a)``: ``A = [a]``, ``B = α·[a]^{1/2}``.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Literal

import numpy as np

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.analysis.norms import SampledPath
from second_order_regularity.analysis.pencil import PencilSymbol, predict_parabolic_angle
from second_order_regularity.io.matrix_file import parse_complex
from second_order_regularity.operators.core import (
    Operator,
    elliptic_matrix,
    fractional_power,
    laplacian_matrix,
    sector_angle,
)
from second_order_regularity.solvers.ivp import CauchyProblem
from second_order_regularity.utils.errors import ConfigError, UnsupportedParametersError

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

GALLERY_NAMES = ("strong_damping", "strong_damping_drift", "intermediate_damping", "scalar")
_SCALAR_RE = re.compile(r"^scalar(?:\((?P<a>[^)]*)\))?$")

Forcing = Literal["smooth", "rough"]

# ----------------------------------------------
# DOMAIN TYPES
# ----------------------------------------------


@dataclass(frozen=True, eq=False)
class GalleryInstance:
    name: str
    problem: CauchyProblem
    pencil: PencilSymbol
    eps: float
    alpha: float
    theta: float
    expected_admissible: bool
    forcing: Forcing

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.problem.dim,
            "T": self.problem.T,
            "N": self.problem.N,
            "eps": self.eps,
            "alpha": self.alpha,
            "theta": self.theta,
            "forcing": self.forcing,
            "expected_admissible": self.expected_admissible,
        }


# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def spatial_profile(n: int) -> np.ndarray:
    """``sin(π x_i)`` at the interior nodes ``x_i = i/(n+1)``."""
    x = np.arange(1, n + 1) / (n + 1)
    return np.sin(math.pi * x)


def forcing_path(
        kind: Forcing,
        profile: np.ndarray,
        T: float,
        N: int,
        theta: float,
        ) -> SampledPath:
    """
    ``smooth``: ``t²·profile``. ``rough``: ``(|t − T/2|^θ − (T/2)^θ)·profile``,
    Hölder-``θ`` and no better, with zero trace.
    """
    t = np.linspace(0.0, T, N)
    match kind:
        case "smooth":
            s = t**2
        case "rough":
            r = np.abs(t - T / 2) ** theta
            # r[0] = (T/2)^θ from the same kernel, so s[0] is exactly 0
            s = r - r[0]
        case _:
            raise ConfigError(f"Unknown forcing {kind!r}; expected 'smooth' or 'rough'")
    return SampledPath(T, s[:, None] * profile[None, :], label=f"f_{kind}")


def _expected_admissible(A: Operator, eps: float, alpha: float) -> bool:
    try:
        return sector_angle(A) < predict_parabolic_angle(eps, alpha)
    except UnsupportedParametersError:
        return False


def _parse_name(name: str) -> tuple[str, complex | None]:
    m = _SCALAR_RE.match(name.strip())
    if m:
        raw = m.group("a")
        try:
            return "scalar", (parse_complex(raw) if raw else 1.0 + 0j)
        except ValueError as e:
            raise ConfigError(f"Bad scalar gallery parameter in {name!r}: {e}") from e
    if name in GALLERY_NAMES:
        return name, None
    raise ConfigError(f"Unknown gallery problem {name!r}; expected one of {GALLERY_NAMES} or 'scalar(a)'")


def gallery(
        name: str,
        n: int,
        T: float,
        alpha: float,
        theta: float,
        *,
        N: int = 128,
        forcing: Forcing = "smooth",
        drift: float = 1.0,
        potential: float = 0.0,
        diffusion: float = 1.0,
        ) -> GalleryInstance:
    """
    Build a named problem on ``[0, T]`` with ``N`` time points.

    Parameters
    ----------
    name : str
        ``strong_damping``, ``strong_damping_drift``, ``intermediate_damping``,
        ``scalar`` or ``scalar(a)``.
    n : int
        Spatial interior points (ignored for scalar instances).
    T : float
        Horizon.
    alpha : float
        Damping strength, ``> 0``.
    theta : float
        Regularity index used by the rough forcing.
    N : int
        Time grid points.
    forcing : {"smooth", "rough"}
        Forcing family.
    drift, potential, diffusion : float
        Coefficients of ``strong_damping_drift``.

    Returns
    -------
    GalleryInstance
        ``expected_admissible`` compares the sector angle of ``A`` with the
        predicted admissible angle; unsupported ``(ε, α)`` give ``False``.

    Raises
    ------
    ConfigError
        For an unknown name, forcing or out-of-range parameter.
    """
    key, a = _parse_name(name)
    if alpha <= 0:
        raise ConfigError(f"alpha must be > 0, got {alpha}")
    if not 0.0 < theta < 1.0:
        raise ConfigError(f"theta must lie in (0, 1), got {theta}")
    if key != "scalar" and n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")

    match key:
        case "strong_damping":
            eps = 1.0
            A = Operator(laplacian_matrix(n), f"laplacian1d(n={n})")
            B = A.scaled(alpha, f"{alpha}*{A.label}")
            profile = spatial_profile(n)
        case "strong_damping_drift":
            eps = 1.0
            A = Operator(
                elliptic_matrix(n, 1.0, diffusion, drift, potential),
                f"elliptic1d(n={n}, diffusion={diffusion}, drift={drift}, potential={potential})",
            )
            B = A.scaled(alpha, f"{alpha}*{A.label}")
            profile = spatial_profile(n)
        case "intermediate_damping":
            eps = 0.5
            L = laplacian_matrix(n)
            A = Operator(L @ L, f"bilaplacian1d(n={n})")
            B = fractional_power(A, eps).scaled(alpha, f"{alpha}*{A.label}^0.5")
            profile = spatial_profile(n)
        case _:
            eps = 0.5
            A = Operator(np.array([[a]]), f"scalar({a})")
            B = fractional_power(A, eps).scaled(alpha, f"{alpha}*scalar({a})^0.5")
            profile = np.ones(1)

    f = forcing_path(forcing, profile, T, N, theta)
    problem = CauchyProblem(A, B, f)
    return GalleryInstance(
        name=name,
        problem=problem,
        pencil=problem.pencil,
        eps=eps,
        alpha=float(alpha),
        theta=float(theta),
        expected_admissible=_expected_admissible(A, eps, alpha),
        forcing=forcing,
    )
