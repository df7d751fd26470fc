# packages/second_order_regularity/src/second_order_regularity/analysis/norms.py

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
Regularity norms of sampled paths
=================================

Hölder, little-Hölder and Besov (Sobolev–Slobodeckij) norms of a path
``u : [0, T] → ℂⁿ`` sampled on a uniform grid, and the real-interpolation norm
``‖x‖ + ‖t^θ D(t + D)⁻¹x‖_{L^p(dt/t)}`` of a vector for a sectorial-like matrix ``D``.

Pair quantities are evaluated lag by lag: for a lag ``m`` every difference
``u[k+m] − u[k]`` is formed at once, so the double loops are ``O(N²·n)`` with
vectorised inner work.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np
import pandas as pd
import scipy.linalg as sla
from scipy.integrate import trapezoid

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.operators.core import SINGULAR_RTOL, Operator, operator_norm
from second_order_regularity.utils.errors import SingularSystemError
from second_order_regularity.utils.parallel import chunk_slices, map_ordered

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

DIVERGENCE_RATIO = 1.25
TAIL_RTOL = 1e-2
DEFAULT_TGRID_POINTS = 400
DEFAULT_TGRID_DECADES = 6.0

BesovWeight = Literal["slobodeckij", "literal"]
NormKind = Literal["holder", "little_holder", "besov", "sup"]

# ----------------------------------------------
# DOMAIN TYPES
# ----------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledPath:
    """
    Path sampled at ``t_k = kT/(N−1)``, ``k = 0..N−1``.

    ``values`` has shape ``(N, n)``; a one-dimensional array is read as ``n = 1``.
    The trace ``u(0)`` is ``values[0]``.
    """

    T: float
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be finite and > 0, got {self.T}")
        arr = np.array(self.values, dtype=complex)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError(f"values must have shape (N, n), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError(f"Need at least 2 grid points, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Path values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def dt(self) -> float:
        return self.T / (self.N - 1)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.N)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], T: float, N: int, label: str = "") -> "SampledPath":
        """Sample ``fn`` (vectorised in ``t``) on the uniform grid."""
        return cls(T, np.asarray(fn(np.linspace(0.0, T, N))), label)

    @classmethod
    def zeros(cls, T: float, N: int, n: int = 1) -> "SampledPath":
        return cls(T, np.zeros((N, n), dtype=complex))

    def with_values(self, values: np.ndarray, label: str | None = None) -> "SampledPath":
        return SampledPath(self.T, values, self.label if label is None else label)

    def scaled(self, c: complex) -> "SampledPath":
        return self.with_values(c * self.values)

    def __add__(self, other: "SampledPath") -> "SampledPath":
        self._check_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledPath") -> "SampledPath":
        self._check_grid(other)
        return self.with_values(self.values - other.values)

    def _check_grid(self, other: "SampledPath") -> None:
        if self.N != other.N or self.dim != other.dim or not math.isclose(self.T, other.T, rel_tol=1e-14):
            raise ValueError("Paths live on different grids")

    def pointwise_norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def sup_norm(self) -> float:
        return float(self.pointwise_norms().max())

    def subsampled(self) -> "SampledPath":
        """Every other grid point (the horizon shrinks by one step when ``N`` is even)."""
        vals = self.values[::2]
        return SampledPath(2.0 * self.dt * (vals.shape[0] - 1), vals, self.label)

    def to_frame(self) -> pd.DataFrame:
        """Columns ``t, re(u_1..u_n), im(u_1..u_n)``."""
        data = {"t": self.times()}
        for i in range(self.dim):
            data[f"re(u_{i + 1})"] = self.values[:, i].real
        for i in range(self.dim):
            data[f"im(u_{i + 1})"] = self.values[:, i].imag
        return pd.DataFrame(data)


@dataclass(frozen=True)
class BesovParams:
    """``θ ∈ (0, 1)``, ``p, q ∈ [1, ∞]`` (``math.inf`` stands for ∞)."""

    theta: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        for name, v in (("p", self.p), ("q", self.q)):
            if not (v >= 1.0):
                raise ValueError(f"{name} must lie in [1, ∞], got {v}")


class BesovResult(NamedTuple):
    norm: float
    seminorm: float
    lp: float
    refinement_ratio: float
    diverging: bool


class InterpResult(NamedTuple):
    norm: float
    seminorm: float
    divergent_tail: bool


# ----------------------------------------------
# HÖLDER FAMILY
# ----------------------------------------------


def _lag_quotients(u: SampledPath, theta: float, max_lag: int) -> np.ndarray:
    """``max_k ‖u[k+m] − u[k]‖ / (m·dt)^θ`` for ``m = 1..max_lag``."""
    vals = u.values
    out = np.empty(max_lag)
    for m in range(1, max_lag + 1):
        d = np.linalg.norm(vals[m:] - vals[:-m], axis=1).max()
        out[m - 1] = d / (m * u.dt) ** theta
    return out


def holder_norm(u: SampledPath, theta: float) -> tuple[float, float]:
    """
    Hölder norm and seminorm of a sampled path.

    Parameters
    ----------
    u : SampledPath
        Path on ``[0, T]``.
    theta : float
        Exponent in ``(0, 1]``.

    Returns
    -------
    tuple[float, float]
        ``(sup_t ‖u(t)‖ + seminorm, seminorm)`` with the seminorm the maximum of
        ``‖u(t) − u(s)‖/|t − s|^θ`` over all grid pairs.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    semi = float(_lag_quotients(u, theta, u.N - 1).max())
    return u.sup_norm() + semi, semi


def little_holder_defect(u: SampledPath, theta: float, window: float) -> float:
    """Hölder quotient maximised over pairs with ``|t − s| ≤ window``."""
    if not 0.0 < window < u.T:
        raise ValueError(f"window must lie in (0, T), got {window}")
    max_lag = int(math.floor(window / u.dt * (1 + 1e-12)))
    if max_lag < 1:
        raise ValueError(f"window {window} is smaller than the grid step {u.dt}")
    return float(_lag_quotients(u, theta, max_lag).max())


def default_window(u: SampledPath) -> float:
    """Default little-Hölder window: eight grid steps, at most ``T/2`` and at least one step."""
    return max(u.dt, min(8 * u.dt, u.T / 2))


def little_holder_profile(u: SampledPath, theta: float, windows: Sequence[float]) -> np.ndarray:
    """Defects for a sequence of windows; decay towards 0 indicates membership in ``h^θ``."""
    return np.array([little_holder_defect(u, theta, w) for w in windows])


def trace_defect(u: SampledPath) -> float:
    """``‖u(0)‖``."""
    return float(np.linalg.norm(u.values[0]))


# ----------------------------------------------
# BESOV
# ----------------------------------------------


def _trapezoid_weights(N: int, dt: float) -> np.ndarray:
    w = np.full(N, dt)
    w[0] = w[-1] = dt / 2
    return w


def _inner_sums(u: SampledPath, p: float, exponent: float, lags: range) -> np.ndarray:
    """Partial ``G(t_i) = Σ_j w_j ‖u_i − u_j‖^p / |t_i − t_j|^exponent`` over the given lags."""
    vals = u.values
    w = _trapezoid_weights(u.N, u.dt)
    G = np.zeros(u.N)
    for m in lags:
        kern = np.linalg.norm(vals[m:] - vals[:-m], axis=1) ** p / (m * u.dt) ** exponent
        G[m:] += w[:-m] * kern
        G[:-m] += w[m:] * kern
    return G


def _besov_seminorm(u: SampledPath, params: BesovParams, weight: BesovWeight, max_workers: int | None) -> float:
    p, q = params.p, params.q
    exponent = 1.0 + params.theta * p if weight == "slobodeckij" else params.theta * p
    lag_slices = chunk_slices(u.N - 1, max(1, (u.N - 1) // 256))
    parts = map_ordered(
        lambda sl: _inner_sums(u, p, exponent, range(sl.start + 1, sl.stop + 1)),
        lag_slices,
        max_workers=max_workers,
    )
    G = np.sum(parts, axis=0)
    if math.isinf(q):
        return float(G.max() ** (1.0 / p))
    w = _trapezoid_weights(u.N, u.dt)
    return float(np.sum(w * G ** (q / p)) ** (1.0 / q))


def besov_norm(
        u: SampledPath,
        params: BesovParams,
        *,
        weight: BesovWeight = "slobodeckij",
        max_workers: int | None = None,
        ) -> BesovResult:
    """
    Besov norm ``‖u‖_{L^p} + [u]_{θ,p,q}`` by tensor trapezoid quadrature.

    The seminorm is
    ``(∫ (∫ ‖u(t) − u(s)‖^p / |t − s|^{1+θp} ds)^{q/p} dt)^{1/q}``
    with the diagonal ``t = s`` excluded. ``weight="literal"`` uses the exponent
    ``θp`` instead of ``1 + θp``.

    Parameters
    ----------
    u : SampledPath
        Path on ``[0, T]``.
    params : BesovParams
        ``p`` must be finite; ``q = ∞`` takes the supremum in ``t``.
    weight : {"slobodeckij", "literal"}
        Singular kernel exponent.
    max_workers : int | None
        Lag blocks are summed concurrently, in a fixed order.

    Returns
    -------
    BesovResult
        ``diverging`` is set when the seminorm grows by more than 25% against
        the same path on every other grid point.
    """
    if math.isinf(params.p):
        raise ValueError("p = ∞ is the Hölder case; use holder_norm")
    if weight not in ("slobodeckij", "literal"):
        raise ValueError(f"Unknown Besov weight {weight!r}")

    w = _trapezoid_weights(u.N, u.dt)
    lp = float(np.sum(w * u.pointwise_norms() ** params.p) ** (1.0 / params.p))
    semi = _besov_seminorm(u, params, weight, max_workers)

    ratio = 1.0
    if u.N >= 5:
        coarse = _besov_seminorm(u.subsampled(), params, weight, max_workers)
        if coarse > 0:
            ratio = semi / coarse
        elif semi > 0:
            ratio = math.inf
    return BesovResult(lp + semi, semi, lp, float(ratio), bool(ratio > DIVERGENCE_RATIO))


# ----------------------------------------------
# INTERPOLATION NORM
# ----------------------------------------------


def discrete_lp_norm(T: float, N: int, p: float) -> Callable[[np.ndarray], float]:
    """
    Trapezoid-weighted ``L^p(0, T)`` norm of a vector of ``N`` grid values.

    Use as ``space_norm`` in :func:`interp_norm` when ``x`` is itself a sampled function of time.
    """
    w = _trapezoid_weights(N, T / (N - 1))

    def _norm(v: np.ndarray) -> float:
        a = np.abs(np.asarray(v).reshape(N, -1))
        a = np.linalg.norm(a, axis=1)
        if math.isinf(p):
            return float(a.max())
        return float(np.sum(w * a**p) ** (1.0 / p))

    return _norm


def default_tgrid(D: Operator) -> np.ndarray:
    scale = operator_norm(D) or 1.0
    return np.logspace(-DEFAULT_TGRID_DECADES, DEFAULT_TGRID_DECADES, DEFAULT_TGRID_POINTS) * scale


def _is_lower_triangular(M: np.ndarray) -> bool:
    return not np.any(np.triu(M, 1))


def interp_norm(
        D: Operator,
        x: np.ndarray,
        theta: float,
        p: float,
        tgrid: np.ndarray | None = None,
        *,
        space_norm: Callable[[np.ndarray], float] | None = None,
        ) -> InterpResult:
    """
    ``‖x‖ + ‖t^θ ‖D(t + D)⁻¹x‖‖_{L^p(0, ∞; dt/t)}`` sampled on ``tgrid``.

    Parameters
    ----------
    D : Operator
        Sectorial-like matrix with no spectrum on ``(−∞, 0)``.
    x : np.ndarray
        Vector of length ``D.dim``.
    theta : float
        Exponent in ``(0, 1)``.
    p : float
        ``[1, ∞]``; ``∞`` returns the sampled sup.
    tgrid : np.ndarray | None
        Increasing positive grid; defaults to 400 log-spaced points in ``[1e-6, 1e6]·‖D‖``.
    space_norm : callable | None
        Norm of the underlying space, Euclidean by default.

    Returns
    -------
    InterpResult
        ``divergent_tail`` is set when the integrand at either end of the grid is
        more than 1% of its maximum.

    Raises
    ------
    SingularSystemError
        If ``t + D`` is singular at a sampled ``t``.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if not p >= 1.0:
        raise ValueError(f"p must lie in [1, ∞], got {p}")
    norm_fn = space_norm or (lambda v: float(np.linalg.norm(v)))
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != D.dim:
        raise ValueError(f"x has length {x.size}, D has dimension {D.dim}")
    t = default_tgrid(D) if tgrid is None else np.asarray(tgrid, dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("tgrid must be positive and increasing")

    base = norm_fn(x)
    if not np.any(x):
        return InterpResult(0.0, 0.0, False)

    M = D.entries
    eye = np.eye(D.dim)
    triangular = _is_lower_triangular(M)
    g = np.empty(t.size)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        for k, tk in enumerate(t):
            S = tk * eye + M
            try:
                if triangular:
                    diag = np.abs(np.diag(S))
                    if diag.min() <= SINGULAR_RTOL * (tk + diag.max()):
                        raise sla.LinAlgError("zero pivot")
                    z = sla.solve_triangular(S, x, lower=True)
                else:
                    z = sla.solve(S, x)
            except (sla.LinAlgError, sla.LinAlgWarning) as e:
                raise SingularSystemError(f"t + D is singular at t={tk:.6g}: {e}", point=complex(-tk)) from e
            g[k] = tk**theta * norm_fn(M @ z)

    peak = g.max()
    tail = bool(peak > 0 and max(g[0], g[-1]) > TAIL_RTOL * peak)
    if math.isinf(p):
        semi = float(peak)
    else:
        semi = float(trapezoid(g**p, np.log(t)) ** (1.0 / p))
    return InterpResult(base + semi, semi, tail)


# ----------------------------------------------
# DISPATCH
# ----------------------------------------------


def compute_norm(
        u: SampledPath,
        kind: NormKind,
        *,
        theta: float | None = None,
        p: float = 2.0,
        q: float = 2.0,
        window: float | None = None,
        seminorm: bool = False,
        ) -> float:
    """Single norm value by kind name, as requested in norm tables."""
    match kind:
        case "sup":
            return u.sup_norm()
        case "holder":
            full, semi = holder_norm(u, _need_theta(theta))
            return semi if seminorm else full
        case "little_holder":
            return little_holder_defect(u, _need_theta(theta), window if window is not None else default_window(u))
        case "besov":
            res = besov_norm(u, BesovParams(_need_theta(theta), p, q))
            return res.seminorm if seminorm else res.norm
    raise ValueError(f"Unknown norm kind {kind!r}")


def _need_theta(theta: float | None) -> float:
    if theta is None:
        raise ValueError("This norm needs theta")
    return float(theta)
