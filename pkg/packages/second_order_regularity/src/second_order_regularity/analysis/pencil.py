# packages/second_order_regularity/src/second_order_regularity/analysis/pencil.py

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
Pencil analysis
===============

Sampled certification of parabolicity for ``ü + Bů + Au = f``:

- sectoriality of a single operator (``sup ‖λR(λ)‖`` outside a sector),
- existence and boundedness of ``H(λ) = (λ² + λB + A)⁻¹`` and of
  ``λ²H``, ``λBH``, ``AH`` on a closed sector ``Σ_φ₂`` with ``φ₂ > π/2``,
- the pole locus of the scalar symbol and the predicted admissible angle of
  ``A`` when ``B = α·A^ε``.

Suprema are taken over a log-radial × angular grid. Eigenvalues of the pencil
that fall inside the sector are added to the sample as probe points, so a pole
is never missed because of grid placement.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import pandas as pd
import scipy.linalg as sla

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.operators.core import (
    SINGULAR_RTOL,
    Operator,
    is_numerically_singular,
    operator_norm,
)
from second_order_regularity.utils.errors import (
    ContourError,
    NotSectorialError,
    SingularPencilError,
    UnsupportedParametersError,
)
from second_order_regularity.utils.parallel import chunk_slices, map_ordered, thread_count

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

DEFAULT_RADIAL_COUNT = 200
DEFAULT_ANGULAR_COUNT = 41
DEFAULT_RADIUS_SPAN = 1e4
DEFAULT_THRESHOLD_FACTOR = 1e3
BLOCK_SIZE = 2048

BOUND_COLUMNS = ["λ_re", "λ_im", "norm_H", "norm_λ²H", "norm_λBH", "norm_AH"]

# ----------------------------------------------
# DOMAIN TYPES
# ----------------------------------------------


@dataclass(frozen=True, eq=False)
class PencilSymbol:
    """The pair ``(A, B)`` defining ``λ ↦ λ²I + λB + A``."""

    A: Operator
    B: Operator

    def __post_init__(self) -> None:
        if self.A.dim != self.B.dim:
            raise ValueError(f"A and B must share a dimension, got {self.A.dim} and {self.B.dim}")

    @property
    def dim(self) -> int:
        return self.A.dim

    @cached_property
    def norm_A(self) -> float:
        return operator_norm(self.A)

    @cached_property
    def norm_B(self) -> float:
        return operator_norm(self.B)

    def matrix(self, lam: complex) -> np.ndarray:
        return lam * lam * np.eye(self.dim) + lam * self.B.entries + self.A.entries

    def matrices(self, lams: np.ndarray) -> np.ndarray:
        """Stack of ``λ_k²I + λ_kB + A``, shape ``(K, n, n)``."""
        lam = np.asarray(lams, dtype=complex)[:, None, None]
        return lam**2 * np.eye(self.dim) + lam * self.B.entries + self.A.entries

    def scale(self, lams: np.ndarray | complex) -> np.ndarray:
        """Magnitude used by the singularity test: ``|λ|² + |λ|‖B‖ + ‖A‖``."""
        r = np.abs(lams)
        return r**2 + r * self.norm_B + self.norm_A


@dataclass(frozen=True)
class SectorGrid:
    """
    Log-radial × angular sample of a sector.

    Interior sampling covers ``|arg λ| ≤ angle``; exterior sampling covers the two
    rays ``arg λ = ±angle`` plus the arc ``|λ| = r_min`` through the left half-plane.
    """

    angle: float
    r_min: float
    r_max: float
    radial_count: int = DEFAULT_RADIAL_COUNT
    angular_count: int = DEFAULT_ANGULAR_COUNT

    def __post_init__(self) -> None:
        if not 0.0 < self.angle < math.pi:
            raise ValueError(f"Sector angle must lie in (0, π), got {self.angle}")
        if not 0.0 < self.r_min < self.r_max:
            raise ValueError(f"Need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.radial_count < 2 or self.angular_count < 2:
            raise ValueError("radial_count and angular_count must be >= 2")

    @classmethod
    def for_operator(
            cls,
            A: Operator,
            angle: float,
            *,
            radial_count: int = DEFAULT_RADIAL_COUNT,
            angular_count: int = DEFAULT_ANGULAR_COUNT,
            span: float = DEFAULT_RADIUS_SPAN,
            ) -> "SectorGrid":
        """Default grid: radii in ``[1e-4, 1e4]·‖A‖^{1/2}``."""
        norm = operator_norm(A)
        scale = math.sqrt(norm) if norm > 0 else 1.0
        return cls(angle, scale / span, scale * span, radial_count, angular_count)

    def radii(self) -> np.ndarray:
        return np.logspace(math.log10(self.r_min), math.log10(self.r_max), self.radial_count)

    def angles(self) -> np.ndarray:
        return np.linspace(-self.angle, self.angle, self.angular_count)

    def interior_points(self) -> np.ndarray:
        """All ``r·e^{iθ}`` with ``|θ| ≤ angle``, angle-major order."""
        return (self.radii()[None, :] * np.exp(1j * self.angles()[:, None])).ravel()

    def exterior_points(self) -> np.ndarray:
        """Upper ray, lower ray, then the arc ``|λ| = r_min`` with ``arg ∈ [angle, 2π − angle]``."""
        r = self.radii()
        arc = self.r_min * np.exp(1j * np.linspace(self.angle, 2 * math.pi - self.angle, self.angular_count))
        return np.concatenate([r * np.exp(1j * self.angle), r * np.exp(-1j * self.angle), arc])

    def refined(self) -> "SectorGrid":
        """Nested grid with ``2k − 1`` radii and angles (contains every current point)."""
        return replace(self, radial_count=2 * self.radial_count - 1, angular_count=2 * self.angular_count - 1)

    def to_dict(self) -> dict:
        return {
            "angle": self.angle,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "radial_count": self.radial_count,
            "angular_count": self.angular_count,
        }


@dataclass(frozen=True, eq=False)
class HypothesisReport:
    """
    Outcome of sampling ``H``, ``λ²H``, ``λBH`` and ``AH`` over ``Σ_φ₂``.

    ``passes_c ⇔ sup_H ≤ threshold``; ``passes_d ⇔ max(sup_l2H, sup_lBH, sup_AH) ≤ threshold``;
    ``passes_b ⇔`` no sampled point hit a singular pencil.
    """

    phi2: float
    sup_H: float
    sup_l2H: float
    sup_lBH: float
    sup_AH: float
    argmax_H: complex
    argmax_l2H: complex
    argmax_lBH: complex
    argmax_AH: complex
    threshold: float
    baseline: float
    passes_b: bool
    passes_c: bool
    passes_d: bool
    grid: SectorGrid
    singular_count: int
    probe_count: int
    certified_failure: bool | None = None
    refined_max_sup: float | None = None
    points: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex), repr=False)
    bounds: np.ndarray = field(default_factory=lambda: np.empty((0, 4)), repr=False)

    @property
    def passes(self) -> bool:
        return self.passes_b and self.passes_c and self.passes_d

    @property
    def max_sup(self) -> float:
        return max(self.sup_H, self.sup_l2H, self.sup_lBH, self.sup_AH)

    def to_dict(self) -> dict:
        return {
            "phi2": self.phi2,
            "sup_H": self.sup_H,
            "sup_l2H": self.sup_l2H,
            "sup_lBH": self.sup_lBH,
            "sup_AH": self.sup_AH,
            "argmax_H": self.argmax_H,
            "argmax_l2H": self.argmax_l2H,
            "argmax_lBH": self.argmax_lBH,
            "argmax_AH": self.argmax_AH,
            "threshold": self.threshold,
            "baseline": self.baseline,
            "passes_b": self.passes_b,
            "passes_c": self.passes_c,
            "passes_d": self.passes_d,
            "passes": self.passes,
            "certified_failure": self.certified_failure,
            "refined_max_sup": self.refined_max_sup,
            "singular_count": self.singular_count,
            "probe_count": self.probe_count,
            "grid": self.grid.to_dict(),
        }

    def to_frame(self) -> pd.DataFrame:
        """Per-λ bounds with the documented CSV columns."""
        return pd.DataFrame(
            {
                BOUND_COLUMNS[0]: self.points.real,
                BOUND_COLUMNS[1]: self.points.imag,
                BOUND_COLUMNS[2]: self.bounds[:, 0],
                BOUND_COLUMNS[3]: self.bounds[:, 1],
                BOUND_COLUMNS[4]: self.bounds[:, 2],
                BOUND_COLUMNS[5]: self.bounds[:, 3],
            },
            columns=BOUND_COLUMNS,
        )


@dataclass(frozen=True, eq=False)
class SectorialityReport:
    """``sup ‖λR(λ, op)‖`` over the exterior of ``Σ_{ray_angle}``."""

    angle: float
    ray_angle: float
    sup: float
    argmax: complex
    grid: SectorGrid
    points: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0, dtype=complex))
    values: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    def to_dict(self) -> dict:
        return {
            "angle": self.angle,
            "ray_angle": self.ray_angle,
            "sup": self.sup,
            "argmax": self.argmax,
            "reference": 1.0 / math.sin(self.ray_angle),
            "grid": self.grid.to_dict(),
        }


# ----------------------------------------------
# SYMBOL EVALUATION
# ----------------------------------------------


def H_eval(pencil: PencilSymbol, lam: complex) -> Operator:
    """
    ``H(λ) = (λ²I + λB + A)⁻¹``.

    Raises
    ------
    SingularPencilError
        When ``λ`` is numerically in the pencil spectrum.
    """
    lam = complex(lam)
    M = pencil.matrix(lam)
    if is_numerically_singular(M, float(pencil.scale(lam))):
        raise SingularPencilError(f"λ²I + λB + A is singular at λ={lam}", point=lam)
    return Operator(sla.solve(M, np.eye(pencil.dim, dtype=complex)), f"H({lam})")


def symbol_bounds(pencil: PencilSymbol, lam: complex) -> tuple[float, float, float]:
    """``(‖λ²H(λ)‖, ‖λB·H(λ)‖, ‖A·H(λ)‖)``."""
    lam = complex(lam)
    H = H_eval(pencil, lam).entries
    return (
        operator_norm(lam * lam * H),
        operator_norm(lam * pencil.B.entries @ H),
        operator_norm(pencil.A.entries @ H),
    )


def _bounds_block(pencil: PencilSymbol, lams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Batched ``(‖H‖, ‖λ²H‖, ‖λBH‖, ‖AH‖)`` for a block of points.

    Returns the ``(K, 4)`` bounds (``inf`` at singular points) and the singular mask.
    """
    M = pencil.matrices(lams)
    s = np.linalg.svd(M, compute_uv=False)
    s_min = s[:, -1]
    singular = ~np.all(np.isfinite(s), axis=1) | (s_min <= SINGULAR_RTOL * pencil.scale(lams))

    bounds = np.full((lams.size, 4), np.inf)
    ok = ~singular
    if np.any(ok):
        lam_ok = lams[ok]
        H = np.linalg.inv(M[ok])
        norm_H = 1.0 / s_min[ok]
        bounds[ok, 0] = norm_H
        bounds[ok, 1] = np.abs(lam_ok) ** 2 * norm_H
        bounds[ok, 2] = np.linalg.norm(lam_ok[:, None, None] * (pencil.B.entries @ H), ord=2, axis=(1, 2))
        bounds[ok, 3] = np.linalg.norm(pencil.A.entries @ H, ord=2, axis=(1, 2))
    return bounds, singular


def pencil_spectrum(pencil: PencilSymbol) -> np.ndarray:
    """Eigenvalues of ``λ²I + λB + A`` through the companion linearisation."""
    n = pencil.dim
    C = np.block([
        [np.zeros((n, n)), np.eye(n)],
        [-pencil.A.entries, -pencil.B.entries],
    ])
    w = sla.eigvals(C)
    return w[np.isfinite(w)]


def _abs_arg(z: np.ndarray) -> np.ndarray:
    """``|arg z|`` with real negative numbers mapped to ``π`` regardless of the sign of zero."""
    z = np.asarray(z, dtype=complex)
    ang = np.abs(np.angle(z))
    on_axis = np.abs(z.imag) <= 1e-14 * np.abs(z)
    return np.where(on_axis & (z.real < 0), math.pi, ang)


def max_contour_angle(pencil: PencilSymbol, fraction: float = 0.9) -> float:
    """
    Largest safe ``φ₂`` for the solution contour.

    ``π/2 + fraction·(θ_min − π/2)``, capped at ``π − 0.05``, where ``θ_min`` is the
    smallest ``|arg|`` over the pencil spectrum.

    Raises
    ------
    ContourError
        If some pencil eigenvalue has ``|arg λ| ≤ π/2``.
    """
    w = pencil_spectrum(pencil)
    theta_min = float(_abs_arg(w).min()) if w.size else math.pi
    if theta_min <= math.pi / 2:
        raise ContourError(f"Pencil eigenvalue at |arg| = {theta_min:.4f} <= π/2: no admissible contour")
    return min(math.pi / 2 + fraction * (theta_min - math.pi / 2), math.pi - 0.05)


# ----------------------------------------------
# CERTIFICATION
# ----------------------------------------------


def check_sectorial(op: Operator, phi: float, grid: SectorGrid) -> SectorialityReport:
    """
    Estimate ``sup ‖λR(λ, op)‖`` outside ``Σ_φ′`` with ``φ′ = grid.angle``.

    Parameters
    ----------
    op : Operator
        Operator under test.
    phi : float
        Claimed sectoriality angle, ``0 < phi < grid.angle < π``.
    grid : SectorGrid
        Supplies the boundary rays and the small arc.

    Returns
    -------
    SectorialityReport

    Raises
    ------
    NotSectorialError
        If the spectrum leaves ``Σ_φ`` or a sampled resolvent is singular.
    """
    ray = grid.angle
    if not 0.0 < phi < ray < math.pi:
        raise ValueError(f"Need 0 < φ < φ′ < π, got φ={phi}, φ′={ray}")

    w = sla.eigvals(op.entries)
    norm = operator_norm(op)
    if np.any(np.abs(w) <= SINGULAR_RTOL * max(norm, 1.0)):
        raise NotSectorialError(f"{op.label}: eigenvalue 0 in the spectrum", point=0j)
    outside = _abs_arg(w) > phi + 1e-12
    if np.any(outside):
        bad = complex(w[outside][0])
        raise NotSectorialError(f"{op.label}: eigenvalue {bad} lies outside Σ_{phi:.4f}", point=bad)

    lams = grid.exterior_points()
    M = lams[:, None, None] * np.eye(op.dim) - op.entries
    s_min = np.linalg.svd(M, compute_uv=False)[:, -1]
    singular = s_min <= SINGULAR_RTOL * (np.abs(lams) + norm)
    if np.any(singular):
        raise NotSectorialError(f"{op.label}: resolvent singular at λ={lams[singular][0]}", point=complex(lams[singular][0]))
    values = np.abs(lams) / s_min
    k = int(np.argmax(values))
    return SectorialityReport(phi, ray, float(values[k]), complex(lams[k]), grid, lams, values)


def _baseline(pencil: PencilSymbol) -> float:
    try:
        return max(1.0, symbol_bounds(pencil, 0.0)[2])
    except SingularPencilError:
        return 1.0


def check_pencil_hypotheses(
        pencil: PencilSymbol,
        phi2: float,
        grid: SectorGrid | None = None,
        threshold: float | None = None,
        *,
        probe_spectrum: bool = True,
        max_workers: int | None = None,
        ) -> HypothesisReport:
    """
    Sample ``H``, ``λ²H``, ``λBH``, ``AH`` over the closed sector ``Σ_φ₂``.

    Parameters
    ----------
    pencil : PencilSymbol
        ``(A, B)``.
    phi2 : float
        Sector half-angle, ``π/2 < phi2 < π``.
    grid : SectorGrid | None
        Interior grid; its angle is reset to ``phi2``. Defaults to
        :meth:`SectorGrid.for_operator` on ``A``.
    threshold : float | None
        Pass level; defaults to ``1e3·max(1, ‖AH(0)‖)``.
    probe_spectrum : bool
        Add pencil eigenvalues inside ``Σ_φ₂`` to the sample.
    max_workers : int | None
        Thread-pool size request (capped by ``PARAB2_THREADS``).

    Returns
    -------
    HypothesisReport
        Singular points are recorded with ``inf`` bounds and ``passes_b = False``.
    """
    if not math.pi / 2 < phi2 < math.pi:
        raise ValueError(f"phi2 must lie in (π/2, π), got {phi2}")
    if grid is None:
        grid = SectorGrid.for_operator(pencil.A, phi2)
    elif grid.angle != phi2:
        grid = replace(grid, angle=phi2)

    baseline = _baseline(pencil)
    if threshold is None:
        threshold = DEFAULT_THRESHOLD_FACTOR * baseline

    points = grid.interior_points()
    probe_count = 0
    if probe_spectrum:
        w = pencil_spectrum(pencil)
        probes = w[_abs_arg(w) <= phi2]
        probe_count = int(probes.size)
        points = np.concatenate([points, probes])

    slices = chunk_slices(points.size, max(1, -(-points.size // BLOCK_SIZE)))
    workers = thread_count(max_workers)
    blocks = map_ordered(lambda sl: _bounds_block(pencil, points[sl]), slices, max_workers=workers)
    bounds = np.concatenate([b for b, _ in blocks])
    singular = np.concatenate([s for _, s in blocks])

    sups = bounds.max(axis=0)
    arg = bounds.argmax(axis=0)
    return HypothesisReport(
        phi2=phi2,
        sup_H=float(sups[0]),
        sup_l2H=float(sups[1]),
        sup_lBH=float(sups[2]),
        sup_AH=float(sups[3]),
        argmax_H=complex(points[arg[0]]),
        argmax_l2H=complex(points[arg[1]]),
        argmax_lBH=complex(points[arg[2]]),
        argmax_AH=complex(points[arg[3]]),
        threshold=float(threshold),
        baseline=float(baseline),
        passes_b=not bool(np.any(singular)),
        passes_c=bool(sups[0] <= threshold),
        passes_d=bool(max(sups[1], sups[2], sups[3]) <= threshold),
        grid=grid,
        singular_count=int(np.count_nonzero(singular)),
        probe_count=probe_count,
        points=points,
        bounds=bounds,
    )


def certify_failure(
        pencil: PencilSymbol,
        phi2: float,
        grid: SectorGrid | None = None,
        threshold: float | None = None,
        *,
        max_workers: int | None = None,
        ) -> HypothesisReport:
    """
    Run :func:`check_pencil_hypotheses` and, on failure, repeat on the nested refined grid.

    The failure is certified when the refined sample also fails and its largest
    sup is at least the coarse one.
    """
    report = check_pencil_hypotheses(pencil, phi2, grid, threshold, max_workers=max_workers)
    if report.passes:
        return report
    refined = check_pencil_hypotheses(pencil, phi2, report.grid.refined(), report.threshold, max_workers=max_workers)
    certified = (not refined.passes) and refined.max_sup >= report.max_sup
    return replace(report, certified_failure=bool(certified), refined_max_sup=refined.max_sup)


# ----------------------------------------------
# SCALAR ORACLES
# ----------------------------------------------


def scalar_pole_locus(a: float, alpha: float, eps: float, psi: float) -> tuple[float, float]:
    """
    Arguments of the roots of ``λ² + α(ae^{iψ})^ε λ + ae^{iψ} = 0``.

    Returns
    -------
    tuple[float, float]
        The two arguments in ``(−π, π]``, ascending.
    """
    z = a * complex(math.cos(psi), math.sin(psi))
    c = alpha * complex(z) ** eps
    disc = np.sqrt(complex(c * c - 4 * z))
    roots = np.array([(-c + disc) / 2, (-c - disc) / 2])
    angles = np.angle(roots)
    angles = np.where(angles <= -math.pi + 1e-12, math.pi, angles)
    return tuple(sorted(float(x) for x in angles))  # type: ignore[return-value]


def critical_angle(a: float, alpha: float, eps: float, psi: float) -> float:
    """Smallest ``|arg|`` over the two scalar poles: the largest sector ``H`` stays bounded on."""
    return min(abs(x) for x in scalar_pole_locus(a, alpha, eps, psi))


def predict_parabolic_angle(eps: float, alpha: float) -> float:
    """
    Supremum of the admissible sectoriality angle of ``A`` for damping ``α·A^ε``.

    - ``ε = 1/2, α ≥ 2``: ``π``
    - ``ε = 1/2, 0 < α < 2``: ``π − 2·arctan(√(4 − α²)/α)``
    - ``1/2 < ε ≤ 1, α > 0``: ``π/(2ε)``

    Raises
    ------
    UnsupportedParametersError
        For any other ``(ε, α)``.
    """
    if alpha <= 0:
        raise UnsupportedParametersError(f"alpha must be > 0, got {alpha}")
    if math.isclose(eps, 0.5, rel_tol=0.0, abs_tol=1e-12):
        if alpha >= 2.0:
            return math.pi
        return math.pi - 2.0 * math.atan(math.sqrt(4.0 - alpha**2) / alpha)
    if 0.5 < eps <= 1.0:
        return math.pi / (2.0 * eps)
    raise UnsupportedParametersError(f"No angle prediction for eps={eps}, alpha={alpha}")
