# packages/second_order_regularity/src/second_order_regularity/solvers/contour.py

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
Contour-integral solution operator
==================================

``u = S f = (1/2πi) ∫_Γ R(λ, D) H(λ) f dλ`` where ``D`` is the time derivative
with zero trace and ``H(λ) = (λ² + λB + A)⁻¹``.

``Γ`` runs from ``e^{iφ′}∞`` down the upper ray to a short vertical segment at
``Re λ ≈ δ > 0`` and back out along the lower ray to ``e^{−iφ′}∞``. The weights
absorb ``dλ/(2πi)`` so ``u = Σ_j w_j R(λ_j, D) H(λ_j) f``.

``R(λ, D)`` is applied exactly to the piecewise-linear interpolant of its
argument:  ``(λ − D)u = g, u(0) = 0  ⇔  u(t) = −∫₀^t e^{λ(t−s)} g(s) ds``.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.analysis.norms import SampledPath
from second_order_regularity.analysis.pencil import PencilSymbol
from second_order_regularity.operators.core import SINGULAR_RTOL, Operator, operator_norm
from second_order_regularity.utils.errors import ContourError, SingularPencilError
from second_order_regularity.utils.parallel import chunk_slices, map_ordered

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

DEFAULT_TOL = 1e-6
DEFAULT_NODES_PER_RAY = 100
DEFAULT_SEGMENT_NODES = 16
VERTEX_FACTOR = 1e-3
OVERFLOW_LIMIT = 50.0
TAYLOR_RADIUS = 0.1
TAYLOR_TERMS = 14
NODE_BLOCK = 32

# ----------------------------------------------
# CONTOUR
# ----------------------------------------------


@dataclass(frozen=True, eq=False)
class Contour:
    """Quadrature nodes and weights (``dλ/2πi`` included) along ``Γ``, in path order."""

    phi2: float
    ray_angle: float
    vertex: float
    radius: float
    inner_radius: float
    T: float
    tol: float
    problem_scale: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.nodes.size)

    def to_dict(self) -> dict:
        return {
            "phi2": self.phi2,
            "ray_angle": self.ray_angle,
            "vertex": self.vertex,
            "radius": self.radius,
            "inner_radius": self.inner_radius,
            "T": self.T,
            "tol": self.tol,
            "problem_scale": self.problem_scale,
            "node_count": len(self),
        }


def solve_problem_scale(A: Operator, B: Operator, T: float) -> float:
    """Squared frequency scale ``max(1/T², ‖A‖, ‖B‖²)`` for the tail bound ``C/R²``."""
    return max(1.0 / T**2, operator_norm(A), operator_norm(B) ** 2)


def build_contour(
        phi2: float,
        tol: float,
        problem_scale: float,
        *,
        T: float = 1.0,
        nodes_per_ray: int = DEFAULT_NODES_PER_RAY,
        segment_nodes: int = DEFAULT_SEGMENT_NODES,
        ) -> Contour:
    """
    Two rays ``δ + r·e^{±iφ′}``, ``r ∈ [δ/2, R]``, joined by a vertical segment.

    Parameters
    ----------
    phi2 : float
        Pencil sector angle in ``(π/2, π)``; the rays use ``φ′ = (π/2 + φ₂)/2``.
    tol : float
        Tail tolerance in ``(0, 1)``; ``R = √(problem_scale/tol)``.
    problem_scale : float
        The constant ``C`` of the ``C/R²`` tail law, see :func:`solve_problem_scale`.
    T : float
        Horizon; the vertex sits at ``δ = 1e-3/T``.
    nodes_per_ray : int
        Trapezoid nodes in ``log r`` per ray.
    segment_nodes : int
        Gauss–Legendre nodes on the vertex segment.

    Returns
    -------
    Contour
        Conjugate-symmetric nodes with conjugate weights.

    Raises
    ------
    ContourError
        If ``φ₂ ∉ (π/2, π)`` or the other parameters are out of range.
    """
    if not math.pi / 2 < phi2 < math.pi:
        raise ContourError(f"phi2 must lie in (π/2, π), got {phi2}")
    if not 0.0 < tol < 1.0:
        raise ContourError(f"tol must lie in (0, 1), got {tol}")
    if not (problem_scale > 0 and T > 0):
        raise ContourError("problem_scale and T must be > 0")
    if nodes_per_ray < 2 or segment_nodes < 1:
        raise ContourError("Need nodes_per_ray >= 2 and segment_nodes >= 1")

    ray = (math.pi / 2 + phi2) / 2
    delta = VERTEX_FACTOR / T
    rho = delta / 2
    R = max(math.sqrt(problem_scale / tol), 10 * delta)

    s = np.linspace(math.log(rho), math.log(R), nodes_per_ray)
    h = s[1] - s[0]
    c = np.full(nodes_per_ray, h)
    c[0] = c[-1] = h / 2
    r = np.exp(s)
    up = np.exp(1j * ray)

    # upper ray traversed inwards, lower ray outwards
    upper_nodes = (delta + r * up)[::-1]
    upper_weights = (-c * r * up / (2j * math.pi))[::-1]
    lower_nodes = delta + r * up.conjugate()
    lower_weights = c * r * up.conjugate() / (2j * math.pi)

    x, g = leggauss(segment_nodes)
    # top to bottom
    seg_nodes = delta + rho * math.cos(ray) + 1j * rho * math.sin(ray) * x[::-1]
    seg_weights = -rho * math.sin(ray) * g[::-1] / (2 * math.pi) + 0j

    nodes = np.concatenate([upper_nodes, seg_nodes, lower_nodes])
    weights = np.concatenate([upper_weights, seg_weights, lower_weights])
    return Contour(phi2, ray, delta, R, rho, T, tol, problem_scale, nodes, weights)


# ----------------------------------------------
# RESOLVENT OF THE TIME DERIVATIVE
# ----------------------------------------------


def _phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``φ₁(z) = (e^z − 1)/z`` and ``φ₂(z) = (e^z − 1 − z)/z²`` with a series near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < TAYLOR_RADIUS
    zs = np.where(small, 1.0, z)
    ez = np.exp(z)
    phi1 = (ez - 1) / zs
    phi2 = (ez - 1 - zs) / zs**2
    if np.any(small):
        zz = z[small]
        p1 = np.zeros_like(zz)
        p2 = np.zeros_like(zz)
        term = np.ones_like(zz)
        for k in range(TAYLOR_TERMS):
            # term = z^k / k!
            p1 += term / (k + 1)
            p2 += term / ((k + 1) * (k + 2))
            term = term * zz / (k + 1)
        phi1[small] = p1
        phi2[small] = p2
    return phi1, phi2


def _resolvent_D_batch(lams: np.ndarray, G: np.ndarray, dt: float) -> np.ndarray:
    """
    ``R(λ_j, D) g_j`` for a stack of points and paths.

    ``G`` has shape ``(J, N, n)``; the recurrence is vectorised over ``j`` and the
    components and runs sequentially in time.
    """
    z = lams * dt
    ez = np.exp(z)
    phi1, phi2 = _phi_functions(z)
    a = (dt * (phi1 - phi2))[:, None]
    b = (dt * phi2)[:, None]
    ez = ez[:, None]

    out = np.zeros(G.shape, dtype=complex)
    for k in range(G.shape[1] - 1):
        out[:, k + 1] = ez * out[:, k] + a * G[:, k] + b * G[:, k + 1]
    return -out


def _guard_overflow(lams: np.ndarray, T: float) -> None:
    worst = float(np.max(lams.real)) * T
    if worst > OVERFLOW_LIMIT:
        raise ContourError(f"Re λ·T = {worst:.3g} exceeds {OVERFLOW_LIMIT}: contour is misbuilt")


def resolvent_D_apply(lam: complex, g: SampledPath) -> SampledPath:
    """
    Solve ``(λ − D)u = g`` with ``u(0) = 0`` for the piecewise-linear interpolant of ``g``.

    Raises
    ------
    ContourError
        If ``Re λ·T > 50``.
    """
    lams = np.array([complex(lam)])
    _guard_overflow(lams, g.T)
    return g.with_values(_resolvent_D_batch(lams, g.values[None], g.dt)[0])


# ----------------------------------------------
# SOLUTION AND FORWARD OPERATORS
# ----------------------------------------------


def _node_block(pencil: PencilSymbol, lams: np.ndarray, weights: np.ndarray, f: SampledPath) -> np.ndarray:
    M = pencil.matrices(lams)
    s_min = np.linalg.svd(M, compute_uv=False)[:, -1]
    singular = s_min <= SINGULAR_RTOL * pencil.scale(lams)
    if np.any(singular):
        lam = complex(lams[singular][0])
        raise SingularPencilError(f"Pencil singular at contour node λ={lam}", point=lam)
    H = np.linalg.inv(M)
    Hf = np.einsum("jab,kb->jka", H, f.values)
    R = _resolvent_D_batch(lams, Hf, f.dt)
    return np.einsum("j,jka->ka", weights, R)


def apply_S(
        A: Operator,
        B: Operator,
        contour: Contour,
        f: SampledPath,
        *,
        max_workers: int | None = None,
        ) -> SampledPath:
    """
    Contour quadrature of ``(1/2πi) ∫_Γ R(λ, D) H(λ) f dλ``.

    Nodes are processed in fixed blocks (optionally on a thread pool) and the
    block sums are added in node order, so the result does not depend on the
    number of threads.

    Raises
    ------
    SingularPencilError
        If ``H`` cannot be evaluated at some node.
    ContourError
        If a node has ``Re λ·T > 50``.
    """
    pencil = PencilSymbol(A, B)
    if f.dim != pencil.dim:
        raise ValueError(f"f has {f.dim} components, operators have dimension {pencil.dim}")
    _guard_overflow(contour.nodes, f.T)

    blocks = chunk_slices(len(contour), max(1, -(-len(contour) // NODE_BLOCK)))
    parts = map_ordered(
        lambda sl: _node_block(pencil, contour.nodes[sl], contour.weights[sl], f),
        blocks,
        max_workers=max_workers,
    )
    total = np.zeros(f.values.shape, dtype=complex)
    for part in parts:
        total += part
    return f.with_values(total, label="u")


def time_derivatives(u: SampledPath) -> tuple[np.ndarray, np.ndarray]:
    """
    ``(ů, ü)`` on the grid.

    ``ů`` by second-order central differences with one-sided second-order ends
    (``numpy.gradient``); ``ü`` by the three-point stencil inside and the
    four-point one-sided stencil at both ends.
    """
    if u.N < 4:
        raise ValueError(f"Need at least 4 grid points, got {u.N}")
    v = u.values
    dt = u.dt
    du = np.gradient(v, dt, axis=0, edge_order=2)
    ddu = np.empty_like(v)
    ddu[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / dt**2
    ddu[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / dt**2
    ddu[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / dt**2
    return du, ddu


def apply_L(A: Operator, B: Operator, u: SampledPath) -> SampledPath:
    """Forward operator ``ü + Bů + Au`` by grid differentiation."""
    du, ddu = time_derivatives(u)
    return u.with_values(ddu + B.apply(du) + A.apply(u.values), label="f")
