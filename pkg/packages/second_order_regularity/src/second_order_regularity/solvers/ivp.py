# packages/second_order_regularity/src/second_order_regularity/solvers/ivp.py

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
Initial-value solve
===================

``ü + Bů + Au = f``, ``u(0) = u0``, ``ů(0) = u1`` is reduced to the homogeneous
problem through the lift ``x₀(t) = u0 + t·u1``:

    u = x₀ + S(f − L̂x₀),    L̂x₀ = B u1 + A u0 + t·A u1.

The zero-trace data spaces require ``f(0) = A u0 + B u1`` (the compatibility
condition) in Hölder modes and in Besov modes with ``θ ≥ 1/p``.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.analysis.norms import (
    NormKind,
    SampledPath,
    compute_norm,
    trace_defect,
)
from second_order_regularity.analysis.pencil import PencilSymbol, max_contour_angle
from second_order_regularity.operators.core import Operator
from second_order_regularity.solvers.contour import (
    DEFAULT_NODES_PER_RAY,
    DEFAULT_SEGMENT_NODES,
    DEFAULT_TOL,
    Contour,
    apply_S,
    build_contour,
    solve_problem_scale,
    time_derivatives,
)
from second_order_regularity.solvers.timestep import timestep_oracle
from second_order_regularity.utils.errors import CompatibilityError, ZeroNormError

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

DEFAULT_COMPAT_TOL = 1e-8
COMPONENTS = ("u", "du", "ddu", "Bdu", "Au")

Method = Literal["contour", "timestep"]
NormKey = tuple[str, str, float, float, float]

# ----------------------------------------------
# DOMAIN TYPES
# ----------------------------------------------


@dataclass(frozen=True)
class RegularityMode:
    """Data space of a solve: Hölder, little-Hölder or Besov ``B^θ_pq``."""

    kind: Literal["holder", "little_holder", "besov"] = "holder"
    theta: float = 0.5
    p: float = math.inf
    q: float = math.inf
    compat_tol: float = DEFAULT_COMPAT_TOL

    def __post_init__(self) -> None:
        if self.kind not in ("holder", "little_holder", "besov"):
            raise ValueError(f"Unknown mode {self.kind!r}")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if self.kind == "besov" and (math.isinf(self.p) or self.p < 1 or self.q < 1):
            raise ValueError("besov mode needs 1 <= p < ∞ and q >= 1")

    @classmethod
    def holder(cls, theta: float, compat_tol: float = DEFAULT_COMPAT_TOL) -> "RegularityMode":
        return cls("holder", theta, compat_tol=compat_tol)

    @classmethod
    def besov(cls, theta: float, p: float, q: float, compat_tol: float = DEFAULT_COMPAT_TOL) -> "RegularityMode":
        return cls("besov", theta, p, q, compat_tol)

    @property
    def requires_compatibility(self) -> bool:
        if self.kind == "besov":
            return self.theta >= 1.0 / self.p
        return True

    def default_norms(self) -> list[tuple[NormKind, float, float, float]]:
        """``(kind, θ, p, q)`` requests reported for every component."""
        if self.kind == "besov":
            return [("besov", self.theta, self.p, self.q)]
        out: list[tuple[NormKind, float, float, float]] = [("holder", self.theta, math.inf, math.inf)]
        if self.kind == "little_holder":
            out.append(("little_holder", self.theta, math.inf, math.inf))
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "theta": self.theta, "p": self.p, "q": self.q, "compat_tol": self.compat_tol}


@dataclass(frozen=True, eq=False)
class CauchyProblem:
    """``ü + Bů + Au = f`` on ``[0, T]`` with ``u(0) = u0``, ``ů(0) = u1``."""

    A: Operator
    B: Operator
    f: SampledPath
    u0: np.ndarray | None = None
    u1: np.ndarray | None = None

    def __post_init__(self) -> None:
        n = self.A.dim
        if self.B.dim != n or self.f.dim != n:
            raise ValueError(f"Dimension mismatch: A={n}, B={self.B.dim}, f={self.f.dim}")
        if self.f.N < 4:
            raise ValueError(f"f needs at least 4 grid points, got {self.f.N}")
        for name in ("u0", "u1"):
            v = getattr(self, name)
            arr = np.zeros(n, dtype=complex) if v is None else np.array(v, dtype=complex).ravel()
            if arr.size != n:
                raise ValueError(f"{name} has length {arr.size}, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def T(self) -> float:
        return self.f.T

    @property
    def N(self) -> int:
        return self.f.N

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def pencil(self) -> PencilSymbol:
        return PencilSymbol(self.A, self.B)

    def lift(self) -> tuple[SampledPath, SampledPath]:
        """``(x₀, f − L̂x₀)`` for the lift ``x₀(t) = u0 + t·u1``."""
        t = self.f.times()[:, None]
        x0 = self.u0[None, :] + t * self.u1[None, :]
        Lx0 = self.B.apply(self.u1)[None, :] + self.A.apply(x0)
        return self.f.with_values(x0, label="x0"), self.f.with_values(self.f.values - Lx0, label="g")


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Solution, its four companion components, residual and norm table."""

    method: str
    mode: RegularityMode
    u: SampledPath
    du: SampledPath
    ddu: SampledPath
    Bdu: SampledPath
    Au: SampledPath
    f: SampledPath
    residual_inf: float
    compatibility_defect: float
    norm_table: dict[NormKey, float] = field(default_factory=dict)
    contour: dict | None = None

    def components(self) -> dict[str, SampledPath]:
        return {name: getattr(self, name) for name in COMPONENTS}

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "mode": self.mode.to_dict(),
            "T": self.u.T,
            "N": self.u.N,
            "dim": self.u.dim,
            "residual_inf": self.residual_inf,
            "compatibility_defect": self.compatibility_defect,
            "contour": self.contour,
            "norm_table": [
                {"component": c, "kind": k, "theta": th, "p": p, "q": q, "value": v}
                for (c, k, th, p, q), v in self.norm_table.items()
            ],
        }


# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def contour_for_problem(
        problem: CauchyProblem,
        phi2: float | None = None,
        *,
        tol: float = DEFAULT_TOL,
        nodes_per_ray: int = DEFAULT_NODES_PER_RAY,
        segment_nodes: int = DEFAULT_SEGMENT_NODES,
        ) -> Contour:
    """Contour sized for ``problem``; ``phi2`` defaults to :func:`max_contour_angle` of its pencil."""
    if phi2 is None:
        phi2 = max_contour_angle(problem.pencil)
    scale = solve_problem_scale(problem.A, problem.B, problem.T)
    return build_contour(phi2, tol, scale, T=problem.T, nodes_per_ray=nodes_per_ray, segment_nodes=segment_nodes)


def check_compatibility(problem: CauchyProblem, mode: RegularityMode) -> float:
    """
    Return ``‖f(0) − A u0 − B u1‖``.

    Raises
    ------
    CompatibilityError
        When ``mode`` needs a zero trace and the defect exceeds
        ``compat_tol·max(‖f‖_∞, ‖A u0 + B u1‖)``.
    """
    _, g = problem.lift()
    defect = trace_defect(g)
    if mode.requires_compatibility:
        scale = max(problem.f.sup_norm(), float(np.linalg.norm(problem.A.apply(problem.u0) + problem.B.apply(problem.u1))))
        if defect > mode.compat_tol * scale:
            raise CompatibilityError(
                f"f(0) − A u0 − B u1 has norm {defect:.6g}, above {mode.compat_tol:g}·{scale:.6g} ({mode.kind} mode)",
                defect=defect,
            )
    return defect


def solution_path(
        problem: CauchyProblem,
        contour: Contour | None = None,
        method: Method = "contour",
        *,
        max_workers: int | None = None,
        ) -> SampledPath:
    """``u`` by the contour operator on the lifted problem, or by the time-stepping oracle."""
    if method == "timestep":
        return timestep_oracle(problem.A, problem.B, problem.f, problem.u0, problem.u1)
    if method != "contour":
        raise ValueError(f"Unknown method {method!r}")
    if contour is None:
        contour = contour_for_problem(problem)
    x0, g = problem.lift()
    u = x0 + apply_S(problem.A, problem.B, contour, g, max_workers=max_workers)
    return u.with_values(u.values, label="u")


def solve_ivp(
        problem: CauchyProblem,
        contour: Contour | None = None,
        mode: RegularityMode | None = None,
        *,
        method: Method = "contour",
        norms: Sequence[tuple[NormKind, float, float, float]] | None = None,
        window: float | None = None,
        max_workers: int | None = None,
        ) -> SolveReport:
    """
    Solve the Cauchy problem and measure the five components.

    Parameters
    ----------
    problem : CauchyProblem
        Operators, forcing and initial data.
    contour : Contour | None
        Quadrature contour; built with :func:`contour_for_problem` when omitted.
    mode : RegularityMode | None
        Data space, Hölder with ``θ = 1/2`` by default.
    method : {"contour", "timestep"}
        Solution operator.
    norms : sequence of (kind, θ, p, q) | None
        Norm requests; :meth:`RegularityMode.default_norms` when omitted.
    window : float | None
        Window of little-Hölder defects, eight grid steps when omitted.
    max_workers : int | None
        Thread-pool size request for the contour quadrature.

    Returns
    -------
    SolveReport

    Raises
    ------
    CompatibilityError
        When the data violates the zero-trace condition of ``mode``.
    """
    mode = mode or RegularityMode()
    defect = check_compatibility(problem, mode)
    if method == "contour" and contour is None:
        contour = contour_for_problem(problem)

    u = solution_path(problem, contour, method, max_workers=max_workers)
    du_vals, ddu_vals = time_derivatives(u)
    du = u.with_values(du_vals, label="du")
    ddu = u.with_values(ddu_vals, label="ddu")
    Bdu = u.with_values(problem.B.apply(du_vals), label="Bdu")
    Au = u.with_values(problem.A.apply(u.values), label="Au")
    residual = float(np.linalg.norm(ddu.values + Bdu.values + Au.values - problem.f.values, axis=1).max())

    table: dict[NormKey, float] = {}
    requests = list(norms) if norms is not None else mode.default_norms()
    components = {"u": u, "du": du, "ddu": ddu, "Bdu": Bdu, "Au": Au}
    for name, path in components.items():
        for kind, theta, p, q in requests:
            table[(name, kind, theta, p, q)] = compute_norm(path, kind, theta=theta, p=p, q=q, window=window)

    return SolveReport(
        method=method,
        mode=mode,
        u=u,
        du=du,
        ddu=ddu,
        Bdu=Bdu,
        Au=Au,
        f=problem.f,
        residual_inf=residual,
        compatibility_defect=defect,
        norm_table=table,
        contour=contour.to_dict() if (method == "contour" and contour is not None) else None,
    )


def maxreg_ratio(
        report: SolveReport,
        theta: float,
        kind: NormKind = "holder",
        *,
        p: float = math.inf,
        q: float = math.inf,
        seminorm: bool = False,
        ) -> float:
    """
    ``(‖ü‖ + ‖Bů‖ + ‖Au‖) / ‖f‖`` in the chosen norm.

    Raises
    ------
    ZeroNormError
        If the norm of ``f`` is zero.
    """
    def _norm(path: SampledPath) -> float:
        return compute_norm(path, kind, theta=theta, p=p, q=q, seminorm=seminorm)

    denom = _norm(report.f)
    if denom == 0.0:
        raise ZeroNormError(f"The {kind} {'seminorm' if seminorm else 'norm'} of f is zero")
    return (_norm(report.ddu) + _norm(report.Bdu) + _norm(report.Au)) / denom


def compare_methods(problem: CauchyProblem, contour: Contour | None = None, *, max_workers: int | None = None) -> float:
    """Relative sup-norm disagreement between the contour and time-stepping solutions."""
    uc = solution_path(problem, contour, "contour", max_workers=max_workers)
    ut = solution_path(problem, None, "timestep")
    ref = ut.sup_norm()
    diff = (uc - ut).sup_norm()
    return diff / ref if ref > 0 else diff
