# packages/second_order_regularity/src/second_order_regularity/operators/core.py

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
Spatial operators
=================

Dense complex matrices standing in for the operators ``A`` and ``B`` of
``ü + Bů + Au = f``, together with:

- declarative construction from an :data:`OperatorSpec` (scalars, matrix
  files, 1-D finite-difference Laplacian, bi-Laplacian and drift-diffusion
  operators, fractional powers, scalings),
- resolvents ``R(λ, M) = (λI − M)⁻¹`` with a numerical singularity test,
- principal fractional powers through an eigendecomposition, cross-checked
  by the Balakrishnan integral,
- spectral norms and the numerical sectoriality angle.

All values are immutable once built and safe to share between threads.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
import scipy.linalg as sla
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator
from scipy.integrate import quad_vec

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.io.matrix_file import parse_complex, read_matrix_file
from second_order_regularity.utils.errors import (
    BranchCutError,
    NonDiagonalizableError,
    SingularSystemError,
)

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

SINGULAR_RTOL = 1e-13
EIGVEC_COND_MAX = 1e8
BRANCH_CUT_RTOL = 1e-12

# ----------------------------------------------
# DOMAIN TYPES
# ----------------------------------------------


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Dense square complex matrix with a provenance label.

    Parameters
    ----------
    entries : array_like
        Square matrix (a scalar is promoted to ``1×1``). Copied and frozen.
    label : str
        Free-form description of how the operator was built.
    """

    entries: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"Operator must be a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"Operator {self.label or '<unnamed>'} has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a vector ``(n,)`` or to a stack of row vectors ``(..., n)``."""
        return np.asarray(x, dtype=complex) @ self.entries.T

    def scaled(self, alpha: float | complex, label: str | None = None) -> "Operator":
        return Operator(alpha * self.entries, label or f"{alpha}*({self.label})")

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        M = self.entries
        scale = max(1.0, float(np.max(np.abs(M))))
        return bool(np.max(np.abs(M - M.conj().T)) <= rtol * scale)

    @classmethod
    def identity(cls, n: int) -> "Operator":
        return cls(np.eye(n), f"I_{n}")


class _SpecBase(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ScalarSpec(_SpecBase):
    """``1×1`` operator ``[a]``."""

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    kind: Literal["scalar"] = "scalar"
    a: complex

    @field_validator("a", mode="before")
    @classmethod
    def _coerce_complex(cls, v: object) -> complex:
        return parse_complex(v)


class MatrixFileSpec(_SpecBase):
    """Matrix read from a text file (see :mod:`second_order_regularity.io.matrix_file`)."""

    kind: Literal["matrix_file"] = "matrix_file"
    path: Path


class Laplacian1dSpec(_SpecBase):
    """``(1/h²)·tridiag(−1, 2, −1)`` on ``n`` interior points of ``[0, length]``."""

    kind: Literal["laplacian1d"] = "laplacian1d"
    n: int = Field(ge=1)
    length: float = Field(default=1.0, gt=0)


class Bilaplacian1dSpec(_SpecBase):
    """Square of :class:`Laplacian1dSpec` (hinged ends ``u = Δu = 0``)."""

    kind: Literal["bilaplacian1d"] = "bilaplacian1d"
    n: int = Field(ge=1)
    length: float = Field(default=1.0, gt=0)


class Elliptic1dSpec(_SpecBase):
    """``−(a u′)′ + b u′ + c u`` with Dirichlet ends, constant coefficients."""

    kind: Literal["elliptic1d"] = "elliptic1d"
    n: int = Field(ge=1)
    length: float = Field(default=1.0, gt=0)
    diffusion: float = Field(default=1.0, gt=0)
    drift: float = 0.0
    potential: float = 0.0


class PowerSpec(_SpecBase):
    """Principal fractional power ``base^eps``."""

    kind: Literal["power"] = "power"
    base: "OperatorSpec"
    eps: float = Field(gt=0, le=1)


class ScaledSpec(_SpecBase):
    """``alpha · base`` with ``alpha > 0``."""

    kind: Literal["scaled"] = "scaled"
    alpha: float = Field(gt=0)
    base: "OperatorSpec"


OperatorSpec = Annotated[
    Union[ScalarSpec, MatrixFileSpec, Laplacian1dSpec, Bilaplacian1dSpec, Elliptic1dSpec, PowerSpec, ScaledSpec],
    Field(discriminator="kind"),
]

PowerSpec.model_rebuild()
ScaledSpec.model_rebuild()

_SPEC_ADAPTER: TypeAdapter = TypeAdapter(OperatorSpec)


def parse_operator_spec(data: object) -> BaseModel:
    """Validate a mapping (e.g. from a JSON config) into an :data:`OperatorSpec`."""
    if isinstance(data, _SpecBase):
        return data
    return _SPEC_ADAPTER.validate_python(data)


# ----------------------------------------------
# FINITE-DIFFERENCE MATRICES
# ----------------------------------------------


def laplacian_matrix(n: int, length: float = 1.0) -> np.ndarray:
    """Second-difference matrix ``(1/h²)·tridiag(−1, 2, −1)``, ``h = length/(n+1)``."""
    h = length / (n + 1)
    col = np.zeros(n)
    col[0] = 2.0
    if n > 1:
        col[1] = -1.0
    return sla.toeplitz(col) / h**2


def convection_matrix(n: int, length: float = 1.0) -> np.ndarray:
    """Central first difference ``(u_{i+1} − u_{i−1})/(2h)`` with zero Dirichlet ends."""
    h = length / (n + 1)
    return (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)


def elliptic_matrix(
        n: int,
        length: float = 1.0,
        diffusion: float = 1.0,
        drift: float = 0.0,
        potential: float = 0.0,
        ) -> np.ndarray:
    """Discretisation of ``−(a u′)′ + b u′ + c u`` (constant ``a, b, c``)."""
    if diffusion <= 0:
        raise ValueError(f"diffusion must be > 0 (ellipticity), got {diffusion}")
    return (
        diffusion * laplacian_matrix(n, length)
        + drift * convection_matrix(n, length)
        + potential * np.eye(n)
    )


def time_derivative_matrix(N: int, T: float) -> Operator:
    """
    Discrete zero-trace time derivative on the uniform grid ``t_k = kT/(N−1)``.

    Backward first difference ``(u_k − u_{k−1})/Δt`` for ``k ≥ 1`` and a zero
    first row.
    """
    if N < 2 or T <= 0:
        raise ValueError(f"Need N >= 2 and T > 0, got N={N}, T={T}")
    dt = T / (N - 1)
    D = (np.eye(N) - np.eye(N, k=-1)) / dt
    D[0, :] = 0.0
    return Operator(D, f"time_derivative(N={N}, T={T})")


# ----------------------------------------------
# OPERATIONS
# ----------------------------------------------


def build_operator(spec: object, *, base_dir: str | Path | None = None) -> Operator:
    """
    Build an :class:`Operator` from an :data:`OperatorSpec` (model or mapping).

    Parameters
    ----------
    spec : OperatorSpec | dict
        Declarative description.
    base_dir : str | Path | None
        Folder that relative ``matrix_file`` paths are resolved against.

    Returns
    -------
    Operator

    Raises
    ------
    MatrixFormatError
        If a matrix file does not parse.
    NonDiagonalizableError, BranchCutError
        From :func:`fractional_power` under a ``power`` spec.
    """
    spec = parse_operator_spec(spec)

    match spec.kind:
        case "scalar":
            return Operator(np.array([[spec.a]]), f"scalar({spec.a})")
        case "matrix_file":
            path = Path(spec.path)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return Operator(read_matrix_file(path), f"matrix_file({path.name})")
        case "laplacian1d":
            return Operator(laplacian_matrix(spec.n, spec.length), f"laplacian1d(n={spec.n}, length={spec.length})")
        case "bilaplacian1d":
            L = laplacian_matrix(spec.n, spec.length)
            return Operator(L @ L, f"bilaplacian1d(n={spec.n}, length={spec.length})")
        case "elliptic1d":
            M = elliptic_matrix(spec.n, spec.length, spec.diffusion, spec.drift, spec.potential)
            return Operator(
                M,
                f"elliptic1d(n={spec.n}, length={spec.length}, diffusion={spec.diffusion}, "
                f"drift={spec.drift}, potential={spec.potential})",
            )
        case "power":
            return fractional_power(build_operator(spec.base, base_dir=base_dir), spec.eps)
        case "scaled":
            base = build_operator(spec.base, base_dir=base_dir)
            return base.scaled(spec.alpha, f"{spec.alpha}*{base.label}")
    raise ValueError(f"Unknown operator kind {spec.kind!r}")


def operator_norm(op: Operator | np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    M = op.entries if isinstance(op, Operator) else np.asarray(op)
    if M.size == 0:
        return 0.0
    return float(sla.svdvals(M)[0])


def is_numerically_singular(M: np.ndarray, scale: float) -> bool:
    """``σ_min(M) ≤ 1e-13·scale`` or non-finite singular values."""
    s = sla.svdvals(M, check_finite=False)
    if not np.all(np.isfinite(s)):
        return True
    return bool(s[-1] <= SINGULAR_RTOL * max(scale, np.finfo(float).tiny))


def resolvent(op: Operator, lam: complex) -> Operator:
    """
    ``R(λ, op) = (λI − op)⁻¹``.

    Raises
    ------
    SingularSystemError
        When ``λ`` is numerically in the spectrum of ``op``.
    """
    lam = complex(lam)
    M = lam * np.eye(op.dim) - op.entries
    if not np.all(np.isfinite(M)) or is_numerically_singular(M, abs(lam) + operator_norm(op)):
        raise SingularSystemError(f"λI − {op.label or 'op'} is singular at λ={lam}", point=lam)
    R = sla.solve(M, np.eye(op.dim, dtype=complex))
    return Operator(R, f"R({lam}, {op.label})")


def fractional_power(op: Operator, eps: float) -> Operator:
    """
    Principal power ``op^eps`` through an eigendecomposition.

    Hermitian input is diagonalised with ``eigh``; otherwise ``eig`` is used and
    the eigenvector matrix must have condition number at most ``1e8``.

    Parameters
    ----------
    op : Operator
        Diagonalizable operator with spectrum off ``(−∞, 0]``.
    eps : float
        Exponent in ``(0, 1]``; ``eps = 1`` returns ``op`` unchanged.

    Returns
    -------
    Operator

    Raises
    ------
    ValueError
        If ``eps`` is outside ``(0, 1]``.
    NonDiagonalizableError
        If the eigenvector matrix is too ill-conditioned.
    BranchCutError
        If an eigenvalue lies on ``(−∞, 0]``.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if eps == 1.0:
        return op

    label = f"({op.label})^{eps}"
    M = op.entries
    norm = max(operator_norm(op), np.finfo(float).tiny)

    if op.is_hermitian():
        w, V = sla.eigh((M + M.conj().T) / 2)
        if np.any(w <= BRANCH_CUT_RTOL * norm):
            raise BranchCutError(f"{op.label}: eigenvalue {w.min():.3e} on the branch cut (-inf, 0]")
        return Operator((V * w**eps) @ V.conj().T, label)

    w, V = sla.eig(M)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > EIGVEC_COND_MAX:
        raise NonDiagonalizableError(f"{op.label}: eigenvector condition number {cond:.3e} exceeds {EIGVEC_COND_MAX:.0e}")
    on_cut = (np.abs(w.imag) <= BRANCH_CUT_RTOL * np.maximum(np.abs(w), norm)) & (w.real <= BRANCH_CUT_RTOL * norm)
    if np.any(on_cut):
        raise BranchCutError(f"{op.label}: eigenvalue {w[on_cut][0]} on the branch cut (-inf, 0]")
    # X V = V diag(w^eps)  =>  V^T X^T = (V diag(w^eps))^T
    VD = V * np.power(w.astype(complex), eps)
    X = sla.solve(V.T, VD.T).T
    return Operator(X, label)


def balakrishnan_power(op: Operator, eps: float, *, rtol: float = 1e-11) -> Operator:
    """
    Reference value of ``op^eps`` from the Balakrishnan integral

    ``(sin επ / π) ∫₀^∞ t^{ε−1} (t + A)⁻¹ A dt``,

    integrated in ``s = log t`` with ``scipy.integrate.quad_vec``. Independent of
    the eigendecomposition in :func:`fractional_power`.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    A = op.entries
    n = op.dim
    eye = np.eye(n)

    # t = e^s; split at t = 1 so every exponential argument is ≤ 0
    def integrand(s: float) -> np.ndarray:
        if s <= 0.0:
            X = math.exp(eps * s) * sla.solve(math.exp(s) * eye + A, A)
        else:
            X = math.exp((eps - 1.0) * s) * sla.solve(eye + math.exp(-s) * A, A)
        return np.stack([X.real, X.imag])

    scale = max(1.0, operator_norm(op))
    val, _err = quad_vec(integrand, -np.inf, np.inf, epsabs=1e-13 * scale, epsrel=rtol, limit=20000)
    X = (val[0] + 1j * val[1]) * math.sin(eps * math.pi) / math.pi
    return Operator(X, f"balakrishnan({op.label})^{eps}")


def sector_angle(op: Operator) -> float:
    """
    Numerical sectoriality angle: ``max |arg λ|`` over the nonzero spectrum.

    Symmetric positive definite matrices give ``0``.
    """
    w = sla.eigvals(op.entries)
    scale = max(operator_norm(op), np.finfo(float).tiny)
    nonzero = w[np.abs(w) > SINGULAR_RTOL * scale]
    if nonzero.size == 0:
        return 0.0
    # eigenvalues on the real axis up to roundoff
    on_axis = np.abs(nonzero.imag) <= 1e-12 * np.abs(nonzero)
    angles = np.where(on_axis, np.where(nonzero.real > 0, 0.0, math.pi), np.abs(np.angle(nonzero)))
    return float(angles.max())
