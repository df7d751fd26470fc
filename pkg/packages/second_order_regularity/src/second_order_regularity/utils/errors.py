# packages/second_order_regularity/src/second_order_regularity/utils/errors.py

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
Exception hierarchy and the exit codes the CLI maps them to.

Every error also derives from the closest builtin so callers that only
know about ``ValueError`` / ``ArithmeticError`` keep working.
"""

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_HYPOTHESIS_FAILED = 2
EXIT_COMPATIBILITY = 3
EXIT_CONFIG = 4

# ----------------------------------------------
# CLASS DEFINITIONS
# ----------------------------------------------


class Parab2Error(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = EXIT_FAILURE


class ConfigError(Parab2Error, ValueError):
    """Configuration could not be read, parsed or validated."""

    exit_code = EXIT_CONFIG


class MatrixFormatError(ConfigError):
    """A matrix file does not follow the documented text format."""


class CompatibilityError(Parab2Error, ValueError):
    """Initial data and forcing violate the zero-trace compatibility condition."""

    exit_code = EXIT_COMPATIBILITY

    def __init__(self, message: str, defect: float = float("nan")) -> None:
        super().__init__(message)
        self.defect = defect


class SingularSystemError(Parab2Error, ArithmeticError):
    """A linear system is numerically singular at the requested point."""

    def __init__(self, message: str, point: complex | None = None) -> None:
        super().__init__(message)
        self.point = point


class SingularPencilError(SingularSystemError):
    """``λ²I + λB + A`` is singular: ``λ`` lies in the pencil spectrum."""


class NotSectorialError(SingularSystemError):
    """The spectrum leaves the claimed sector, so the exterior resolvent blows up."""


class NonDiagonalizableError(Parab2Error, ArithmeticError):
    """Eigenvector matrix too ill-conditioned for an eigendecomposition-based power."""


class BranchCutError(Parab2Error, ArithmeticError):
    """An eigenvalue sits on the principal branch cut ``(-∞, 0]``."""


class ContourError(Parab2Error, ValueError):
    """Contour parameters out of range, or a node where the time kernel overflows."""


class UnsupportedParametersError(Parab2Error, ValueError):
    """``(ε, α)`` outside every case of the angle prediction."""


class ZeroNormError(Parab2Error, ZeroDivisionError):
    """The data norm used as a denominator vanishes."""


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the CLI exit code.

    Parameters
    ----------
    exc : BaseException
        The exception raised during a run.

    Returns
    -------
    int
        ``exc.exit_code`` for toolkit errors, 1 otherwise.
    """
    if isinstance(exc, Parab2Error):
        return exc.exit_code
    return EXIT_FAILURE
