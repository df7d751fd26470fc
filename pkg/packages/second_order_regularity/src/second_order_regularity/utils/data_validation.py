# packages/second_order_regularity/src/second_order_regularity/utils/data_validation.py

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
Run configuration schema.

One configuration file drives one command. The models below validate the
parsed JSON/YAML mapping; :func:`validate_config` turns every schema problem
into a :class:`ConfigError` (exit code 4).
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import math
from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from second_order_regularity.io.matrix_file import parse_complex
from second_order_regularity.operators.core import OperatorSpec
from second_order_regularity.utils.errors import ConfigError

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

COMMANDS = ("check", "solve", "sweep", "norms")
DEFAULT_PHI2 = math.pi / 2 + 0.05

# ----------------------------------------------
# FIELD TYPES
# ----------------------------------------------


def parse_exponent(v: object) -> float:
    """Accept numbers and the strings ``"inf"``, ``"infinity"``, ``"∞"``."""
    if isinstance(v, str):
        token = v.strip().lower()
        if token in ("inf", "+inf", "infinity", "∞"):
            return math.inf
        return float(token)
    return v  # type: ignore[return-value]


Exponent = Annotated[float, BeforeValidator(parse_exponent), Field(ge=1)]
ComplexEntry = Annotated[complex, BeforeValidator(parse_complex)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)


# ----------------------------------------------
# PROBLEM
# ----------------------------------------------


class GalleryRef(_Model):
    name: str
    n: int = Field(default=8, ge=1)
    T: float = Field(default=1.0, gt=0)
    alpha: float = Field(default=1.0, gt=0)
    theta: float = Field(default=0.5, gt=0, lt=1)
    N: int = Field(default=128, ge=4)
    forcing: Literal["smooth", "rough"] = "smooth"
    drift: float = 1.0
    potential: float = 0.0
    diffusion: float = Field(default=1.0, gt=0)


class ForcingSpec(_Model):
    """
    Forcing of an explicit problem.

    ``constant``: ``f ≡ value`` (one entry broadcasts). ``smooth``/``rough``: the
    gallery families. ``samples``: ``N`` rows of ``n`` entries.
    """

    kind: Literal["constant", "smooth", "rough", "samples"] = "constant"
    value: list[ComplexEntry] = Field(default_factory=lambda: [1.0 + 0j])
    theta: float = Field(default=0.5, gt=0, lt=1)
    samples: list[list[ComplexEntry]] | None = None

    @model_validator(mode="after")
    def _samples_present(self) -> "ForcingSpec":
        if self.kind == "samples" and not self.samples:
            raise ValueError("forcing.kind='samples' needs a non-empty 'samples' table")
        return self


class ProblemConfig(_Model):
    """Either ``{"gallery": {...}}`` or explicit ``A``, ``B``, grid, forcing and initial data."""

    gallery: GalleryRef | None = None
    A: OperatorSpec | None = None
    B: OperatorSpec | None = None
    T: float = Field(default=1.0, gt=0)
    N: int = Field(default=128, ge=4)
    forcing: ForcingSpec = Field(default_factory=ForcingSpec)
    u0: list[ComplexEntry] | None = None
    u1: list[ComplexEntry] | None = None

    @model_validator(mode="after")
    def _one_form(self) -> "ProblemConfig":
        explicit = self.A is not None or self.B is not None
        if self.gallery is not None and explicit:
            raise ValueError("problem: give either 'gallery' or 'A'/'B', not both")
        if self.gallery is None and not (self.A is not None and self.B is not None):
            raise ValueError("problem: explicit form needs both 'A' and 'B'")
        if self.gallery is not None and (self.u0 is not None or self.u1 is not None):
            raise ValueError("problem: gallery problems have zero initial data")
        return self


# ----------------------------------------------
# NUMERICS
# ----------------------------------------------


class SectorConfig(_Model):
    phi2: float = Field(default=DEFAULT_PHI2, gt=math.pi / 2, lt=math.pi)
    r_min: float | None = Field(default=None, gt=0)
    r_max: float | None = Field(default=None, gt=0)
    radial_count: int = Field(default=200, ge=2)
    angular_count: int = Field(default=41, ge=2)
    threshold: float | None = Field(default=None, gt=0)
    refine: bool = True

    @model_validator(mode="after")
    def _radii(self) -> "SectorConfig":
        if (self.r_min is None) != (self.r_max is None):
            raise ValueError("sector: give both r_min and r_max or neither")
        if self.r_min is not None and self.r_min >= self.r_max:
            raise ValueError("sector: need r_min < r_max")
        return self


class ContourConfig(_Model):
    phi2: float | None = Field(default=None, gt=math.pi / 2, lt=math.pi)
    tol: float = Field(default=1e-6, gt=0, lt=1)
    nodes_per_ray: int = Field(default=100, ge=2)
    segment_nodes: int = Field(default=16, ge=1)


class NormRequest(_Model):
    kind: Literal["holder", "little_holder", "besov", "sup"]
    theta: float | None = Field(default=None, gt=0, le=1)
    p: Exponent = 2.0
    q: Exponent = 2.0
    window: float | None = Field(default=None, gt=0)
    seminorm: bool = False

    @model_validator(mode="after")
    def _consistent(self) -> "NormRequest":
        if self.kind != "sup" and self.theta is None:
            raise ValueError(f"norm '{self.kind}' needs theta")
        if self.kind == "besov":
            if self.theta >= 1:
                raise ValueError("besov theta must lie in (0, 1)")
            if math.isinf(self.p):
                raise ValueError("besov p must be finite (p = ∞ is the Hölder norm)")
        return self


class ModeConfig(_Model):
    kind: Literal["holder", "little_holder", "besov"] = "holder"
    theta: float = Field(default=0.5, gt=0, lt=1)
    p: Exponent = math.inf
    q: Exponent = math.inf
    compat_tol: float = Field(default=1e-8, gt=0)

    @model_validator(mode="after")
    def _besov_p(self) -> "ModeConfig":
        if self.kind == "besov" and math.isinf(self.p):
            raise ValueError("mode: besov needs a finite p")
        return self


class SweepConfig(_Model):
    eps: list[float] = Field(min_length=1)
    alpha: list[float] = Field(min_length=1)
    phi: list[float] = Field(min_length=1)
    margin: float = Field(default=0.05, gt=0, lt=math.pi / 2)
    radial_count: int = Field(default=200, ge=2)
    angular_count: int = Field(default=41, ge=2)

    @model_validator(mode="after")
    def _ranges(self) -> "SweepConfig":
        if any(not 0 < e <= 1 for e in self.eps):
            raise ValueError("sweep: eps values must lie in (0, 1]")
        if any(a <= 0 for a in self.alpha):
            raise ValueError("sweep: alpha values must be > 0")
        if any(not 0 <= p < math.pi for p in self.phi):
            raise ValueError("sweep: phi values must lie in [0, π)")
        return self


class PathConfig(_Model):
    """
    Catalogue path for the ``norms`` command.

    ``power``: ``t^k``. ``abs_power``: ``|t − c|^k``. ``sine``: ``sin(2π·freq·t)``.
    ``gallery_forcing``: the forcing of the configured problem.
    """

    label: str = Field(pattern=r"^[A-Za-z0-9_.-]+$")
    kind: Literal["power", "abs_power", "sine", "gallery_forcing"]
    k: float = Field(default=1.0, ge=0)
    c: float = 0.5
    freq: float = 1.0
    T: float = Field(default=1.0, gt=0)
    N: int = Field(default=257, ge=4)


class InterpRequest(_Model):
    theta: float = Field(gt=0, lt=1)
    p: Exponent = 2.0
    space_p: Exponent = 2.0
    tgrid_points: int = Field(default=400, ge=8)


class Config(_Model):
    command: Literal["check", "solve", "sweep", "norms"] | None = None
    problem: ProblemConfig | None = None
    sector: SectorConfig = Field(default_factory=SectorConfig)
    contour: ContourConfig = Field(default_factory=ContourConfig)
    norms: list[NormRequest] = Field(default_factory=list)
    mode: ModeConfig = Field(default_factory=ModeConfig)
    sweep: SweepConfig | None = None
    paths: list[PathConfig] = Field(default_factory=list)
    interp: InterpRequest | None = None
    output_dir: str | None = None


# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def _format_validation_error(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e.get("loc", ())) or "<root>"
        parts.append(f"{loc}: {e.get('msg')}")
    return "; ".join(parts)


def validate_config(data: object, command: str) -> Config:
    """
    Validate a parsed configuration for ``command``.

    Parameters
    ----------
    data : object
        Mapping from the config file.
    command : str
        CLI command the config will drive.

    Returns
    -------
    Config

    Raises
    ------
    ConfigError
        On schema violations, a command mismatch or a missing command section.
    """
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command {command!r}; expected one of {COMMANDS}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config root must be a mapping, got {type(data).__name__}")
    try:
        cfg = Config.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config: {_format_validation_error(e)}") from e

    if cfg.command is not None and cfg.command != command:
        raise ConfigError(f"Config is for '{cfg.command}' but the command is '{command}'")
    if command in ("check", "solve") and cfg.problem is None:
        raise ConfigError(f"'{command}' needs a 'problem' section")
    if command == "sweep" and cfg.sweep is None:
        raise ConfigError("'sweep' needs a 'sweep' section")
    if command == "norms":
        if not cfg.paths:
            raise ConfigError("'norms' needs a non-empty 'paths' list")
        if not cfg.norms and cfg.interp is None:
            raise ConfigError("'norms' needs 'norms' requests or an 'interp' request")
        if any(p.kind == "gallery_forcing" for p in cfg.paths) and cfg.problem is None:
            raise ConfigError("path kind 'gallery_forcing' needs a 'problem' section")
    return cfg
