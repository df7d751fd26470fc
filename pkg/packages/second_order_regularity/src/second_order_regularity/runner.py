# packages/second_order_regularity/src/second_order_regularity/runner.py

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
Command orchestration: one validated config in, artifacts and an exit code out.

Exit codes: 0 success, 1 runtime failure, 2 hypothesis check failed,
3 compatibility error, 4 config error. Every non-zero exit also writes
``error.json`` to the output directory.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from parab2_common.paths import data_dir, resolve_under
from second_order_regularity.analysis.norms import (
    SampledPath,
    besov_norm,
    BesovParams,
    compute_norm,
    discrete_lp_norm,
    interp_norm,
)
from second_order_regularity.analysis.pencil import (
    SectorGrid,
    certify_failure,
    check_pencil_hypotheses,
    check_sectorial,
)
from second_order_regularity.gallery.problems import (
    GalleryInstance,
    forcing_path,
    gallery,
    spatial_profile,
)
from second_order_regularity.gallery.sweep import sweep
from second_order_regularity.io.config_loader import load_and_validate_config
from second_order_regularity.io.emit import emit
from second_order_regularity.operators.core import build_operator, sector_angle, time_derivative_matrix
from second_order_regularity.solvers.ivp import (
    CauchyProblem,
    RegularityMode,
    SolveReport,
    contour_for_problem,
    maxreg_ratio,
    solve_ivp,
)
from second_order_regularity.utils.data_validation import Config, PathConfig, ProblemConfig
from second_order_regularity.utils.errors import (
    EXIT_HYPOTHESIS_FAILED,
    EXIT_OK,
    ConfigError,
    NotSectorialError,
    Parab2Error,
    ZeroNormError,
    exit_code_for,
)
from second_order_regularity.utils.logging import log_banner, log_mapping, log_msg
from second_order_regularity.utils.parallel import thread_count

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

NORM_TABLE_COLUMNS = ["norm_kind", "θ", "p", "q", "value", "N", "T"]

# ----------------------------------------------
# BUILDERS
# ----------------------------------------------


def resolve_output_dir(command: str, out: str | Path | None, cfg: Config | None, config_path: Path | None) -> Path:
    """``--out``, then the config's ``output_dir`` (relative to the config file), then ``data_dir()/<command>``."""
    if out is not None:
        return Path(out).expanduser().resolve()
    if cfg is not None and cfg.output_dir:
        base = config_path.parent if config_path is not None else Path.cwd()
        return resolve_under(base, cfg.output_dir)
    return data_dir() / command


def _vector(values: list[complex] | None, n: int, name: str) -> np.ndarray | None:
    if values is None:
        return None
    if len(values) == 1 and n > 1:
        return np.full(n, values[0], dtype=complex)
    if len(values) != n:
        raise ConfigError(f"{name} has {len(values)} entries, the operators have dimension {n}")
    return np.asarray(values, dtype=complex)


def build_problem(pcfg: ProblemConfig, base_dir: Path | None) -> tuple[CauchyProblem, GalleryInstance | None]:
    """Problem from a validated ``problem`` section (gallery or explicit)."""
    if pcfg.gallery is not None:
        g = pcfg.gallery
        inst = gallery(
            g.name, g.n, g.T, g.alpha, g.theta,
            N=g.N, forcing=g.forcing, drift=g.drift, potential=g.potential, diffusion=g.diffusion,
        )
        return inst.problem, inst

    A = build_operator(pcfg.A, base_dir=base_dir)
    B = build_operator(pcfg.B, base_dir=base_dir)
    if A.dim != B.dim:
        raise ConfigError(f"A has dimension {A.dim}, B has dimension {B.dim}")
    n = A.dim
    fs = pcfg.forcing
    match fs.kind:
        case "constant":
            c = _vector(fs.value, n, "forcing.value")
            f = SampledPath(pcfg.T, np.tile(c, (pcfg.N, 1)), label="f_constant")
        case "samples":
            rows = np.asarray(fs.samples, dtype=complex)
            if rows.ndim != 2 or rows.shape != (pcfg.N, n):
                raise ConfigError(f"forcing.samples must have shape ({pcfg.N}, {n}), got {rows.shape}")
            f = SampledPath(pcfg.T, rows, label="f_samples")
        case _:
            profile = spatial_profile(n) if n > 1 else np.ones(1)
            f = forcing_path(fs.kind, profile, pcfg.T, pcfg.N, fs.theta)
    try:
        problem = CauchyProblem(A, B, f, _vector(pcfg.u0, n, "u0"), _vector(pcfg.u1, n, "u1"))
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return problem, None


def build_path(pc: PathConfig, problem: CauchyProblem | None) -> SampledPath:
    match pc.kind:
        case "power":
            return SampledPath.from_function(lambda t: t**pc.k, pc.T, pc.N, pc.label)
        case "abs_power":
            return SampledPath.from_function(lambda t: np.abs(t - pc.c) ** pc.k, pc.T, pc.N, pc.label)
        case "sine":
            return SampledPath.from_function(lambda t: np.sin(2 * math.pi * pc.freq * t), pc.T, pc.N, pc.label)
        case _:
            if problem is None:
                raise ConfigError("gallery_forcing needs a problem section")
            return problem.f.with_values(problem.f.values, label=pc.label)


# ----------------------------------------------
# COMMANDS
# ----------------------------------------------


def run_check(cfg: Config, base_dir: Path, out_dir: Path, logger: logging.Logger | None, verbose: bool) -> int:
    problem, _ = build_problem(cfg.problem, base_dir)
    pencil = problem.pencil
    sc = cfg.sector
    if sc.r_min is not None:
        grid = SectorGrid(sc.phi2, sc.r_min, sc.r_max, sc.radial_count, sc.angular_count)
    else:
        grid = SectorGrid.for_operator(pencil.A, sc.phi2, radial_count=sc.radial_count, angular_count=sc.angular_count)

    checker = certify_failure if sc.refine else check_pencil_hypotheses
    report = checker(pencil, sc.phi2, grid, sc.threshold)
    log_mapping(
        "Pencil hypotheses:",
        {
            "phi2": report.phi2,
            "sup_H": report.sup_H,
            "sup_l2H": report.sup_l2H,
            "sup_lBH": report.sup_lBH,
            "sup_AH": report.sup_AH,
            "threshold": report.threshold,
            "passes_b": report.passes_b,
            "passes_c": report.passes_c,
            "passes_d": report.passes_d,
        },
        logger,
        echo_console=verbose,
    )
    _log_written(emit(report, "json", out_dir / "hypothesis_report.json"), logger, verbose)
    _log_written(emit(report, "csv", out_dir / "symbol_bounds.csv"), logger, verbose)

    claimed = max(sector_angle(pencil.A), 1e-6)
    try:
        ray = (claimed + math.pi) / 2
        sect = check_sectorial(
            pencil.A, claimed,
            SectorGrid(ray, grid.r_min, grid.r_max, grid.radial_count, grid.angular_count),
        )
        log_msg(f"Sectoriality of A: sup ‖λR(λ)‖ = {sect.sup:.6g} at φ′ = {ray:.6g}", logger, echo_console=verbose)
        _log_written(emit(sect, "json", out_dir / "sectoriality_report.json"), logger, verbose)
    except (NotSectorialError, ValueError) as e:
        log_msg(f"Sectoriality report skipped: {e}", logger, level="warning", echo_console=verbose)

    if report.passes:
        log_msg("Pencil hypotheses hold on the sampled sector.", logger, echo_console=verbose, force=True)
        return EXIT_OK
    status = {True: "certified by refinement", False: "not confirmed by refinement", None: "refinement not run"}
    log_msg(
        f"Pencil hypotheses fail ({status[report.certified_failure]}).",
        logger,
        level="warning",
        echo_console=verbose,
        force=True,
    )
    return EXIT_HYPOTHESIS_FAILED


def _mode_from_config(cfg: Config) -> RegularityMode:
    m = cfg.mode
    return RegularityMode(m.kind, m.theta, m.p, m.q, m.compat_tol)


def _maxreg_or_none(report: SolveReport, mode: RegularityMode) -> float | None:
    kind = "besov" if mode.kind == "besov" else "holder"
    try:
        return maxreg_ratio(report, mode.theta, kind, p=mode.p, q=mode.q)
    except ZeroNormError:
        return None


def run_solve(cfg: Config, base_dir: Path, out_dir: Path, logger: logging.Logger | None, verbose: bool) -> int:
    problem, _ = build_problem(cfg.problem, base_dir)
    mode = _mode_from_config(cfg)
    cc = cfg.contour
    contour = contour_for_problem(problem, cc.phi2, tol=cc.tol, nodes_per_ray=cc.nodes_per_ray, segment_nodes=cc.segment_nodes)
    log_mapping("Contour:", contour.to_dict(), logger, echo_console=verbose)

    norms = [(r.kind, r.theta if r.theta is not None else math.nan, r.p, r.q) for r in cfg.norms] or None
    windows = [r.window for r in cfg.norms if r.kind == "little_holder" and r.window is not None]
    window = windows[0] if windows else None

    reports = {}
    for method in ("contour", "timestep"):
        rep = solve_ivp(problem, contour, mode, method=method, norms=norms, window=window)
        reports[method] = rep
        log_msg(f"{method}: residual_inf = {rep.residual_inf:.6g}", logger, echo_console=verbose)
        _log_written(emit(rep, "json", out_dir / f"solve_report_{method}.json"), logger, verbose)
        for name, path in rep.components().items():
            _log_written(emit(path.to_frame(), "csv", out_dir / f"components_{method}_{name}.csv"), logger, verbose)

    uc, ut = reports["contour"].u, reports["timestep"].u
    ref = ut.sup_norm()
    diff = (uc - ut).sup_norm()
    agreement = {
        "relative_sup_disagreement": diff / ref if ref > 0 else diff,
        "absolute_sup_disagreement": diff,
        "residual_contour": reports["contour"].residual_inf,
        "residual_timestep": reports["timestep"].residual_inf,
        "maxreg_ratio_contour": _maxreg_or_none(reports["contour"], mode),
        "maxreg_ratio_timestep": _maxreg_or_none(reports["timestep"], mode),
    }
    log_mapping("Method agreement:", {k: v for k, v in agreement.items() if v is not None}, logger, echo_console=verbose)
    _log_written(emit(agreement, "json", out_dir / "agreement.json"), logger, verbose)
    return EXIT_OK


def run_sweep(cfg: Config, out_dir: Path, logger: logging.Logger | None, verbose: bool) -> int:
    sc = cfg.sweep
    table = sweep(
        sc.eps, sc.alpha, sc.phi,
        margin=sc.margin,
        radial_count=sc.radial_count,
        angular_count=sc.angular_count,
        logger=logger,
        progress=verbose,
    )
    _log_written(emit(table, "csv", out_dir / "phase_diagram.csv"), logger, verbose)
    return EXIT_OK


def run_norms(cfg: Config, base_dir: Path, out_dir: Path, logger: logging.Logger | None, verbose: bool) -> int:
    problem = build_problem(cfg.problem, base_dir)[0] if cfg.problem is not None else None
    for pc in cfg.paths:
        path = build_path(pc, problem)
        rows = []
        for r in cfg.norms:
            theta = r.theta if r.theta is not None else math.nan
            if r.kind == "besov":
                res = besov_norm(path, BesovParams(r.theta, r.p, r.q))
                value = res.seminorm if r.seminorm else res.norm
                if res.diverging:
                    log_msg(
                        f"{pc.label}: Besov seminorm grows by {res.refinement_ratio:.3g} under refinement (diverging)",
                        logger, level="warning", echo_console=verbose,
                    )
            else:
                value = compute_norm(path, r.kind, theta=r.theta, p=r.p, q=r.q, window=r.window, seminorm=r.seminorm)
            rows.append([r.kind, theta, r.p, r.q, value, path.N, path.T])

        if cfg.interp is not None:
            if path.dim != 1:
                raise ConfigError(f"interp norms need a scalar path; '{pc.label}' has {path.dim} components")
            ir = cfg.interp
            D = time_derivative_matrix(path.N, path.T)
            tgrid = np.logspace(-6, 6, ir.tgrid_points) * (2.0 / path.dt)
            res = interp_norm(D, path.values[:, 0], ir.theta, ir.p, tgrid, space_norm=discrete_lp_norm(path.T, path.N, ir.space_p))
            if res.divergent_tail:
                log_msg(f"{pc.label}: interpolation integrand does not decay at the grid ends", logger, level="warning", echo_console=verbose)
            rows.append(["interp", ir.theta, ir.p, ir.space_p, res.norm, path.N, path.T])

        table = pd.DataFrame(rows, columns=NORM_TABLE_COLUMNS)
        log_msg(f"{pc.label}: {len(table)} norm values", logger, echo_console=verbose)
        _log_written(emit(table, "csv", out_dir / f"norm_table_{pc.label}.csv"), logger, verbose)
    return EXIT_OK


# ----------------------------------------------
# ENTRY
# ----------------------------------------------


def _log_written(path: Path, logger: logging.Logger | None, verbose: bool) -> None:
    log_msg(f"Wrote {path}", logger, echo_console=verbose)


def write_error(out_dir: Path, command: str, exc: BaseException, code: int) -> Path:
    """``error.json`` with ``command, error, message, exit_code``."""
    return emit(
        {"command": command, "error": type(exc).__name__, "message": str(exc), "exit_code": code},
        "json",
        out_dir / "error.json",
    )


def run(
        command: str,
        config_path: str | Path,
        out: str | Path | None = None,
        *,
        logger: logging.Logger | None = None,
        verbose: bool = False,
        ) -> int:
    """
    Load, validate and execute one command.

    Parameters
    ----------
    command : str
        ``check``, ``solve``, ``sweep`` or ``norms``.
    config_path : str | Path
        JSON or YAML config.
    out : str | Path | None
        Output directory override.
    logger : logging.Logger | None
        Run logger.
    verbose : bool
        Echo log messages to the console.

    Returns
    -------
    int
        Exit code.
    """
    log_banner(f"parab2 {command}", logger, echo_console=verbose)
    cfg: Config | None = None
    resolved: Path | None = None
    out_dir = resolve_output_dir(command, out, None, None)
    try:
        cfg, resolved = load_and_validate_config(config_path, command)
        out_dir = resolve_output_dir(command, out, cfg, resolved)
        out_dir.mkdir(parents=True, exist_ok=True)
        log_mapping(
            "Run settings:",
            {"config": str(resolved), "output_dir": str(out_dir), "threads": thread_count()},
            logger,
            echo_console=verbose,
        )
        base_dir = resolved.parent
        match command:
            case "check":
                return run_check(cfg, base_dir, out_dir, logger, verbose)
            case "solve":
                return run_solve(cfg, base_dir, out_dir, logger, verbose)
            case "sweep":
                return run_sweep(cfg, out_dir, logger, verbose)
            case _:
                return run_norms(cfg, base_dir, out_dir, logger, verbose)
    except Exception as e:
        code = exit_code_for(e)
        level = "error" if isinstance(e, Parab2Error) else "exception"
        log_msg(f"{type(e).__name__}: {e}", logger, level=level, echo_console=verbose, force=True)
        try:
            _log_written(write_error(out_dir, command, e, code), logger, verbose)
        except OSError as io_err:
            log_msg(f"Could not write error.json: {io_err}", logger, level="error", force=True)
        return code
