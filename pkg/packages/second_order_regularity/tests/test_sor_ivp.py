# packages/second_order_regularity/tests/test_sor_ivp.py

"""Cauchy problems: lifting, compatibility, both solution methods and maximal-regularity ratios."""

import math

import numpy as np
import pytest

from second_order_regularity.analysis.norms import SampledPath
from second_order_regularity.operators.core import Operator
from second_order_regularity.solvers.ivp import (
    CauchyProblem,
    RegularityMode,
    check_compatibility,
    compare_methods,
    contour_for_problem,
    maxreg_ratio,
    solution_path,
    solve_ivp,
)
from second_order_regularity.solvers.timestep import timestep_oracle
from second_order_regularity.utils.errors import CompatibilityError, SingularSystemError, ZeroNormError


def scalar_problem(f: SampledPath, u0=None, u1=None, a: float = 1.0, b: float = 2.0) -> CauchyProblem:
    return CauchyProblem(Operator(a), Operator(b), f, u0, u1)


class TestTimestepOracle:
    def test_constant_forcing_of_the_double_pole(self):
        f = SampledPath(1.0, np.ones(256))
        u = timestep_oracle(Operator(1.0), Operator(2.0), f)
        t = f.times()
        assert np.abs(u.values[:, 0] - (1 - np.exp(-t) * (1 + t))).max() <= 1e-4

    def test_free_oscillation_and_velocity(self):
        f = SampledPath(1.0, np.zeros(201))
        u, du = timestep_oracle(Operator(1.0), Operator(0.0), f, np.array([1.0]), return_velocity=True)
        t = f.times()
        np.testing.assert_allclose(u.values[:, 0].real, np.cos(t), atol=1e-4)
        np.testing.assert_allclose(du.values[:, 0].real, -np.sin(t), atol=1e-4)
        assert du.label == "du"

    def test_singular_step_matrix(self):
        # I − (Δt/2)M is singular for a = 6, b = −5 at Δt = 1
        with pytest.raises(SingularSystemError):
            timestep_oracle(Operator(6.0), Operator(-5.0), SampledPath(3.0, np.zeros(4)))

    def test_initial_data_length(self):
        with pytest.raises(ValueError):
            timestep_oracle(Operator(1.0), Operator(1.0), SampledPath(1.0, np.zeros(8)), np.ones(2))


class TestCauchyProblem:
    def test_initial_data_default_to_zero(self):
        p = scalar_problem(SampledPath(1.0, np.ones(8)))
        np.testing.assert_array_equal(p.u0, [0.0])
        assert (p.T, p.N, p.dim) == (1.0, 8, 1)

    def test_validation(self):
        f = SampledPath(1.0, np.ones(8))
        with pytest.raises(ValueError):
            CauchyProblem(Operator(np.eye(2)), Operator(np.eye(2)), f)
        with pytest.raises(ValueError):
            scalar_problem(SampledPath(1.0, np.ones(3)))
        with pytest.raises(ValueError):
            scalar_problem(f, u0=np.array([np.inf]))

    def test_lift_removes_the_initial_data(self):
        f = SampledPath(1.0, np.full(5, 4.0))
        x0, g = scalar_problem(f, u0=[1.0], u1=[0.5]).lift()
        t = f.times()
        np.testing.assert_allclose(x0.values[:, 0], 1 + 0.5 * t)
        # g = f − B u1 − A x0
        np.testing.assert_allclose(g.values[:, 0], 4 - 2 * 0.5 - (1 + 0.5 * t))


class TestRegularityMode:
    def test_defaults(self):
        mode = RegularityMode()
        assert (mode.kind, mode.theta) == ("holder", 0.5)
        assert mode.requires_compatibility
        assert mode.default_norms() == [("holder", 0.5, math.inf, math.inf)]

    def test_little_holder_reports_both(self):
        kinds = [k for k, *_ in RegularityMode("little_holder", 0.3).default_norms()]
        assert kinds == ["holder", "little_holder"]

    def test_little_holder_solve_on_a_short_grid(self):
        f = SampledPath.from_function(lambda t: t**2, 1.0, 8)
        report = solve_ivp(scalar_problem(f), None, RegularityMode("little_holder", 0.5))
        defects = [v for (_, kind, *_), v in report.norm_table.items() if kind == "little_holder"]
        assert defects and all(math.isfinite(v) for v in defects)

    @pytest.mark.parametrize("theta, p, needed", [(0.25, 2.0, False), (0.5, 2.0, True), (0.75, 2.0, True)])
    def test_besov_compatibility_threshold(self, theta, p, needed):
        assert RegularityMode.besov(theta, p, 2.0).requires_compatibility is needed

    def test_validation(self):
        with pytest.raises(ValueError):
            RegularityMode("sobolev")
        with pytest.raises(ValueError):
            RegularityMode.holder(1.0)
        with pytest.raises(ValueError):
            RegularityMode.besov(0.5, math.inf, 2.0)


class TestCompatibility:
    def test_nonzero_trace_in_holder_mode(self):
        p = scalar_problem(SampledPath(1.0, np.ones(8)), a=1.0, b=1.0)
        with pytest.raises(CompatibilityError) as info:
            check_compatibility(p, RegularityMode.holder(0.5))
        assert info.value.defect == pytest.approx(1.0)

    def test_low_besov_exponent_skips_the_condition(self):
        p = scalar_problem(SampledPath(1.0, np.ones(8)), a=1.0, b=1.0)
        assert check_compatibility(p, RegularityMode.besov(0.25, 2.0, 2.0)) == pytest.approx(1.0)

    def test_compatible_data(self):
        p = scalar_problem(SampledPath(1.0, np.full(8, 3.0)), u0=[1.0], u1=[1.0], a=1.0, b=2.0)
        assert check_compatibility(p, RegularityMode.holder(0.5)) == pytest.approx(0.0, abs=1e-14)

    def test_solve_refuses_incompatible_data(self):
        p = scalar_problem(SampledPath(1.0, np.ones(16)))
        with pytest.raises(CompatibilityError):
            solve_ivp(p)


class TestSolve:
    def test_equilibrium(self):
        f = SampledPath(1.0, np.ones(32))
        p = scalar_problem(f, u0=[1.0], a=1.0, b=1.0)
        report = solve_ivp(p)
        np.testing.assert_allclose(report.u.values, 1.0, atol=1e-10)
        assert report.residual_inf <= 1e-8
        assert report.compatibility_defect == pytest.approx(0.0, abs=1e-14)
        assert maxreg_ratio(report, 0.5) == pytest.approx(1.0)
        with pytest.raises(ZeroNormError):
            maxreg_ratio(report, 0.5, seminorm=True)

    def test_report_contents(self):
        f = SampledPath.from_function(lambda t: np.sin(np.pi * t), 1.0, 64)
        p = scalar_problem(f)
        report = solve_ivp(p, norms=[("holder", 0.5, math.inf, math.inf), ("sup", 0.5, math.inf, math.inf)])
        assert list(report.components()) == ["u", "du", "ddu", "Bdu", "Au"]
        assert len(report.norm_table) == 10
        d = report.to_dict()
        assert d["method"] == "contour"
        assert d["contour"]["phi2"] == pytest.approx(0.95 * math.pi)
        assert d["norm_table"][0]["component"] == "u"

    def test_timestep_method_has_no_contour(self):
        f = SampledPath.from_function(lambda t: t, 1.0, 32)
        report = solve_ivp(scalar_problem(f), method="timestep")
        assert report.contour is None
        assert report.method == "timestep"

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solution_path(scalar_problem(SampledPath(1.0, np.zeros(8))), method="spectral")

    def test_initial_data_are_honoured(self):
        f = SampledPath(2.0, np.zeros(128))
        p = CauchyProblem(Operator(1.0), Operator(1.0), f, np.array([1.0]), np.array([-0.5]))
        u = solution_path(p, contour_for_problem(p, nodes_per_ray=200))
        assert u.values[0, 0] == pytest.approx(1.0, abs=1e-4)
        assert compare_methods(p, contour_for_problem(p, nodes_per_ray=200)) <= 1e-3

    def test_methods_agree_on_smooth_data(self):
        f = SampledPath.from_function(lambda t: t * np.cos(2 * t), 1.0, 128)
        p = scalar_problem(f)
        assert compare_methods(p, contour_for_problem(p, nodes_per_ray=150)) <= 1e-3
