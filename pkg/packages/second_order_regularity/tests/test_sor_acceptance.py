# packages/second_order_regularity/tests/test_sor_acceptance.py

"""End-to-end properties on the damped wave gallery and the scalar phase diagram."""

import math

import numpy as np
import pytest

from second_order_regularity.analysis.norms import SampledPath
from second_order_regularity.analysis.pencil import critical_angle, predict_parabolic_angle
from second_order_regularity.gallery.problems import gallery, spatial_profile
from second_order_regularity.gallery.sweep import DEFAULT_MARGIN, sweep
from second_order_regularity.solvers.contour import apply_L, apply_S
from second_order_regularity.solvers.ivp import RegularityMode, compare_methods, contour_for_problem, maxreg_ratio, solve_ivp

ADMISSIBLE = [("strong_damping", 1.0), ("strong_damping_drift", 1.0), ("intermediate_damping", 2.5), ("scalar", 1.0)]


def relative_sup(a: SampledPath, b: SampledPath) -> float:
    return (a - b).sup_norm() / b.sup_norm()


def right_inverse_residual(N: int) -> float:
    problem = gallery("strong_damping", 8, 1.0, 1.0, 0.5, N=N).problem
    contour = contour_for_problem(problem, tol=1e-9, nodes_per_ray=200)
    u = apply_S(problem.A, problem.B, contour, problem.f)
    return relative_sup(apply_L(problem.A, problem.B, u), problem.f)


class TestInverseIdentities:
    def test_right_inverse_converges_at_second_order(self):
        coarse = right_inverse_residual(128)
        fine = right_inverse_residual(256)
        assert coarse <= 1e-2
        assert coarse / fine >= 3.0

    def test_left_inverse(self):
        problem = gallery("strong_damping", 8, 1.0, 1.0, 0.5, N=128).problem
        profile = spatial_profile(8)
        u = SampledPath.from_function(lambda t: (t**2 * (1 - t))[:, None] * profile[None, :], 1.0, 128)
        f = apply_L(problem.A, problem.B, u)
        contour = contour_for_problem(problem, nodes_per_ray=200)
        assert relative_sup(apply_S(problem.A, problem.B, contour, f), u) <= 1e-2


@pytest.mark.slow
class TestMethodAgreement:
    @pytest.mark.parametrize("name, alpha", ADMISSIBLE)
    def test_contour_matches_timestepping(self, name, alpha):
        inst = gallery(name, 8, 1.0, alpha, 0.5, N=256)
        assert inst.expected_admissible
        contour = contour_for_problem(inst.problem, nodes_per_ray=200)
        assert compare_methods(inst.problem, contour) <= 1e-3


@pytest.mark.slow
class TestHolderStability:
    def test_maxreg_ratio_settles_under_refinement(self):
        ratios = []
        for N in (128, 256):
            problem = gallery("strong_damping", 8, 1.0, 1.0, 0.5, N=N, forcing="rough").problem
            contour = contour_for_problem(problem, nodes_per_ray=200)
            report = solve_ivp(problem, contour, RegularityMode.holder(0.5))
            ratios.append(maxreg_ratio(report, 0.5))
        assert all(math.isfinite(r) and r > 0 for r in ratios)
        assert abs(ratios[1] - ratios[0]) / ratios[0] < 0.15


@pytest.mark.slow
class TestPhaseDiagram:
    def test_crossover_follows_the_pole_locus(self):
        alphas = [0.5, 1.0, 1.9]
        phis = [round(x, 2) for x in np.linspace(0.05, 2.95, 30)]
        table = sweep([0.5], alphas, phis)
        assert len(table) == len(alphas) * len(phis)

        phi2 = math.pi / 2 + DEFAULT_MARGIN
        step = 0.1
        for row in table.itertuples(index=False):
            predicted = predict_parabolic_angle(0.5, row.alpha)
            if row.phi <= predicted - 2 * DEFAULT_MARGIN - step / 2:
                assert row.certified, row
                assert not row.certified_failure, row
                assert row.sup_H < math.inf
            if row.phi >= predicted + DEFAULT_MARGIN:
                assert not row.certified, row
                assert row.certified_failure, row
            # the poles cross the sector boundary where the oracle says they do
            if abs(critical_angle(1.0, row.alpha, 0.5, row.phi) - phi2) > step / 2:
                assert row.certified == (critical_angle(1.0, row.alpha, 0.5, row.phi) > phi2), row

    def test_predicted_angles(self):
        assert predict_parabolic_angle(0.5, 1.0) == pytest.approx(math.pi / 3)
        assert predict_parabolic_angle(0.5, 0.5) == pytest.approx(0.5054, abs=1e-4)
        assert predict_parabolic_angle(0.5, 1.9) == pytest.approx(2.5065, abs=1e-4)
