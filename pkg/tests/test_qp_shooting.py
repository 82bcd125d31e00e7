import math

import numpy as np
import pytest
from scipy.special import beta as beta_fn

from modules.model.gn_check import closed_form_gn_constant, critical_equality_ratio, gn_functional_check
from modules.model.params import ModelParams, critical_exponent
from modules.radial_tools.grid import RadialField, RadialGrid
from modules.solvers.critical_scan import scan_grid
from modules.solvers.qp_shooting import (
    _overshoots,
    a_star,
    critical_gn_constant,
    first_integral,
    free_boundary_defect,
    qp_solution,
    sharp_gn_constant,
    shoot_free_boundary,
    shoot_qp,
)
from modules.utils.errors import ParameterError
from tests.helpers import smooth_field


def test_one_dimensional_height_is_pinned_by_first_integral():
    solution = qp_solution(8.0, 1)
    assert solution.beta == pytest.approx(4.0 ** (1.0 / 3.0), abs=1e-4)


def test_first_integral_vanishes_along_the_profile():
    solution = qp_solution(8.0, 1)
    r = np.linspace(0.0, solution.support_radius, 2001)
    assert np.max(np.abs(first_integral(solution, r))) < 1e-8


def test_shot_that_dips_below_zero_counts_as_overshoot():
    height = 4.0 ** (1.0 / 3.0)
    assert _overshoots(height * (1.0 + 1e-5), 8.0, 1)
    assert not _overshoots(height * (1.0 - 1e-5), 8.0, 1)


def test_one_dimensional_support_and_mass_have_closed_forms():
    solution = qp_solution(8.0, 1)
    b = 4.0 ** (1.0 / 3.0)
    assert solution.support_radius == pytest.approx(math.sqrt(b / 2.0) * beta_fn(1.0 / 6.0, 0.5) / 3.0, rel=1e-6)
    assert a_star(1) == pytest.approx(2.0 * math.sqrt(2.0) * math.pi / 3.0, rel=1e-6)


@pytest.mark.parametrize("p, N", [(8.0, 1), (6.0, 2), (7.0, 2), (16.0 / 3.0, 3)])
def test_free_boundary_conditions(p, N):
    w_defect, dw_defect = free_boundary_defect(qp_solution(p, N))
    assert w_defect < 1e-8
    assert dw_defect < 1e-8


def test_shooting_is_unique_across_brackets():
    default = qp_solution(7.0, 2)
    other = shoot_free_boundary(7.0, 2, beta_bracket=(1.0, 8.0))
    assert other.beta == pytest.approx(default.beta, rel=1e-10)
    assert other.l1_norm == pytest.approx(default.l1_norm, rel=1e-8)


def test_sampled_profile():
    grid = RadialGrid.uniform(1, R_max=5.0, n_nodes=2001)
    qp = shoot_qp(8.0, 1, grid)
    assert qp.profile.values[0] == pytest.approx(qp.beta, rel=1e-9)
    assert np.all(qp.profile.values[grid.r >= qp.support_radius] == 0.0)
    assert np.all(np.diff(qp.profile.values) <= 1e-12)
    assert grid.integrate(qp.profile.values) == pytest.approx(qp.l1_norm, rel=1e-4)


def test_sampling_refuses_mismatched_grid():
    with pytest.raises(ValueError):
        shoot_qp(8.0, 1, RadialGrid.uniform(2, R_max=5.0, n_nodes=101))


def test_exponent_window_is_enforced():
    with pytest.raises(ParameterError):
        shoot_free_boundary(13.0, 3)
    with pytest.raises(ParameterError):
        shoot_free_boundary(2.0, 1)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_critical_constant_agrees_with_threshold(N):
    assert sharp_gn_constant(critical_exponent(N), N) == pytest.approx(critical_gn_constant(N), rel=1e-6)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_equality_case_of_the_critical_inequality(N):
    grid = scan_grid(N)
    p_star = critical_exponent(N)
    root = shoot_qp(p_star, N, grid).sqrt_field()
    ratio = critical_equality_ratio(root, ModelParams(N=N, p=p_star, a=1.0))
    assert ratio == pytest.approx(1.0, abs=1e-2)


@pytest.mark.parametrize("N, p", [(1, 8.0), (2, 6.0), (2, 7.0), (3, 5.5)])
def test_gn_inequality_battery(rng, N, p):
    grid = RadialGrid.uniform(N, R_max=12.0, n_nodes=2401)
    params = ModelParams(N=N, p=p, a=1.0)
    ratios = [gn_functional_check(smooth_field(grid, rng), params) for _ in range(100)]
    assert max(ratios) <= 1.0 + 1e-2
    assert min(ratios) > 0.0


def test_gn_ratio_is_one_at_the_optimizer():
    N, p = 2, 7.0
    solution = qp_solution(p, N)
    grid = RadialGrid.uniform(N, R_max=math.ceil(solution.support_radius) + 1.0, n_nodes=8001)
    root = shoot_qp(p, N, grid).sqrt_field()
    assert gn_functional_check(root, ModelParams(N=N, p=p, a=1.0)) == pytest.approx(1.0, abs=1e-2)


def test_gn_check_rejects_zero_field(grid_2d):
    with pytest.raises(ParameterError):
        gn_functional_check(RadialField.zeros(grid_2d), ModelParams(N=2, p=7, a=1), gn_constant=1.0)


def test_closed_form_constant_is_finite():
    value = closed_form_gn_constant(7.0, 2, qp_solution(7.0, 2).l1_norm)
    assert math.isfinite(value) and value > 0.0
