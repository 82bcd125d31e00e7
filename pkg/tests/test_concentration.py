import math

import numpy as np
import pytest

from modules.radial_tools.grid import RadialField, RadialGrid
from modules.solvers.concentration import (
    CONCENTRATION_COLUMNS,
    blow_up_profile,
    concentration_study,
    distance_to_target,
    default_rescale_constant,
    write_concentration_csv,
)
from modules.solvers.qp_shooting import a_star, qp_solution


def test_rescale_constant():
    assert default_rescale_constant(1) == pytest.approx((a_star(1) / 4.0) ** (1.0 / 3.0))


def test_blow_up_profile_keeps_mass(grid_1d, gaussian):
    u = gaussian(grid_1d)
    same = blow_up_profile(u, 1.0, 1.0)
    assert same.values == pytest.approx(u.values ** 2)
    spread = blow_up_profile(u, 0.5, 1.0)
    assert spread.grid.R_max == pytest.approx(2.0 * grid_1d.R_max)
    assert spread.grid.integrate(spread.values) == pytest.approx(grid_1d.integrate(u.values ** 2), rel=1e-12)
    assert spread.grid.integrate(spread.values) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-9)


def test_distance_to_target_vanishes_on_the_target():
    solution = qp_solution(8.0, 1)
    grid = RadialGrid.uniform(1, R_max=6.0, n_nodes=3001)
    exact = RadialField(grid, solution.evaluate(grid.r))
    assert distance_to_target(exact, solution) == (0.0, 0.0)
    short = RadialGrid.uniform(1, R_max=1.0, n_nodes=1001)
    dist_l1, _ = distance_to_target(RadialField.zeros(short), solution)
    assert dist_l1 == pytest.approx(solution.l1_norm, rel=1e-3)


@pytest.mark.slow
def test_critical_ground_states_concentrate(tmp_path):
    grid = RadialGrid.uniform(1, R_max=20.0, n_nodes=8001)
    table = concentration_study(1, [0.05, 0.5, 0.1, 0.25], grid=grid)
    assert list(table["delta"]) == [0.5, 0.25, 0.1, 0.05]
    assert table["converged"].all()
    assert np.all(np.diff(table["eps_n"]) < 0)
    assert np.all(np.diff(table["dist_l2"]) < 0)
    assert table["dist_l2"].iloc[-1] <= 5e-2
    assert np.allclose(table["w_l1"], table["a_n"], rtol=1e-10)
    assert np.all(table["el_residual"] <= 1e-3)
    assert np.all(table["energy"] <= table["upper_level"] * (1.0 + 1e-8))

    path = write_concentration_csv(table, tmp_path / "concentration.csv")
    with open(path, encoding="utf-8") as fh:
        assert fh.readline().strip() == ",".join(CONCENTRATION_COLUMNS)
