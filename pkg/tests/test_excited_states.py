import math

import numpy as np
import pytest

from modules.model.params import ModelParams
from modules.solvers.excited_states import MAX_NODES, count_nodes, excited_state, match_height, shooting_horizon
from modules.utils.errors import ParameterError


def test_count_nodes():
    r = np.linspace(0.0, 10.0, 2001)
    assert count_nodes(np.cos(r) * np.exp(-r)) == 3
    assert count_nodes(np.exp(-r)) == 0
    assert count_nodes(np.zeros(10)) == 0


def test_count_nodes_ignores_tail_noise():
    values = np.concatenate([np.linspace(1.0, 0.0, 50), 1e-13 * np.array([1, -1, 1, -1])])
    assert count_nodes(values, deadband=1e-10) == 0
    assert count_nodes(values, deadband=0.0) == 3


def test_node_index_is_bounded():
    with pytest.raises(ParameterError) as info:
        excited_state(ModelParams(N=2, p=7.0, a=1.0), MAX_NODES + 1)
    assert info.value.field == "k"


def test_excited_states_need_supercritical_exponent():
    with pytest.raises(ParameterError) as info:
        excited_state(ModelParams(N=2, p=5.0, a=1.0), 1)
    assert info.value.hypothesis == "H1"


def test_excited_states_need_two_dimensions():
    with pytest.raises(ParameterError) as info:
        excited_state(ModelParams(N=1, p=9.0, a=1.0), 1)
    assert info.value.hypothesis == "H1'"
    assert info.value.field == "N"


def test_shooting_horizon_shrinks_with_lambda():
    assert shooting_horizon(10.0, 4e4, 0) == pytest.approx(0.4)
    assert shooting_horizon(10.0, 4e4, 1) == pytest.approx(2.0 * shooting_horizon(10.0, 4e4, 0))


def test_height_match_carries_the_mass():
    params = ModelParams(N=2, p=7.0, a=1.0)
    sol, outcome, shots = match_height(50.0, params, 0)
    assert not outcome.overshoot
    assert outcome.zeros == 0
    assert outcome.mass > 0.0
    assert shots > 10
    r = np.linspace(1e-6, outcome.radius, 20001)
    u = sol.sol(r)[0]
    assert outcome.mass == pytest.approx(2.0 * np.pi * np.trapezoid(r * u * u, r), rel=1e-6)


@pytest.mark.slow
def test_excited_state_ladder():
    params = ModelParams(N=2, p=7.0, a=1.0)
    reports = [excited_state(params, k, n_nodes=6001) for k in (0, 1, 2)]
    for k, report in enumerate(reports):
        assert report.node_count == k
        assert report.converged
        assert report.pohozaev_residual <= 1e-4
        assert report.multiplier_balance <= 1e-4
        assert report.el_residual <= 1e-3
        assert report.extras["ode_mass"] == pytest.approx(1.0, rel=1e-9)
        assert report.mass == pytest.approx(1.0, rel=1e-3)
        assert report.lam == pytest.approx(report.extras["shooting_lambda"], rel=1e-3)
        assert report.profile.grid.R_max * math.sqrt(report.extras["shooting_lambda"]) > 20.0
    assert reports[0].extras["shooting_lambda"] == pytest.approx(68339.0, rel=2e-2)
    energies = [report.energy for report in reports]
    assert energies[0] < energies[1] < energies[2]
