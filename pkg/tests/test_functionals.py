import math

import numpy as np
import pytest

from modules.model.functionals import (
    FiberMasses,
    compute_masses,
    critical_lambda_lower_bound,
    critical_set_membership,
    energy_I,
    energy_I_mu,
    gamma_exponent,
    gn_exponents,
    lagrange_lambda,
    manifold_energy_floor,
    multiplier_balance,
    multiplier_balance_relative,
    nonexistence_certificate,
    pohozaev_Q_mu,
    pohozaev_gap_identity,
    pohozaev_residual,
)
from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField
from modules.utils.errors import ParameterError


def _random_masses(rng, theta=True):
    return FiberMasses(
        A_theta=rng.uniform(0.1, 3.0) if theta else 0.0,
        A_grad=rng.uniform(0.1, 3.0),
        A_quad=rng.uniform(0.1, 3.0),
        A_p=rng.uniform(0.1, 3.0),
        M=rng.uniform(0.5, 2.0),
    )


def _on_pohozaev_manifold(m: FiberMasses, params: ModelParams) -> FiberMasses:
    """Replace A_p by the value that makes Q_mu vanish."""
    N = params.N
    rest = m.A_grad + (2.0 + N) * m.A_quad
    if params.mu > 0:
        rest += (1.0 + gamma_exponent(params.theta, N)) * params.mu * m.A_theta
    return FiberMasses(m.A_theta, m.A_grad, m.A_quad, rest / gamma_exponent(params.p, N), m.M)


def test_gamma_exponent():
    assert gamma_exponent(2.0, 3) == 0.0
    assert gamma_exponent(8.0, 1) == pytest.approx(3.0 / 8.0)
    with pytest.raises(ValueError):
        gamma_exponent(0.0, 1)


def test_gaussian_masses_in_one_dimension(grid_1d, gaussian):
    m = compute_masses(gaussian(grid_1d), ModelParams(N=1, p=8, a=1))
    assert m.M == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-8)
    assert m.A_p == pytest.approx(math.sqrt(math.pi / 8.0), rel=1e-8)
    assert m.A_grad == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-4)
    assert m.A_quad == pytest.approx(math.sqrt(math.pi) / 4.0, rel=1e-4)
    assert m.A_theta == 0.0


def test_amplitude_scaling_of_masses(grid_2d, gaussian):
    params = ModelParams(N=2, p=7, a=1)
    u = gaussian(grid_2d, width=1.5)
    expected = compute_masses(u, params).scaled_mass(1.7, params)
    actual = compute_masses(u.scaled(1.7), params)
    for key, value in expected.as_dict().items():
        assert actual.as_dict()[key] == pytest.approx(value, rel=1e-12)


def test_energy_grows_with_perturbation_weight(rng):
    params = ModelParams(N=2, p=7, a=1)
    m = _random_masses(rng)
    energies = [energy_I_mu(m, params.with_mu(mu)) for mu in (0.0, 1e-3, 1e-2, 1e-1)]
    assert energies[0] == energy_I(m, params)
    assert all(b > a for a, b in zip(energies, energies[1:]))


@pytest.mark.parametrize("N, p, mu", [(1, 9.0, 0.0), (2, 7.0, 0.0), (2, 7.0, 0.05), (3, 6.0, 0.01)])
def test_gap_identity(rng, N, p, mu):
    params = ModelParams(N=N, p=p, a=1, mu=mu)
    pg = p * gamma_exponent(p, N)
    for _ in range(20):
        m = _random_masses(rng, theta=N > 1)
        expected = energy_I_mu(m, params) - pohozaev_Q_mu(m, params) / pg
        assert pohozaev_gap_identity(m, params) == pytest.approx(expected, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("N, p, mu", [(1, 9.0, 0.0), (2, 7.0, 0.0), (2, 7.0, 0.05), (3, 6.0, 0.01), (3, 5.5, 0.1)])
def test_multiplier_balance_vanishes_on_manifold(rng, N, p, mu):
    params = ModelParams(N=N, p=p, a=1, mu=mu)
    for _ in range(20):
        m = _on_pohozaev_manifold(_random_masses(rng, theta=N > 1), params)
        assert pohozaev_residual(m, params) < 1e-13
        assert multiplier_balance_relative(m, params) < 1e-12


def test_multiplier_balance_detects_pohozaev_defect(rng):
    params = ModelParams(N=2, p=7, a=1)
    m = _on_pohozaev_manifold(_random_masses(rng), params)
    shifted = FiberMasses(m.A_theta, m.A_grad, m.A_quad, 1.1 * m.A_p, m.M)
    assert abs(multiplier_balance(shifted, params)) > 1e-3
    assert pohozaev_residual(shifted, params) > 1e-3


def test_multiplier_needs_mass():
    with pytest.raises(ParameterError) as info:
        lagrange_lambda(FiberMasses(0.0, 1.0, 1.0, 1.0, 0.0), ModelParams(N=1, p=8, a=1))
    assert info.value.field == "mass"


def test_zero_field_has_zero_residual(grid_2d):
    params = ModelParams(N=2, p=7, a=1)
    m = compute_masses(RadialField.zeros(grid_2d), params)
    assert pohozaev_residual(m, params) == 0.0


def test_critical_set_and_certificate():
    params = ModelParams(N=1, p=8, a=1)
    inside = FiberMasses(0.0, 1.0, 1.0, 10.0, 3.0)
    outside = FiberMasses(0.0, 1.0, 1.0, 2.0, 3.0)
    assert critical_set_membership(inside, 1)
    assert not critical_set_membership(outside, 1)
    below = FiberMasses(0.0, 1.0, 1.0, 2.0, 2.0)
    assert nonexistence_certificate(below, params, a_star=2.5) > below.A_grad
    above = FiberMasses(0.0, 0.01, 1.0, 2.0, 10.0)
    assert nonexistence_certificate(above, params, a_star=2.5) < 0.0


def test_critical_lambda_bound_sign():
    m = FiberMasses(0.0, 1.0, 1.0, 2.0, 1.0)
    params = ModelParams(N=4, p=5, a=1)
    assert critical_lambda_lower_bound(m, params, a_star=1.0) == pytest.approx(1.0)
    assert critical_lambda_lower_bound(
        FiberMasses(0.0, 1.0, 1.0, 2.0, 4.0), params, a_star=1.0
    ) == pytest.approx(0.0, abs=1e-12)


def test_gn_exponents_at_critical_exponent():
    for N in (1, 2, 3):
        alpha, kappa = gn_exponents(4.0 + 4.0 / N, N)
        assert alpha == pytest.approx(2.0 / N)
        assert kappa == pytest.approx(1.0)


def test_manifold_energy_floor():
    assert manifold_energy_floor(ModelParams(N=1, p=8, a=1), 1.0) == 0.0
    low = manifold_energy_floor(ModelParams(N=2, p=7, a=1), 1.0)
    high = manifold_energy_floor(ModelParams(N=2, p=7, a=0.5), 1.0)
    assert 0.0 < low < high
    assert np.isfinite(high)
