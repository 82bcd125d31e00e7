import math

import pytest

from modules.model.params import (
    ModelParams,
    admissible_theta_window,
    critical_exponent,
    critical_mass_ceiling,
    quasilinear_ceiling,
)
from modules.utils.errors import ParameterError


def test_exponent_landmarks():
    assert critical_exponent(1) == 8.0
    assert critical_exponent(2) == 6.0
    assert quasilinear_ceiling(3) == 12.0
    assert math.isinf(quasilinear_ceiling(2))


def test_theta_windows():
    assert admissible_theta_window(1) is None
    assert admissible_theta_window(2) == (2.0, 3.0)
    low, high = admissible_theta_window(3)
    assert low == pytest.approx(2.4) and high == pytest.approx(3.0)


def test_default_theta_per_dimension():
    assert ModelParams(N=1, p=8, a=1).theta is None
    assert ModelParams(N=2, p=7, a=1).theta == 2.5
    assert ModelParams(N=3, p=6, a=1).theta == 2.7
    assert ModelParams(N=4, p=5, a=1).theta == pytest.approx(3.0)


def test_exponent_above_quasilinear_ceiling_names_hypothesis():
    with pytest.raises(ParameterError) as info:
        ModelParams(N=3, p=13, a=1)
    assert info.value.hypothesis == "H2"
    assert info.value.field == "p"
    assert "[H2]" in str(info.value)


@pytest.mark.parametrize("kwargs, field", [
    ({"N": 2, "p": 7, "a": 1, "theta": 3.5}, "theta"),
    ({"N": 1, "p": 8, "a": 1, "mu": 0.1}, "mu"),
    ({"N": 2, "p": 7, "a": 0.0}, "a"),
    ({"N": 2, "p": 7, "a": 1, "mu": 1.5}, "mu"),
    ({"N": 0, "p": 7, "a": 1}, "N"),
    ({"N": 2, "p": 2.0, "a": 1}, "p"),
])
def test_invalid_parameters(kwargs, field):
    with pytest.raises(ParameterError) as info:
        ModelParams(**kwargs)
    assert info.value.field == field


def test_regimes():
    assert ModelParams(N=1, p=8, a=1).regime == "critical"
    assert ModelParams(N=1, p=9, a=1).regime == "supercritical"
    assert ModelParams(N=1, p=6, a=1).regime == "subcritical"
    assert ModelParams(N=2, p=6, a=1).is_critical


def test_hypotheses():
    with pytest.raises(ParameterError):
        ModelParams(N=2, p=5, a=1).check_hypotheses()
    with pytest.raises(ParameterError) as info:
        ModelParams(N=4, p=6, a=1).check_hypotheses()
    assert info.value.hypothesis == "H2"
    ModelParams(N=3, p=6, a=1).check_hypotheses()


def test_critical_mass_window():
    with pytest.raises(ParameterError) as info:
        ModelParams(N=1, p=8, a=2.0).check_hypotheses(a_star=2.5)
    assert info.value.hypothesis == "H3"
    ModelParams(N=1, p=8, a=3.0).check_hypotheses(a_star=2.5)

    assert critical_mass_ceiling(4, 1.0) == pytest.approx(4.0)
    assert math.isinf(critical_mass_ceiling(3, 1.0))
    with pytest.raises(ParameterError) as info:
        ModelParams(N=4, p=5, a=4.5).check_hypotheses(a_star=1.0)
    assert info.value.hypothesis == "H4"
    ModelParams(N=4, p=5, a=2.0).check_hypotheses(a_star=1.0)


def test_with_helpers_revalidate():
    params = ModelParams(N=2, p=7, a=1, mu=0.1)
    assert params.with_mu(0.0).mu == 0.0
    assert params.with_mass(2.0).a == 2.0
    with pytest.raises(ParameterError):
        params.with_mass(-1.0)
