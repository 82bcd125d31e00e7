"""Model parameters, functionals and variational derivatives."""
from modules.model.params import (
    DEFAULT_THETA,
    ModelParams,
    admissible_theta_window,
    critical_exponent,
    critical_mass_ceiling,
    quasilinear_ceiling,
)
from modules.model.functionals import (
    FiberMasses,
    compute_masses,
    critical_gradient_control,
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
    pohozaev_gap_identity,
    pohozaev_Q_mu,
    pohozaev_residual,
)
from modules.model.gradient import el_residual, functional_gradient
from modules.model.gn_check import closed_form_gn_constant, critical_equality_ratio, gn_functional_check
