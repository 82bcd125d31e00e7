"""Gagliardo-Nirenberg-type inequality checks for int |u|^p."""
from typing import Optional

from modules.model.functionals import compute_masses, gn_exponents
from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField
from modules.utils.errors import ParameterError


def closed_form_gn_constant(p: float, N: int, qp_l1_norm: float) -> float:
    """The printed sharp prefactor C(p,N)/||Q_p||_1^{(p-2)/(N+2)}, kept only for comparison."""
    base = 4.0 * N - (N - 2.0) * p
    C = p * (N + 2.0) / (
        base ** ((4.0 - N * (p - 2.0)) / (2.0 * (N + 2.0)))
        * (2.0 * N * (p - 2.0)) ** (N * (p - 2.0) / (2.0 * (N + 2.0)))
    )
    return C / qp_l1_norm ** ((p - 2.0) / (N + 2.0))


def gn_functional_check(u: RadialField, params: ModelParams, gn_constant: Optional[float] = None) -> float:
    """
    Ratio of int |u|^p to its sharp Gagliardo-Nirenberg bound; at most 1 up to discretization.

    The constant defaults to the one measured on the shooting profile Q_p.
    """
    m = compute_masses(u, params)
    if m.M == 0.0:
        raise ParameterError("GN ratio is undefined for the zero field", field="u")
    if gn_constant is None:
        from modules.solvers.qp_shooting import sharp_gn_constant

        gn_constant = sharp_gn_constant(params.p, params.N)
    alpha, kappa = gn_exponents(params.p, params.N)
    bound = gn_constant * m.M ** alpha * (4.0 * m.A_quad) ** kappa
    if bound == 0.0:
        raise ParameterError("GN ratio needs a nonconstant field", field="u")
    return m.A_p / bound


def critical_equality_ratio(u: RadialField, params: ModelParams) -> float:
    """int|u|^{p*} over (4(N+1)/N) int u^2|grad u|^2; equals 1 at u = Q_{p*}^{1/2}."""
    m = compute_masses(u, params)
    N = params.N
    return m.A_p / (4.0 * (N + 1.0) / N * m.A_quad)
