"""Variational derivative of I_mu on the grid and the pointwise Euler-Lagrange residual."""
import numpy as np

from modules.model.functionals import gamma_exponent
from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField, radial_derivative, radial_laplacian

THETA_REGULARIZATION = 1e-14


def _dilation_factors(params: ModelParams, s: float) -> tuple:
    """e^{rate*s} for the gradient, quasilinear, power and theta terms of I_mu(s*u)."""
    if s == 0.0:
        return 1.0, 1.0, 1.0, 1.0
    N = params.N
    theta_factor = 1.0
    if params.mu > 0:
        theta_factor = np.exp(params.theta * (1.0 + gamma_exponent(params.theta, N)) * s)
    return (
        np.exp(2.0 * s),
        np.exp((2.0 + N) * s),
        np.exp(params.p * gamma_exponent(params.p, N) * s),
        theta_factor,
    )


def _flux(du: np.ndarray, v: np.ndarray, params: ModelParams, factors: tuple = (1.0, 1.0, 1.0, 1.0)) -> np.ndarray:
    """Coefficient multiplying phi' in the first variation."""
    f_grad, f_quad, _, f_theta = factors
    flux = f_grad * du + f_quad * 2.0 * v * v * du
    if params.mu > 0:
        flux = flux + f_theta * params.mu * (du * du + THETA_REGULARIZATION) ** ((params.theta - 2.0) / 2.0) * du
    return flux


def functional_gradient(u: RadialField, params: ModelParams, s: float = 0.0) -> RadialField:
    """
    L2 gradient g of u -> I_mu(s*u), the discrete adjoint of the quadrature energy.

    <g, phi> equals the exact directional derivative of the discretized functional, so
    at s = 0 g is the weak form of -mu div(|grad u|^{theta-2} grad u) - Lap u
    - 2 div(u^2 grad u) + 2u|grad u|^2 - |u|^{p-2}u. A nonzero s weights each term
    by its fiber rate, which at the fiber maximum is the gradient of u -> max_s I_mu(s*u).
    """
    grid = u.grid
    v = u.values
    D = grid.derivative_matrix
    du = D @ v
    w = grid.weights
    factors = _dilation_factors(params, s)
    local = factors[1] * 2.0 * v * du * du - factors[2] * np.abs(v) ** (params.p - 2.0) * v
    dual = D.T @ (w * _flux(du, v, params, factors)) + w * local

    g = np.zeros_like(v)
    massive = w > 0
    g[massive] = dual[massive] / w[massive]
    if not massive[0]:
        # origin carries no weight; even extrapolation
        g[0] = (4.0 * g[1] - g[2]) / 3.0
    return RadialField(grid, g)
def el_terms(u: RadialField, lam: float, params: ModelParams) -> tuple:
    """(1+2u^2) Lap u, 2u(u')^2, -lambda u and |u|^{p-2}u, pointwise."""
    v = u.values
    lap = radial_laplacian(u).values
    du = radial_derivative(u).values
    return (
        (1.0 + 2.0 * v * v) * lap,
        2.0 * v * du * du,
        -lam * v,
        np.abs(v) ** (params.p - 2.0) * v,
    )


def el_residual(u: RadialField, lam: float, params: ModelParams) -> float:
    """L2 norm of the radial Euler-Lagrange residual over the L2 norm of its largest term."""
    grid = u.grid
    terms = el_terms(u, lam, params)
    norms = [np.sqrt(grid.integrate(t * t)) for t in terms]
    scale = max(norms)
    if scale == 0.0:
        return 0.0
    total = sum(terms)
    return float(np.sqrt(grid.integrate(total * total)) / scale)
