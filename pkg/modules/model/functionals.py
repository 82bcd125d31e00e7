"""Scalar functionals of the quasilinear problem, all expressed through five integrals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField, radial_derivative
from modules.utils.errors import ParameterError


@dataclass(frozen=True)
class FiberMasses:
    """int|grad u|^theta, int|grad u|^2, int u^2|grad u|^2, int|u|^p and the mass int u^2."""
    A_theta: float
    A_grad: float
    A_quad: float
    A_p: float
    M: float

    def scaled_mass(self, factor: float, params: ModelParams) -> "FiberMasses":
        """Masses of c*u given those of u (pure amplitude scaling)."""
        c = abs(factor)
        theta = params.theta if params.theta is not None else 2.0
        return FiberMasses(
            A_theta=c ** theta * self.A_theta,
            A_grad=c ** 2 * self.A_grad,
            A_quad=c ** 4 * self.A_quad,
            A_p=c ** params.p * self.A_p,
            M=c ** 2 * self.M,
        )

    def as_dict(self) -> dict:
        return {"A_theta": self.A_theta, "A_grad": self.A_grad, "A_quad": self.A_quad, "A_p": self.A_p, "M": self.M}


def gamma_exponent(q: float, N: int) -> float:
    """gamma_q = N(q-2)/(2q)."""
    if q <= 0:
        raise ValueError("gamma_exponent needs q > 0")
    return N * (q - 2.0) / (2.0 * q)


def compute_masses(u: RadialField, params: ModelParams) -> FiberMasses:
    """Evaluate the five integrals on the grid."""
    grid = u.grid
    v = u.values
    du = radial_derivative(u).values
    du2 = du * du
    A_theta = grid.integrate(np.abs(du) ** params.theta) if params.theta is not None else 0.0
    return FiberMasses(
        A_theta=A_theta,
        A_grad=grid.integrate(du2),
        A_quad=grid.integrate(v * v * du2),
        A_p=grid.integrate(np.abs(v) ** params.p),
        M=grid.integrate(v * v),
    )


# ─────────────────────────────────────────
# ⚖️ ENERGIES AND THE POHOZAEV FUNCTIONAL
# ─────────────────────────────────────────

def energy_I(m: FiberMasses, params: ModelParams) -> float:
    """I(u) = A_grad/2 + A_quad - A_p/p."""
    return 0.5 * m.A_grad + m.A_quad - m.A_p / params.p


def energy_I_mu(m: FiberMasses, params: ModelParams) -> float:
    """I_mu(u) = (mu/theta) A_theta + I(u)."""
    perturbation = params.mu / params.theta * m.A_theta if params.mu > 0 else 0.0
    return perturbation + energy_I(m, params)


def pohozaev_terms(m: FiberMasses, params: ModelParams) -> tuple:
    """The four signed contributions to Q_mu(u)."""
    N = params.N
    theta_term = 0.0
    if params.mu > 0:
        theta_term = (1.0 + gamma_exponent(params.theta, N)) * params.mu * m.A_theta
    return theta_term, m.A_grad, (2.0 + N) * m.A_quad, -gamma_exponent(params.p, N) * m.A_p


def pohozaev_Q_mu(m: FiberMasses, params: ModelParams) -> float:
    """Q_mu(u) = d/ds I_mu(s*u) at s = 0."""
    return float(sum(pohozaev_terms(m, params)))


def pohozaev_residual(m: FiberMasses, params: ModelParams) -> float:
    """|Q_mu| relative to the sum of its term magnitudes."""
    terms = pohozaev_terms(m, params)
    scale = sum(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale > 0 else 0.0


def pohozaev_gap_identity(m: FiberMasses, params: ModelParams) -> float:
    """Closed form of I_mu - Q_mu/(p gamma_p); nonnegative in the supercritical regime."""
    N, p, mu = params.N, params.p, params.mu
    pg = p * gamma_exponent(p, N)
    value = (pg - 2.0) / (2.0 * pg) * m.A_grad + (pg - 2.0 - N) / pg * m.A_quad
    if mu > 0:
        theta = params.theta
        value += (pg - theta - theta * gamma_exponent(theta, N)) / (theta * pg) * mu * m.A_theta
    return value


# ─────────────────────────────────────────
# 🧮 LAGRANGE MULTIPLIER
# ─────────────────────────────────────────

def lagrange_lambda(m: FiberMasses, params: ModelParams) -> float:
    """Multiplier from testing the Euler-Lagrange equation with u."""
    if not m.M > 0:
        raise ParameterError("multiplier needs a field of positive mass", field="mass")
    theta_part = params.mu * m.A_theta if params.mu > 0 else 0.0
    return (m.A_p - theta_part - m.A_grad - 4.0 * m.A_quad) / m.M


def _balance_terms(m: FiberMasses, params: ModelParams) -> tuple:
    N, p = params.N, params.p
    g_p = gamma_exponent(p, N)
    lam_side = lagrange_lambda(m, params) * g_p * m.M
    theta_part = 0.0
    if params.mu > 0:
        theta_part = (1.0 + gamma_exponent(params.theta, N) - g_p) * params.mu * m.A_theta
    rhs = (theta_part, (1.0 - g_p) * m.A_grad, (2.0 + N - 4.0 * g_p) * m.A_quad)
    return lam_side, rhs


def multiplier_balance(m: FiberMasses, params: ModelParams) -> float:
    """
    lambda gamma_p M minus its value predicted by Q_mu = 0.

    The coefficients are gamma_theta-gamma_p+1, 1-gamma_p and 2+N-4 gamma_p,
    i.e. 1+N(theta-p)/(p theta), (2N-(N-2)p)/(2p) and (4N-(N-2)p)/p.
    """
    lam_side, rhs = _balance_terms(m, params)
    return lam_side - sum(rhs)


def multiplier_balance_relative(m: FiberMasses, params: ModelParams) -> float:
    """multiplier_balance divided by the magnitude of the terms it compares."""
    lam_side, rhs = _balance_terms(m, params)
    scale = abs(lam_side) + sum(abs(t) for t in rhs)
    return abs(lam_side - sum(rhs)) / scale if scale > 0 else 0.0


# ─────────────────────────────────────────
# 🎯 MASS-CRITICAL QUANTITIES
# ─────────────────────────────────────────

def critical_set_membership(m: FiberMasses, N: int) -> bool:
    """True iff A_quad < N/(4(N+1)) A_p (the open set where fibers have a maximum)."""
    return m.A_quad < N / (4.0 * (N + 1.0)) * m.A_p


def critical_gradient_control(m: FiberMasses, params: ModelParams, a_star: float) -> float:
    """A_grad - (N+2)((a/a*)^{2/N} - 1) A_quad; nonpositive on the critical manifold at mu = 0."""
    N = params.N
    return m.A_grad - (N + 2.0) * ((m.M / a_star) ** (2.0 / N) - 1.0) * m.A_quad


def nonexistence_certificate(m: FiberMasses, params: ModelParams, a_star: float) -> float:
    """
    Lower bound for Q(u) at p = p*, mu = 0 given the sharp GN inequality.

    For mass at most a* this is positive for every nonzero field, so Q = 0 is
    impossible and no normalized solution exists.
    """
    N = params.N
    return m.A_grad + (2.0 + N) * m.A_quad * (1.0 - (m.M / a_star) ** (2.0 / N))


def critical_lambda_lower_bound(m: FiberMasses, params: ModelParams, a_star: float) -> float:
    """[(N-2) - (N-2-4/N)(a/a*)^{2/N}] A_quad / a, the multiplier bound behind the N >= 4 mass window."""
    N = params.N
    if not m.M > 0:
        raise ParameterError("bound needs a field of positive mass", field="mass")
    factor = (N - 2.0) - (N - 2.0 - 4.0 / N) * (m.M / a_star) ** (2.0 / N)
    return factor * m.A_quad / m.M


def gn_exponents(p: float, N: int) -> tuple:
    """Exponents (alpha, kappa) on the mass and on 4 int u^2|grad u|^2 in the GN-type inequality."""
    alpha = (4.0 * N - p * (N - 2.0)) / (2.0 * (N + 2.0))
    kappa = N * (p - 2.0) / (2.0 * (N + 2.0))
    return alpha, kappa


def manifold_energy_floor(params: ModelParams, gn_constant: float) -> float:
    """
    Positive lower bound for the energy on the Pohozaev manifold (supercritical).

    Uses (2+N) A_quad <= gamma_p K a^alpha (4 A_quad)^kappa with kappa > 1.
    """
    if params.regime != "supercritical":
        return 0.0
    N, p, a = params.N, params.p, params.a
    alpha, kappa = gn_exponents(p, N)
    g_p = gamma_exponent(p, N)
    quad_floor = ((2.0 + N) / (g_p * gn_constant * a ** alpha * 4.0 ** kappa)) ** (1.0 / (kappa - 1.0))
    pg = p * g_p
    return (pg - 2.0 - N) / pg * quad_floor
