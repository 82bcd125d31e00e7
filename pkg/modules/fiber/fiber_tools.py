"""The mass-preserving dilation s*u and the Pohozaev projection along its orbit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.optimize import brentq

from modules.model.functionals import (
    FiberMasses,
    compute_masses,
    critical_set_membership,
    gamma_exponent,
)
from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField, RadialGrid
from modules.radial_tools.resampling import evaluate_at
from modules.utils.errors import FiberRootError

S_LIMIT = 50.0
NEWTON_MAX_ITER = 60
ROOT_RTOL = 1e-10
LOG_CLIP = 700.0


@dataclass(frozen=True)
class FiberSolveResult:
    """Root s_mu(u) of the fiber derivative and the fiber-maximal energy K_mu(u)."""
    s_star: float
    energy_at_star: float
    iterations: int
    bracket: Tuple[float, float]


def scale_field(u: RadialField, s: float, keep_grid: bool = False) -> RadialField:
    """
    s*u(r) = e^{Ns/2} u(e^s r).

    By default the values e^{Ns/2} u go onto the grid of radius R_max e^{-s} with
    the same node count, so every discrete mass scales exactly by its fiber rate.
    keep_grid interpolates onto u's own grid instead.
    """
    if s == 0.0:
        return u
    grid = u.grid
    N = grid.dimension
    amplitude = math.exp(0.5 * N * s)
    if not keep_grid:
        target = RadialGrid.uniform(N, R_max=grid.R_max * math.exp(-s), n_nodes=grid.size)
        return RadialField(target, amplitude * u.values)
    return RadialField(grid, amplitude * evaluate_at(u, math.exp(s) * grid.r))


def _rates(params: ModelParams) -> dict:
    N = params.N
    rates = {"grad": 2.0, "quad": 2.0 + N, "p": params.p * gamma_exponent(params.p, N)}
    if params.mu > 0:
        rates["theta"] = params.theta * (1.0 + gamma_exponent(params.theta, N))
    return rates


def _exp(x: float) -> float:
    return math.exp(min(x, LOG_CLIP))


def _weighted_terms(m: FiberMasses, s: float, params: ModelParams, coefficients: dict) -> list:
    """coef * A * e^{rate s} for every active mass, evaluated as exp(rate s + log A)."""
    rates = _rates(params)
    masses = {"theta": m.A_theta, "grad": m.A_grad, "quad": m.A_quad, "p": m.A_p}
    out = []
    for key, rate in rates.items():
        A = masses[key]
        if A > 0:
            out.append(coefficients[key] * _exp(rate * s + math.log(A)))
    return out


def fiber_energy(m: FiberMasses, s: float, params: ModelParams) -> float:
    """I_mu(s*u) from the masses of u, no resampling."""
    coefficients = {"grad": 0.5, "quad": 1.0, "p": -1.0 / params.p}
    if params.mu > 0:
        coefficients["theta"] = params.mu / params.theta
    return float(sum(_weighted_terms(m, s, params, coefficients)))


def _q_coefficients(params: ModelParams) -> dict:
    N = params.N
    coefficients = {"grad": 1.0, "quad": 2.0 + N, "p": -gamma_exponent(params.p, N)}
    if params.mu > 0:
        coefficients["theta"] = (1.0 + gamma_exponent(params.theta, N)) * params.mu
    return coefficients


def fiber_Q(m: FiberMasses, s: float, params: ModelParams) -> float:
    """d/ds I_mu(s*u), which is Q_mu(s*u)."""
    return float(sum(_weighted_terms(m, s, params, _q_coefficients(params))))


def fiber_Q_slope(m: FiberMasses, s: float, params: ModelParams) -> float:
    """d/ds fiber_Q."""
    rates = _rates(params)
    coefficients = {key: c * rates[key] for key, c in _q_coefficients(params).items()}
    return float(sum(_weighted_terms(m, s, params, coefficients)))


# ─────────────────────────────────────────
# 🔎 ROOT OF THE FIBER DERIVATIVE
# ─────────────────────────────────────────

class _FactoredQ:
    """e^{-p gamma_p s} fiber_Q(s): strictly decreasing whenever the fiber has a unique maximum."""

    def __init__(self, m: FiberMasses, params: ModelParams):
        rates = _rates(params)
        coefficients = _q_coefficients(params)
        masses = {"theta": m.A_theta, "grad": m.A_grad, "quad": m.A_quad}
        top = rates.pop("p")
        self.constant = coefficients["p"] * m.A_p
        self.terms = [
            (rate - top, math.log(coefficients[key] * masses[key]))
            for key, rate in rates.items()
            if masses[key] > 0
        ]

    def value(self, s: float) -> float:
        return self.constant + sum(_exp(rate * s + log_c) for rate, log_c in self.terms)

    def slope(self, s: float) -> float:
        return sum(rate * _exp(rate * s + log_c) for rate, log_c in self.terms)

    def scale(self, s: float) -> float:
        return abs(self.constant) + sum(_exp(rate * s + log_c) for rate, log_c in self.terms)


def _check_fiber_preconditions(m: FiberMasses, params: ModelParams):
    if m.M == 0.0 or (m.A_p == 0.0 and m.A_grad == 0.0):
        raise FiberRootError("zero field has no fiber projection")
    regime = params.regime
    if regime == "subcritical":
        raise FiberRootError(f"p={params.p} < p*: the fiber energy has no interior maximum")
    if regime == "critical" and not critical_set_membership(m, params.N):
        raise FiberRootError(
            "field lies outside the critical set (A_quad >= N/(4(N+1)) A_p); "
            "the fiber energy increases without bound"
        )


def _bracket(F: _FactoredQ) -> Tuple[float, float]:
    lo, hi = -1.0, 1.0
    while F.value(hi) > 0:
        if hi >= S_LIMIT:
            raise FiberRootError(f"fiber derivative stays positive up to s={S_LIMIT:g}")
        hi = min(2.0 * hi, S_LIMIT)
    while F.value(lo) < 0:
        if lo <= -S_LIMIT:
            raise FiberRootError(f"fiber derivative stays negative down to s={-S_LIMIT:g}")
        lo = max(2.0 * lo, -S_LIMIT)
    return lo, hi


def solve_s_mu(m: FiberMasses, params: ModelParams) -> FiberSolveResult:
    """Unique s with fiber_Q(s) = 0, by bracketing then safeguarded Newton on the factored form."""
    _check_fiber_preconditions(m, params)
    F = _FactoredQ(m, params)
    lo, hi = _bracket(F)
    bracket = (lo, hi)

    s = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
    f = F.value(s)
    iterations = 0
    converged = abs(f) <= ROOT_RTOL * F.scale(s)
    while not converged and iterations < NEWTON_MAX_ITER:
        iterations += 1
        if f > 0:
            lo = s
        else:
            hi = s
        slope = F.slope(s)
        candidate = s - f / slope if slope < 0 else None
        if candidate is None or not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        f_new = F.value(candidate)
        if abs(f_new) > 0.5 * abs(f):
            # no contraction; bisect
            mid = 0.5 * (lo + hi)
            candidate, f_new = mid, F.value(mid)
        s, f = candidate, f_new
        converged = abs(f) <= ROOT_RTOL * F.scale(s) or hi - lo <= 1e-15 * max(1.0, abs(s))

    if not converged:
        logger.warning("Newton on the fiber derivative did not contract; finishing with brentq")
        s = brentq(F.value, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    return FiberSolveResult(
        s_star=float(s),
        energy_at_star=fiber_energy(m, s, params),
        iterations=iterations,
        bracket=bracket,
    )


def fiber_max_energy(u: RadialField, params: ModelParams) -> float:
    """K_mu(u) = I_mu(s_mu(u)*u)."""
    return solve_s_mu(compute_masses(u, params), params).energy_at_star


def fiber_project(u: RadialField, params: ModelParams, max_passes: int = 5, s_tol: float = 1e-10):
    """
    Move u onto the Pohozaev manifold along its fiber.

    The projected field lives on the dilated grid of radius R_max e^{-s}. The root
    solve is repeated until the remaining shift is below s_tol; returns the
    projected field and the accumulated result.
    """
    v = u
    total_s, iterations = 0.0, 0
    result = None
    for _ in range(max_passes):
        result = solve_s_mu(compute_masses(v, params), params)
        iterations += result.iterations
        if abs(result.s_star) <= s_tol:
            break
        total_s += result.s_star
        v = scale_field(v, result.s_star)
    else:
        result = solve_s_mu(compute_masses(v, params), params)
        logger.debug(f"fiber projection stopped after {max_passes} passes, residual shift {result.s_star:.3e}")
    return v, FiberSolveResult(
        s_star=total_s + result.s_star,
        energy_at_star=result.energy_at_star,
        iterations=iterations,
        bracket=result.bracket,
    )


def fiber_sweep(m: FiberMasses, params: ModelParams, s_values) -> pd.DataFrame:
    """Sampled fiber curve: columns s, energy, Q."""
    s_values = np.asarray(s_values, dtype=float)
    return pd.DataFrame({
        "s": s_values,
        "energy": [fiber_energy(m, s, params) for s in s_values],
        "Q": [fiber_Q(m, s, params) for s in s_values],
    })
