"""
Free-boundary shooting for Q_p, the compactly supported solution of -Lap w + 1 = w^{p/2-1}.

Q_p optimizes the sharp Gagliardo-Nirenberg inequality; its L1 norm at p = 4+4/N is
the threshold mass a*.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from modules.model.functionals import gn_exponents
from modules.model.params import critical_exponent, quasilinear_ceiling
from modules.radial_tools.grid import RadialField, RadialGrid, unit_sphere_area
from modules.utils.errors import ParameterError, ShootingError

R_START = 1e-6
R_END = 200.0
BETA_MAX = 1e3
ODE_RTOL = 1e-11
ODE_ATOL = 1e-13


@dataclass(frozen=True)
class QpSolution:
    """Grid-free outcome of the shooting: height, support and integrals from the ODE itself."""
    p: float
    N: int
    beta: float
    support_radius: float
    l1_norm: float
    grad_sq: float
    p_half: float
    dense: Callable
    bisections: int

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        """Q_p at the given radii; zero at and beyond the free boundary."""
        r = np.abs(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        inside = r < self.support_radius
        rr = np.maximum(r[inside], R_START)
        out[inside] = np.maximum(self.dense(rr)[0], 0.0)
        # series branch below R_START
        small = inside & (r < R_START)
        out[small] = self.beta + 0.5 * (1.0 - self.beta ** (0.5 * self.p - 1.0)) / self.N * r[small] ** 2
        return out

    def derivative(self, r: np.ndarray) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        inside = r < self.support_radius
        out[inside] = self.dense(np.maximum(r[inside], R_START))[1]
        return out


@dataclass(frozen=True)
class QpProfile:
    """Q_p sampled on a grid, with the support radius and L1 norm."""
    profile: RadialField
    support_radius: float
    beta: float
    l1_norm: float
    p: float
    N: int

    def sqrt_field(self) -> RadialField:
        """Q_p^{1/2}, the equality case of the GN-type inequality for int |u|^p."""
        return self.profile.with_values(np.sqrt(np.maximum(self.profile.values, 0.0)))


def _rhs(p: float, N: int):
    q = 0.5 * p - 1.0
    omega = unit_sphere_area(N)

    def rhs(r, y):
        w, dw = y[0], y[1]
        wq = max(w, 0.0) ** q
        d2w = 1.0 - wq - (N - 1.0) * dw / r
        weight = omega * r ** (N - 1)
        return [dw, d2w, weight * max(w, 0.0), weight * dw * dw, weight * wq * max(w, 0.0)]

    return rhs


def _initial_state(beta: float, p: float, N: int) -> list:
    curvature = (1.0 - beta ** (0.5 * p - 1.0)) / N
    return [beta + 0.5 * curvature * R_START ** 2, curvature * R_START, 0.0, 0.0, 0.0]


def _hits_zero(r, y):
    return y[0]


_hits_zero.terminal = True
_hits_zero.direction = -1


def _turns_back(r, y):
    return y[1]


_turns_back.terminal = True
_turns_back.direction = 1


def _integrate(beta: float, p: float, N: int, dense: bool = False):
    return solve_ivp(
        _rhs(p, N),
        (R_START, R_END),
        _initial_state(beta, p, N),
        method="RK45",
        events=(_hits_zero, _turns_back),
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=dense,
    )


def _overshoots(beta: float, p: float, N: int) -> bool:
    """
    True when w reaches zero before w' returns to zero.

    A shot whose w dips below zero and turns back inside one step only reports
    the turning event, so a turn with w <= 0 also counts as an overshoot.
    """
    sol = _integrate(beta, p, N)
    hits, turns = sol.t_events
    if hits.size and (not turns.size or hits[0] <= turns[0]):
        return True
    if turns.size:
        return bool(sol.y_events[1][0][0] <= 0.0)
    raise ShootingError(f"beta={beta:.6g}: neither event before r={R_END:g} (integrator status {sol.status})")


def shoot_free_boundary(p: float, N: int, beta_bracket: Optional[Tuple[float, float]] = None) -> QpSolution:
    """
    Bisect on beta = w(0) between undershoot and overshoot.

    The returned profile is the last undershoot run, stopped where w' = 0; there
    w is of the order of the bracket width, so both boundary values vanish.
    """
    if not 2.0 < p < quasilinear_ceiling(N):
        hypothesis = "H2" if N == 3 else "exponent-window"
        raise ParameterError(f"p={p} outside 2 < p < 2*2^*={quasilinear_ceiling(N):g}", field="p", hypothesis=hypothesis)
    lo, hi = beta_bracket if beta_bracket is not None else (1.0, 2.0)
    lo = max(lo, 1.0)
    if lo > 1.0 and _overshoots(lo, p, N):
        raise ShootingError(f"lower shooting height {lo:.6g} already overshoots")
    while not _overshoots(hi, p, N):
        lo, hi = hi, 2.0 * hi
        if hi > BETA_MAX:
            raise ShootingError(f"no overshoot for beta up to {BETA_MAX:g} at p={p}, N={N}")

    bisections = 0
    while hi - lo > 4.0 * np.finfo(float).eps * hi and bisections < 200:
        mid = 0.5 * (lo + hi)
        if _overshoots(mid, p, N):
            hi = mid
        else:
            lo = mid
        bisections += 1

    sol = _integrate(lo, p, N, dense=True)
    if not sol.t_events[1].size:
        raise ShootingError(f"final undershoot run at beta={lo:.17g} did not turn back")
    R = float(sol.t_events[1][0])
    state = sol.y_events[1][0]
    logger.debug(f"Q_p shooting p={p} N={N}: beta={lo:.12g}, R={R:.8g}, w(R)={state[0]:.2e}, {bisections} bisections")
    return QpSolution(
        p=float(p),
        N=int(N),
        beta=float(lo),
        support_radius=R,
        l1_norm=float(state[2]),
        grad_sq=float(state[3]),
        p_half=float(state[4]),
        dense=sol.sol,
        bisections=bisections,
    )


# ─────────────────────────────────────────
# 🗂️ MEMOIZED SOLUTIONS
# ─────────────────────────────────────────

_SOLUTIONS = {}
_SOLUTIONS_LOCK = threading.Lock()


def qp_solution(p: float, N: int) -> QpSolution:
    """Memoized shoot_free_boundary; concurrent callers share one computation."""
    key = (float(p), int(N))
    with _SOLUTIONS_LOCK:
        if key not in _SOLUTIONS:
            _SOLUTIONS[key] = shoot_free_boundary(p, N)
        return _SOLUTIONS[key]


def shoot_qp(p: float, N: int, grid: Optional[RadialGrid] = None) -> QpProfile:
    """Q_p sampled on the given grid (default radial grid when omitted)."""
    solution = qp_solution(p, N)
    grid = grid if grid is not None else RadialGrid.uniform(N)
    if grid.dimension != N:
        raise ValueError(f"grid dimension {grid.dimension} does not match N={N}")
    if grid.R_max < solution.support_radius:
        logger.warning(f"grid radius {grid.R_max:g} truncates the support of Q_p (R={solution.support_radius:.4g})")
    profile = RadialField(grid, solution.evaluate(grid.r))
    return QpProfile(
        profile=profile,
        support_radius=solution.support_radius,
        beta=solution.beta,
        l1_norm=solution.l1_norm,
        p=solution.p,
        N=solution.N,
    )


def a_star(N: int) -> float:
    """Threshold mass ||Q_{4+4/N}||_1."""
    if N < 1:
        raise ParameterError("dimension must be positive", field="N")
    return qp_solution(critical_exponent(N), N).l1_norm


def sharp_gn_constant(p: float, N: int) -> float:
    """Best constant K in int|w|^{p/2} <= K (int|w|)^alpha (int|grad w|^2)^kappa, read off Q_p."""
    solution = qp_solution(p, N)
    alpha, kappa = gn_exponents(p, N)
    return solution.p_half / (solution.l1_norm ** alpha * solution.grad_sq ** kappa)


def critical_gn_constant(N: int) -> float:
    """(N+1)/(N a*^{2/N}), the mass-critical instance of sharp_gn_constant."""
    return (N + 1.0) / (N * a_star(N) ** (2.0 / N))


def first_integral(solution: QpSolution, r: np.ndarray) -> np.ndarray:
    """(w')^2/2 - w + (2/p) w^{p/2}; constant (and zero on Q_p) when N = 1."""
    w = solution.evaluate(r)
    dw = solution.derivative(r)
    return 0.5 * dw * dw - w + 2.0 / solution.p * w ** (0.5 * solution.p)


def free_boundary_defect(solution: QpSolution) -> Tuple[float, float]:
    """|w(R)| and |w'(R)| relative to beta."""
    w, dw = solution.dense(solution.support_radius)[:2]
    return abs(w) / solution.beta, abs(dw) / solution.beta
