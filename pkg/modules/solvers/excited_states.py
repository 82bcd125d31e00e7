"""
Radial solutions with a prescribed number of nodes by two-parameter shooting.

Inner loop: bisection on u(0) at fixed lambda until the trajectory decays with
exactly k sign changes. Outer loop: secant on log(lambda) to match the mass, which
the ODE carries as a third component, so the matching never touches a grid.
Node-indexed solutions stand in for the genus-based multiplicity sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from modules.model.params import ModelParams
from modules.radial_tools.grid import DEFAULT_NODES, RadialField, RadialGrid, unit_sphere_area
from modules.solvers.reports import SolveReport
from modules.utils.errors import ParameterError, ShootingError

R_START = 1e-6
MAX_NODES = 6
ODE_RTOL = 1e-11
ODE_ATOL = 1e-14
HEIGHT_RTOL = 1e-14
HEIGHT_MAX = 1e8
MASS_RTOL = 1e-10
LAMBDA_MIN = 1e-4
LAMBDA_MAX = 1e9
SCAN_STEP = 1.0
TAIL_LENGTH = 40.0
CORE_LENGTH = 4.0
EXCITED_POHOZAEV_GATE = 1e-4


@dataclass(frozen=True)
class ShotOutcome:
    overshoot: bool
    zeros: int
    radius: float
    mass: float


def count_nodes(values: np.ndarray, deadband: float = 1e-10) -> int:
    """Strict sign changes, ignoring values below deadband * max|u|."""
    values = np.asarray(values, dtype=float)
    scale = np.max(np.abs(values)) if values.size else 0.0
    if scale == 0.0:
        return 0
    signs = np.sign(values[np.abs(values) > deadband * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _rhs(lam: float, p: float, N: int):
    omega = unit_sphere_area(N)

    def rhs(r, y):
        u, du = y[0], y[1]
        d2u = (lam * u - abs(u) ** (p - 2.0) * u - 2.0 * u * du * du) / (1.0 + 2.0 * u * u)
        return [du, d2u - (N - 1.0) * du / r, omega * r ** (N - 1) * u * u]

    return rhs


def _initial_state(height: float, lam: float, p: float, N: int) -> list:
    curvature = (lam * height - height ** (p - 1.0)) / (N * (1.0 + 2.0 * height ** 2))
    return [height + 0.5 * curvature * R_START ** 2, curvature * R_START, 0.0]


def _crosses(r, y):
    return y[0]


def _turns(r, y):
    return y[1]


def shooting_horizon(height: float, lam: float, k: int) -> float:
    """Radius that holds k+1 lobes: core ~ u(0)/sqrt(lambda) plus a decayed tail each."""
    return (TAIL_LENGTH + CORE_LENGTH * height) * (k + 1) / math.sqrt(lam)


def _shoot(height: float, lam: float, p: float, N: int, k: int, dense: bool = False):
    return solve_ivp(
        _rhs(lam, p, N),
        (R_START, R_START + shooting_horizon(height, lam, k)),
        _initial_state(height, lam, p, N),
        method="DOP853",
        events=(_crosses, _turns),
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=dense,
    )


def _classify(sol, k: int, lam: float, p: float, N: int) -> ShotOutcome:
    """Walk the events in order: a (k+1)-th zero is an overshoot, a minimum of |u| an undershoot."""
    rhs = _rhs(lam, p, N)
    events = [(r, 0, y) for r, y in zip(sol.t_events[0], sol.y_events[0])]
    events += [(r, 1, y) for r, y in zip(sol.t_events[1], sol.y_events[1])]
    zeros = 0
    for r, kind, y in sorted(events, key=lambda e: e[0]):
        if kind == 0:
            zeros += 1
            if zeros > k:
                return ShotOutcome(True, zeros, r, y[2])
        elif y[0] * rhs(r, y)[1] > 0:
            return ShotOutcome(False, zeros, r, y[2])
    return ShotOutcome(False, zeros, sol.t[-1], sol.y[2, -1])


def match_height(lam: float, params: ModelParams, k: int) -> Tuple[object, ShotOutcome, int]:
    """Bisection on u(0) at fixed lambda; returns the last undershoot run, its outcome and the shot count."""
    p, N = params.p, params.N
    lo = lam ** (1.0 / (p - 2.0)) * (1.0 + 1e-9)
    hi = 2.0 * lo
    shots = 1
    while not _classify(_shoot(hi, lam, p, N, k), k, lam, p, N).overshoot:
        shots += 1
        lo, hi = hi, 2.0 * hi
        if hi > HEIGHT_MAX:
            raise ShootingError(f"no {k + 1}-node overshoot for u(0) up to {HEIGHT_MAX:g} at lambda={lam:.6g}")
    while hi - lo > HEIGHT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        shots += 1
        if _classify(_shoot(mid, lam, p, N, k), k, lam, p, N).overshoot:
            hi = mid
        else:
            lo = mid

    sol = _shoot(lo, lam, p, N, k, dense=True)
    outcome = _classify(sol, k, lam, p, N)
    if outcome.zeros != k:
        raise ShootingError(f"node bracket at lambda={lam:.6g} gives {outcome.zeros} zeros, wanted {k}")
    return sol, outcome, shots + 1


def node_profile(lam: float, params: ModelParams, k: int,
                 n_nodes: int = DEFAULT_NODES) -> Tuple[RadialField, ShotOutcome, int]:
    """The k-node profile at lambda, sampled on the uniform grid ending where the shot was cut."""
    sol, outcome, shots = match_height(lam, params, k)
    grid = RadialGrid.uniform(params.N, R_max=outcome.radius, n_nodes=n_nodes)
    values = sol.sol(np.maximum(grid.r, R_START))[0]
    return RadialField(grid, values), outcome, shots


def _log_mass_defect(log_lam: float, params: ModelParams, k: int, counter: list) -> float:
    _, outcome, shots = match_height(math.exp(log_lam), params, k)
    counter[0] += shots
    return math.log(outcome.mass / params.a)


def _secant(params, k, counter, lambda_max) -> Optional[float]:
    x0, x1 = 0.0, math.log(2.0)
    f0 = _log_mass_defect(x0, params, k, counter)
    f1 = _log_mass_defect(x1, params, k, counter)
    for _ in range(60):
        if abs(f1) <= MASS_RTOL:
            return x1
        if f1 == f0:
            return None
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x2 = min(max(x2, math.log(LAMBDA_MIN)), math.log(lambda_max))
        if x2 == x1:
            return None
        x0, f0 = x1, f1
        x1, f1 = x2, _log_mass_defect(x2, params, k, counter)
    return None


def _scan_and_bisect(params, k, counter, lambda_max) -> float:
    """Fallback: walk log(lambda) upward from LAMBDA_MIN until the mass defect changes sign, then brentq."""
    x, top = math.log(LAMBDA_MIN), math.log(lambda_max)
    previous = None
    while x <= top:
        try:
            f = _log_mass_defect(x, params, k, counter)
        except ShootingError as exc:
            logger.debug(f"lambda={math.exp(x):.4g} skipped: {exc}")
            previous = None
            x += SCAN_STEP
            continue
        if previous is not None and previous[1] * f <= 0:
            return brentq(lambda t: _log_mass_defect(t, params, k, counter), previous[0], x, xtol=1e-13)
        previous = (x, f)
        x += SCAN_STEP
    raise ShootingError(f"mass a={params.a} not matched for lambda in [{LAMBDA_MIN:g}, {lambda_max:g}]")


def excited_state(params: ModelParams, k: int, n_nodes: int = DEFAULT_NODES,
                  lambda_max: float = LAMBDA_MAX, deadband: float = 1e-10) -> SolveReport:
    """
    Radial normalized solution with exactly k nodes (unperturbed functional).

    The report profile lives on the uniform grid of n_nodes nodes ending where the
    shot was cut, so its radius follows lambda.
    """
    if not 0 <= int(k) <= MAX_NODES:
        raise ParameterError(f"node index must lie in 0..{MAX_NODES}, got {k}", field="k")
    if params.N == 1:
        raise ParameterError("excited states need N >= 2", field="N", hypothesis="H1'")
    if params.regime != "supercritical":
        raise ParameterError(
            "node shooting needs a mass-supercritical exponent", field="p", hypothesis="H1" if params.N <= 2 else "H2"
        )
    params.check_hypotheses()
    base = params.with_mu(0.0)
    counter = [0]

    try:
        x = _secant(base, k, counter, lambda_max)
    except ShootingError as exc:
        logger.warning(f"secant on lambda failed ({exc}); scanning log(lambda)")
        x = None
    if x is None:
        x = _scan_and_bisect(base, k, counter, lambda_max)

    lam = math.exp(x)
    u, outcome, shots = node_profile(lam, base, k, n_nodes)
    counter[0] += shots
    nodes = count_nodes(u.values, deadband)
    report = SolveReport.evaluate(
        u,
        base,
        mu_schedule_used=[0.0],
        iterations_total=counter[0],
        node_count=nodes,
        seed_label=f"k={k}",
        method="node-shooting surrogate",
        pohozaev_gate=EXCITED_POHOZAEV_GATE,
    )
    report.extras.update({"shooting_lambda": lam, "ode_mass": outcome.mass, "shooting_height": float(u.values[0])})
    logger.info(
        f"excited state k={k}: lambda={lam:.10g} (multiplier formula {report.lam:.10g}), "
        f"E={report.energy:.10g}, nodes={nodes}, R={outcome.radius:.6g}, {counter[0]} shots"
    )
    if nodes != k:
        logger.warning(f"grid node count {nodes} differs from the shooting index {k}")
        report.converged = False
    return report
