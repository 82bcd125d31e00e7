"""
Normalized ground states by descent on the Pohozaev manifold with mu-continuation.

Every iterate is kept on the mass sphere and measured at its fiber maximum, so the
quantity being decreased is K_mu(u) = I_mu(s_mu(u)*u). Fiber moves are exact dilations
onto rescaled uniform grids; the grid radius is refitted to the profile tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.sparse.linalg import splu

from modules.fiber.fiber_tools import FiberSolveResult, fiber_project, scale_field, solve_s_mu
from modules.model.functionals import FiberMasses, compute_masses, critical_set_membership, lagrange_lambda
from modules.model.gradient import functional_gradient
from modules.model.params import ModelParams, critical_exponent
from modules.radial_tools.grid import DEFAULT_NODES, RadialField, RadialGrid, inner_product
from modules.radial_tools.resampling import rearrange_decreasing, resample
from modules.solvers.qp_shooting import a_star, qp_solution, shoot_qp
from modules.solvers.reports import SolveReport
from modules.utils.errors import ConfigError, CriticalSetError, FiberRootError, ParameterError

ARMIJO_C1 = 1e-4
ETA_MAX = 20.0
ETA_MIN = 1e-14
STALL_STEPS = 5
NOISE_GRAD_TOL = 1e-5
RECENTER_S = 0.05
REFIT_EVERY = 25
TAIL_CUTOFF = 1e-10
FIT_FRACTION = 0.75
FIT_WINDOW = (0.5, 0.97)
MIN_FIT_CELLS = 20


@dataclass(frozen=True)
class ContinuationSchedule:
    """Decreasing perturbation weights and the per-stage descent budget."""
    mu_values: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    max_iter_stage: int = 1000
    eta: float = 0.5
    energy_tol: float = 1e-13
    grad_tol: float = 1e-6
    n_seeds: int = 5
    rearrange_every: int = 0
    polish_at_zero: bool = True

    def __post_init__(self):
        mus = tuple(float(m) for m in self.mu_values)
        object.__setattr__(self, "mu_values", mus)
        if not mus:
            raise ConfigError("schedule needs at least one mu value", field="schedule.mu_values")
        if any(b >= a for a, b in zip(mus, mus[1:])):
            raise ConfigError("mu values must be strictly decreasing", field="schedule.mu_values")
        if mus[0] > 1.0 or mus[-1] <= 0.0 or mus[-1] > 1e-6:
            raise ConfigError("mu values must start at most 1 and end in (0, 1e-6]", field="schedule.mu_values")
        if self.max_iter_stage < 1 or self.eta <= 0 or self.n_seeds < 1 or self.rearrange_every < 0:
            raise ConfigError("budget, step size and seed count must be positive", field="schedule")

    @classmethod
    def geometric(cls, first: float = 1e-1, last: float = 1e-6, factor: float = 10.0, **kwargs):
        """first, first/factor, ... down to last."""
        count = int(round(math.log(first / last) / math.log(factor))) + 1
        return cls(mu_values=tuple(np.geomspace(first, last, count)), **kwargs)

    def stages_for(self, N: int) -> List[float]:
        """The mu values actually run; N = 1 has no perturbation, so only mu = 0."""
        if N == 1:
            return [0.0]
        return list(self.mu_values) + ([0.0] if self.polish_at_zero else [])


@dataclass
class StageResult:
    profile: RadialField
    energy: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)
    stationarity: float = float("nan")


# ─────────────────────────────────────────
# 🌱 SEEDS
# ─────────────────────────────────────────

def normalize_mass(u: RadialField, a: float) -> RadialField:
    """Rescale the amplitude so that int u^2 = a."""
    mass = inner_product(u, u)
    if not mass > 0:
        raise ParameterError("cannot normalize a field of zero mass", field="mass")
    return u.scaled(math.sqrt(a / mass))


def critical_witness(params: ModelParams, grid: RadialGrid) -> RadialField:
    """w_a = (a/a*)^{1/2} Q_{p*}^{1/2}, inside the critical set whenever a > a*."""
    qp = shoot_qp(params.p_star, params.N, grid)
    return qp.sqrt_field().scaled(math.sqrt(params.a / qp.l1_norm))


def witness_grid(N: int, n_nodes: int = DEFAULT_NODES) -> RadialGrid:
    """Uniform grid on which the support of Q_{p*} sits at FIT_FRACTION of R_max."""
    support = qp_solution(critical_exponent(N), N).support_radius
    return RadialGrid.uniform(N, R_max=support / FIT_FRACTION, n_nodes=n_nodes)


SEED_SHAPES = {
    "gaussian": lambda r: np.exp(-r ** 2),
    "sech": lambda r: 1.0 / np.cosh(r),
    "super-gaussian": lambda r: np.exp(-r ** 4),
    "exponential": lambda r: np.exp(-np.sqrt(1.0 + r ** 2)),
    "shoulder": lambda r: (1.0 + r ** 2) * np.exp(-r ** 2),
}


def seed_family(params: ModelParams, grid: RadialGrid, count: int) -> List[Tuple[str, RadialField]]:
    """Default seed first, then other mass-normalized shapes."""
    seeds = []
    if params.is_critical:
        seeds.append(("critical-witness", critical_witness(params, witness_grid(params.N, grid.size))))
    for label, shape in SEED_SHAPES.items():
        seeds.append((label, normalize_mass(RadialField.from_function(grid, shape), params.a)))
    return seeds[:count]


# ─────────────────────────────────────────
# 📐 GRID FITTING
# ─────────────────────────────────────────

def fit_grid(u: RadialField, a: Optional[float] = None) -> RadialField:
    """
    Resample u onto the uniform grid that puts its tail at FIT_FRACTION of R_max.

    The tail is the last node where |u| >= TAIL_CUTOFF max|u|; the node count is
    kept. Fields whose tail already sits inside FIT_WINDOW come back unchanged, and
    a tail reaching the boundary only widens the grid when it decays there.
    """
    grid = u.grid
    mags = np.abs(u.values)
    peak = float(mags.max())
    if peak == 0.0:
        return u
    r_tail = float(grid.r[np.flatnonzero(mags >= TAIL_CUTOFF * peak)[-1]])
    ratio = r_tail / grid.R_max
    lo, hi = FIT_WINDOW
    if lo <= ratio <= hi:
        return u
    if ratio > hi and np.any(np.diff(mags[-max(3, grid.size // 20):]) > 0):
        return u
    target = RadialGrid.uniform(grid.dimension, R_max=max(r_tail, MIN_FIT_CELLS * grid.h) / FIT_FRACTION,
                                n_nodes=grid.size)
    logger.debug(f"grid refit: R_max {grid.R_max:.6g} -> {target.R_max:.6g} (tail at {ratio:.2f} R_max)")
    v = resample(u, target)
    v = v.with_values(_fix_origin(v.values, target))
    return normalize_mass(v, a) if a is not None else v


# ─────────────────────────────────────────
# 📉 ONE DESCENT STAGE
# ─────────────────────────────────────────

def _fix_origin(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """The origin has no weight for N >= 2; give it the even extrapolation of its neighbours."""
    if grid.dimension >= 2:
        values = values.copy()
        values[0] = (4.0 * values[1] - values[2]) / 3.0
    return values


def _sobolev_operator(u: RadialField, shift: float = 1.0) -> sparse.csc_matrix:
    """shift * L2 plus the weighted H1 form with the quasilinear coefficient 1 + 2u^2."""
    grid = u.grid
    w = grid.weights
    D = grid.derivative_matrix
    stiffness = D.T @ sparse.diags(w * (1.0 + 2.0 * u.values ** 2)) @ D
    diag = shift * w
    diag[w == 0] = 1.0
    return (sparse.diags(diag) + stiffness).tocsc()


def preconditioner_shift(m: FiberMasses, params: ModelParams) -> float:
    """Multiplier estimate, floored by A_grad/M so the preconditioner stays positive."""
    return max(lagrange_lambda(m, params), m.A_grad / m.M)


def descent_direction(u: RadialField, g: RadialField, shift: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Preconditioned tangent direction.

    g is first projected onto the L2 tangent space of the sphere, then mapped
    through the H1-type preconditioner and projected again, so the step keeps
    int u^2 fixed to first order. Returns (direction, tangent gradient).
    """
    uu = inner_product(u, u)
    g_t = g.values - inner_product(g, u) / uu * u.values
    w = u.grid.weights
    solver = splu(_sobolev_operator(u, shift))
    d = solver.solve(w * g_t)
    c = solver.solve(w * u.values)
    d = d - u.grid.integrate(d * u.values) / u.grid.integrate(c * u.values) * c
    return d, g_t


def fiber_state(v: RadialField, params: ModelParams) -> Tuple[RadialField, FiberMasses, FiberSolveResult]:
    """Mass-normalize v and solve its fiber; raises when v has no fiber maximum."""
    v = normalize_mass(v, params.a)
    m = compute_masses(v, params)
    if params.is_critical and not critical_set_membership(m, params.N):
        raise CriticalSetError("iterate left the critical set")
    return v, m, solve_s_mu(m, params)


def project_onto_manifold(v: RadialField, params: ModelParams) -> Tuple[RadialField, float]:
    """Mass-renormalize and fiber-project onto the dilated grid; returns the field and K_mu."""
    v, _, _ = fiber_state(v, params)
    v, result = fiber_project(v, params)
    v = v.with_values(_fix_origin(v.values, v.grid))
    return v, result.energy_at_star


def _line_search(u: RadialField, d: np.ndarray, energy: float, slope: float, eta: float, params: ModelParams):
    """Backtracking Armijo on K_mu; returns (field, masses, fiber, eta) or None."""
    while eta >= ETA_MIN:
        candidate = u.with_values(_fix_origin(u.values - eta * d, u.grid))
        try:
            trial, m, fiber = fiber_state(candidate, params)
        except (FiberRootError, CriticalSetError, ParameterError) as exc:
            logger.debug(f"step eta={eta:.2e} rejected: {exc}")
            eta *= 0.5
            continue
        if fiber.energy_at_star <= energy - ARMIJO_C1 * eta * slope:
            return trial, m, fiber, eta
        eta *= 0.5
    return None


def descend_stage(u: RadialField, params: ModelParams, schedule: ContinuationSchedule,
                  max_iter: Optional[int] = None) -> StageResult:
    """
    Preconditioned Polak-Ribiere+ descent on K_mu over the mass sphere.

    Iterates stay on one grid between recentrings: the gradient is the one of
    u -> I_mu(s_mu(u)*u), and the field is dilated exactly onto its fiber maximum
    once |s_mu| exceeds RECENTER_S. A failed line search along a conjugate
    direction restarts from the preconditioned gradient; a second failure ends
    the stage, converged only if the tangent gradient is already at noise level.
    """
    max_iter = max_iter or schedule.max_iter_stage
    u, m, fiber = fiber_state(u, params)
    energy = fiber.energy_at_star
    history = [energy]
    eta = schedule.eta
    stalled = 0
    converged = False
    stationarity = math.inf
    memory = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        refit = iterations == 1 or iterations % REFIT_EVERY == 0
        if abs(fiber.s_star) > RECENTER_S or refit:
            u = scale_field(u, fiber.s_star)
            if refit:
                u = fit_grid(u, params.a)
            u, m, fiber = fiber_state(u.with_values(_fix_origin(u.values, u.grid)), params)
            energy = fiber.energy_at_star
            memory = None

        g = functional_gradient(u, params, s=fiber.s_star)
        z, g_t = descent_direction(u, g, preconditioner_shift(m, params))
        full_norm = math.sqrt(u.grid.integrate(g.values * g.values))
        stationarity = math.sqrt(u.grid.integrate(g_t * g_t)) / full_norm if full_norm > 0 else 0.0
        if stationarity <= schedule.grad_tol:
            converged = True
            break

        gz = u.grid.integrate(g_t * z)
        d = z
        if memory is not None and memory[2] > 0:
            previous_d, previous_z, previous_gz = memory
            beta = max(0.0, u.grid.integrate(g_t * (z - previous_z)) / previous_gz)
            d = z + beta * previous_d
            d = d - u.grid.integrate(d * u.values) / inner_product(u, u) * u.values
            if u.grid.integrate(g.values * d) <= 0:
                d = z
        slope = u.grid.integrate(g.values * d)
        if slope <= 0:
            logger.warning(f"mu={params.mu:g}: preconditioned direction is not a descent direction")
            break

        accepted = _line_search(u, d, energy, slope, eta, params)
        if accepted is None:
            eta = schedule.eta
            if d is not z:
                logger.debug(f"mu={params.mu:g} it={iterations}: conjugate step failed, restarting")
                memory = None
                continue
            converged = stationarity <= NOISE_GRAD_TOL
            logger.info(f"mu={params.mu:g}: line search exhausted after {iterations} iterations "
                        f"(|g_t|/|g|={stationarity:.2e})")
            break

        previous = energy
        u, m, fiber, eta = accepted
        energy = fiber.energy_at_star
        memory = (d, z, gz)
        if schedule.rearrange_every and iterations % schedule.rearrange_every == 0:
            u, m, fiber, changed = _try_rearrangement(u, m, fiber, params)
            energy = fiber.energy_at_star
            memory = None if changed else memory
        history.append(energy)
        eta = min(2.0 * eta, ETA_MAX)
        logger.debug(f"mu={params.mu:g} it={iterations} K={energy:.15g} |g_t|/|g|={stationarity:.2e}")

        if previous - energy <= schedule.energy_tol * abs(energy):
            stalled += 1
            if stalled >= STALL_STEPS:
                converged = stationarity <= NOISE_GRAD_TOL
                break
        else:
            stalled = 0

    u, result = fiber_project(u, params)
    u = u.with_values(_fix_origin(u.values, u.grid))
    return StageResult(profile=u, energy=result.energy_at_star, iterations=iterations, converged=converged,
                       history=history, stationarity=stationarity)


def _try_rearrangement(u: RadialField, m: FiberMasses, fiber: FiberSolveResult, params: ModelParams):
    try:
        candidate, candidate_m, candidate_fiber = fiber_state(rearrange_decreasing(u), params)
    except (FiberRootError, CriticalSetError, ParameterError):
        return u, m, fiber, False
    if candidate_fiber.energy_at_star <= fiber.energy_at_star:
        return candidate, candidate_m, candidate_fiber, True
    return u, m, fiber, False


# ─────────────────────────────────────────
# 🧭 CONTINUATION DRIVER
# ─────────────────────────────────────────

def _prepare_seed(seed: RadialField, params: ModelParams, grid: RadialGrid) -> RadialField:
    if seed.grid.dimension != params.N:
        raise ValueError(f"seed profile is {seed.grid.dimension}-dimensional, expected N={params.N}")
    return normalize_mass(resample(seed, grid), params.a)


def normalized_ground_state(params: ModelParams, schedule: Optional[ContinuationSchedule] = None,
                            seed: Optional[RadialField] = None, grid: Optional[RadialGrid] = None) -> SolveReport:
    """Minimize I_mu on the Pohozaev manifold along the schedule and report at mu = 0."""
    schedule = schedule or ContinuationSchedule()
    grid = grid or (seed.grid if seed is not None else RadialGrid.uniform(params.N))
    params.check_hypotheses(a_star(params.N) if params.is_critical else None)
    stages = schedule.stages_for(params.N)

    if seed is not None:
        candidates = [("user", _prepare_seed(seed, params, grid))]
    else:
        candidates = seed_family(params, grid, schedule.n_seeds)

    first = params.with_mu(stages[0])
    best, best_label = None, ""
    iterations_total = 0
    for label, field_ in candidates:
        try:
            start, _ = project_onto_manifold(field_, first)
        except (FiberRootError, CriticalSetError, ParameterError) as exc:
            if label in ("user", "critical-witness"):
                raise CriticalSetError(f"seed '{label}' is not admissible: {exc}") from exc
            logger.info(f"seed '{label}' skipped: {exc}")
            continue
        result = descend_stage(start, first, schedule)
        iterations_total += result.iterations
        logger.info(f"seed '{label}': K={result.energy:.12g} after {result.iterations} iterations at mu={first.mu:g}")
        if best is None or result.energy < best.energy:
            best, best_label = result, label
    if best is None:
        raise CriticalSetError("no seed could be projected onto the Pohozaev manifold")

    stage_energies = [best.energy]
    stage_converged = [best.converged]
    stage_stationarity = [best.stationarity]
    u = best.profile
    for mu in stages[1:]:
        stage_params = params.with_mu(mu)
        u, _ = project_onto_manifold(u, stage_params)
        result = descend_stage(u, stage_params, schedule)
        iterations_total += result.iterations
        u = result.profile
        stage_energies.append(result.energy)
        stage_converged.append(result.converged)
        stage_stationarity.append(result.stationarity)
        logger.info(f"stage mu={mu:g}: K={result.energy:.12g} ({result.iterations} iterations)")

    base = params.with_mu(0.0)
    u, _ = project_onto_manifold(u, base)
    report = SolveReport.evaluate(
        u,
        base,
        mu_schedule_used=stages,
        iterations_total=iterations_total,
        seed_label=best_label,
        stage_energies=stage_energies,
        extras={"stage_stationarity": stage_stationarity, "grid_R_max": u.grid.R_max},
    )
    report.converged = report.converged and stage_converged[-1]
    if not all(stage_converged):
        logger.warning(f"continuation stages without a stationary end point: "
                       f"{[mu for mu, ok in zip(stages, stage_converged) if not ok]}")
    logger.info(
        f"ground state N={params.N} p={params.p:g} a={params.a:g}: E={report.energy:.10g} "
        f"lambda={report.lam:.8g} Q-res={report.pohozaev_residual:.2e} EL-res={report.el_residual:.2e}"
    )
    return report


def critical_upper_level(params: ModelParams, grid: Optional[RadialGrid] = None) -> float:
    """K_0(w_a), a finite upper bound of the critical level above the threshold."""
    base = params.with_mu(0.0)
    grid = grid or witness_grid(params.N)
    witness = critical_witness(base, grid)
    return solve_s_mu(compute_masses(witness, base), base).energy_at_star
