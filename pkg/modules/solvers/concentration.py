"""Blow-up of critical ground states as the mass decreases to a*."""
import math
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from loguru import logger

from modules.model.functionals import compute_masses
from modules.model.params import ModelParams, critical_exponent
from modules.radial_tools.grid import RadialField, RadialGrid
from modules.radial_tools.resampling import resample
from modules.solvers.ground_state import (
    ContinuationSchedule,
    critical_upper_level,
    normalized_ground_state,
    witness_grid,
)
from modules.solvers.qp_shooting import QpSolution, a_star, qp_solution

CONCENTRATION_COLUMNS = ["delta", "a_n", "eps_n", "w_l1", "dist_l1", "dist_l2"]


def default_rescale_constant(N: int) -> float:
    """c = (N a*/4)^{1/(2+N)}."""
    return (N * a_star(N) / 4.0) ** (1.0 / (2.0 + N))


def blow_up_profile(u: RadialField, eps: float, c: float) -> RadialField:
    """
    w(r) = (c eps)^N u^2(c eps r).

    The values live on u's grid stretched by 1/(c eps), so int w equals the
    discrete mass of u exactly.
    """
    scale = c * eps
    grid = u.grid
    target = RadialGrid.uniform(grid.dimension, R_max=grid.R_max / scale, n_nodes=grid.size)
    return RadialField(target, scale ** grid.dimension * u.values ** 2)


def distance_to_target(w: RadialField, solution: QpSolution) -> tuple:
    """L1 and L2 distances between w and Q_p, with Q_p evaluated from its shooting solution."""
    grid = w.grid
    if grid.R_max < solution.support_radius:
        grid = RadialGrid.uniform(grid.dimension, R_max=solution.support_radius, n_nodes=grid.size)
        w = resample(w, grid)
    diff = w.values - solution.evaluate(grid.r)
    return grid.integrate(np.abs(diff)), math.sqrt(grid.integrate(diff * diff))


def concentration_study(N: int, mass_offsets: Iterable[float], grid: Optional[RadialGrid] = None,
                        schedule: Optional[ContinuationSchedule] = None,
                        rescale_constant: Optional[float] = None) -> pd.DataFrame:
    """
    Solve the critical problem at a_n = a*(1+delta) and compare the rescaled
    densities w_n with Q_{p*}; rows sorted by delta descending.
    """
    p_star = critical_exponent(N)
    threshold = a_star(N)
    grid = grid or RadialGrid.uniform(N)
    c = rescale_constant if rescale_constant is not None else default_rescale_constant(N)
    target = qp_solution(p_star, N)
    rows = []
    for delta in sorted((float(d) for d in mass_offsets), reverse=True):
        a_n = threshold * (1.0 + delta)
        params = ModelParams(N=N, p=p_star, a=a_n)
        report = normalized_ground_state(params, schedule, grid=grid)
        A_quad = compute_masses(report.profile, params.with_mu(0.0)).A_quad
        eps = A_quad ** (-1.0 / (2.0 + N))
        w = blow_up_profile(report.profile, eps, c)
        dist_l1, dist_l2 = distance_to_target(w, target)
        rows.append({
            "delta": delta,
            "a_n": a_n,
            "eps_n": eps,
            "w_l1": w.grid.integrate(np.abs(w.values)),
            "dist_l1": dist_l1,
            "dist_l2": dist_l2,
            "lambda": report.lam,
            "lambda_scaled": eps ** (2.0 + N) * report.lam,
            "energy": report.energy,
            "upper_level": critical_upper_level(params, witness_grid(N, grid.size)),
            "el_residual": report.el_residual,
            "converged": report.converged,
        })
        logger.info(f"delta={delta:g}: eps={eps:.6g}, L2 distance to Q={dist_l2:.3e}, "
                    f"EL-res={report.el_residual:.2e}")
    return pd.DataFrame(rows)


def write_concentration_csv(table: pd.DataFrame, path) -> str:
    table[CONCENTRATION_COLUMNS].to_csv(path, index=False, float_format="%.17g")
    return str(path)
