"""Fiber scans of the mass-critical problem along the witnesses w_a."""
import math
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from loguru import logger

from modules.fiber.fiber_tools import fiber_energy
from modules.model.functionals import compute_masses, nonexistence_certificate
from modules.model.params import ModelParams, critical_exponent
from modules.radial_tools.grid import RadialGrid
from modules.solvers.qp_shooting import qp_solution, shoot_qp

SCAN_COLUMNS = ["a", "classification", "inf_fiber_energy"]
BOUNDED = "bounded-below, inf = 0"
DEGENERATE = "degenerate, coefficient zero"
UNBOUNDED = "unbounded below"
DEGENERACY_RTOL = 1e-3


def scan_grid(N: int, n_nodes: int = 8001) -> RadialGrid:
    """A grid just covering the support of Q_{p*}, fine enough for the equality case."""
    support = qp_solution(critical_exponent(N), N).support_radius
    return RadialGrid.uniform(N, R_max=math.ceil(support) + 1.0, n_nodes=n_nodes)


def critical_fiber_scan(N: int, mass_grid: Iterable[float], s_values: Optional[np.ndarray] = None,
                        grid: Optional[RadialGrid] = None) -> pd.DataFrame:
    """
    Classify each mass by the fiber energies of w_a = (a/a*)^{1/2} Q_{p*}^{1/2}.

    The e^{(2+N)s} coefficient A_quad - A_p/p* decides the behavior as s -> +inf:
    positive means the fiber stays above 0, negative means it falls to -inf.
    """
    p_star = critical_exponent(N)
    s_values = np.linspace(-20.0, 10.0, 301) if s_values is None else np.asarray(s_values, dtype=float)
    grid = grid or scan_grid(N)
    qp = shoot_qp(p_star, N, grid)
    root = qp.sqrt_field()
    rows = []
    for a in mass_grid:
        params = ModelParams(N=N, p=p_star, a=float(a))
        witness = root.scaled(math.sqrt(a / qp.l1_norm))
        m = compute_masses(witness, params)
        coefficient = m.A_quad - m.A_p / p_star
        relative = coefficient / m.A_quad
        energies = np.array([fiber_energy(m, s, params) for s in s_values])
        if abs(relative) <= DEGENERACY_RTOL:
            label = DEGENERATE
        elif relative > 0:
            label = BOUNDED
        else:
            label = UNBOUNDED
        rows.append({
            "a": float(a),
            "classification": label,
            "inf_fiber_energy": float(energies.min()),
            "a_over_a_star": a / qp.l1_norm,
            "coefficient": coefficient,
            "coefficient_relative": relative,
            "energy_at_s_max": float(energies[-1]),
            "certificate": nonexistence_certificate(m, params, qp.l1_norm),
        })
        logger.debug(f"a={a:.6g}: {label} (relative coefficient {relative:.3e})")
    return pd.DataFrame(rows)


def write_scan_csv(table: pd.DataFrame, path) -> str:
    table[SCAN_COLUMNS].to_csv(path, index=False, float_format="%.17g")
    return str(path)
