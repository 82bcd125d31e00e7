"""One handler per batch command; each returns the process exit status."""
import json
import math
import os

import numpy as np
from loguru import logger

from modules.model.gn_check import closed_form_gn_constant, gn_functional_check
from modules.model.params import critical_exponent
from modules.radial_tools.grid import RadialField
from modules.radial_tools.profile_io import read_profile_csv, write_profile_csv
from modules.solvers.concentration import concentration_study, write_concentration_csv
from modules.solvers.critical_scan import critical_fiber_scan, write_scan_csv
from modules.solvers.excited_states import LAMBDA_MAX, excited_state
from modules.solvers.ground_state import ContinuationSchedule, normalized_ground_state
from modules.solvers.qp_shooting import (
    a_star,
    free_boundary_defect,
    qp_solution,
    sharp_gn_constant,
    shoot_qp,
)
from modules.utils.config import RunConfig
from modules.utils.plot_data import emit_plot_data

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


def _write_json(payload: dict, path) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    return str(path)


def _schedule(config: RunConfig) -> ContinuationSchedule:
    return ContinuationSchedule(**config.schedule)


def _seed(config: RunConfig):
    if not config.seed_profile:
        return None
    return read_profile_csv(config.seed_profile, int(config.params["N"]))


# ─────────────────────────────────────────
# 📐 Q_p AND THE THRESHOLD
# ─────────────────────────────────────────

def run_qp(config: RunConfig, output_dir: str) -> int:
    N, p = int(config.params["N"]), float(config.params["p"])
    qp = shoot_qp(p, N, config.radial_grid())
    solution = qp_solution(p, N)
    w_defect, dw_defect = free_boundary_defect(solution)
    write_profile_csv(qp.profile, os.path.join(output_dir, "qp_profile.csv"))
    _write_json({
        "N": N,
        "p": p,
        "beta": qp.beta,
        "support_radius": qp.support_radius,
        "l1_norm": qp.l1_norm,
        "gn_constant": sharp_gn_constant(p, N),
        "gn_constant_closed_form": closed_form_gn_constant(p, N, qp.l1_norm),
        "boundary_value_defect": w_defect,
        "boundary_slope_defect": dw_defect,
        "profile_path": "qp_profile.csv",
    }, os.path.join(output_dir, "qp.json"))
    emit_plot_data(qp, output_dir)
    logger.info(f"Q_p for N={N}, p={p:g}: beta={qp.beta:.12g}, R={qp.support_radius:.8g}, |Q_p|_1={qp.l1_norm:.12g}")
    return EXIT_OK


def run_astar(config: RunConfig, output_dir: str) -> int:
    N = int(config.params["N"])
    value = a_star(N)
    _write_json({
        "N": N,
        "p_star": critical_exponent(N),
        "a_star": value,
        "gn_constant": sharp_gn_constant(critical_exponent(N), N),
    }, os.path.join(output_dir, "astar.json"))
    logger.info(f"a*({N}) = {value:.12g}")
    return EXIT_OK


# ─────────────────────────────────────────
# 🎯 SOLUTIONS
# ─────────────────────────────────────────

def run_solve(config: RunConfig, output_dir: str) -> int:
    params = config.model_params()
    report = normalized_ground_state(params, _schedule(config), seed=_seed(config), grid=config.radial_grid())
    report.save(output_dir)
    emit_plot_data(report, output_dir)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def run_excited(config: RunConfig, output_dir: str) -> int:
    report = excited_state(
        config.model_params(),
        int(config.k),
        n_nodes=config.radial_grid().size,
        lambda_max=float(config.override("lambda_max", LAMBDA_MAX)),
        deadband=float(config.override("node_deadband", 1e-10)),
    )
    report.save(output_dir)
    emit_plot_data(report, output_dir)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


# ─────────────────────────────────────────
# 📊 MASS-CRITICAL TABLES
# ─────────────────────────────────────────

def run_scan(config: RunConfig, output_dir: str) -> int:
    N = int(config.params["N"])
    masses = list(config.masses) + [r * a_star(N) for r in config.mass_ratios]
    s_values = np.linspace(
        float(config.override("s_min", -20.0)),
        float(config.override("s_max", 10.0)),
        int(config.override("fiber_samples", 301)),
    )
    table = critical_fiber_scan(N, masses, s_values=s_values, grid=config.explicit_grid())
    write_scan_csv(table, os.path.join(output_dir, "scan.csv"))
    emit_plot_data(table, output_dir)
    for row in table.itertuples():
        logger.info(f"a={row.a:.8g}: {row.classification} (inf sampled energy {row.inf_fiber_energy:.4g})")
    return EXIT_OK


def run_concentrate(config: RunConfig, output_dir: str) -> int:
    N = int(config.params["N"])
    table = concentration_study(
        N,
        config.offsets,
        grid=config.radial_grid(),
        schedule=_schedule(config),
        rescale_constant=config.override("rescale_constant"),
    )
    write_concentration_csv(table, os.path.join(output_dir, "concentration.csv"))
    emit_plot_data(table, output_dir)
    return EXIT_OK if bool(table["converged"].all()) else EXIT_NOT_CONVERGED


def run_gncheck(config: RunConfig, output_dir: str) -> int:
    params = config.model_params()
    u = _seed(config)
    if u is None:
        u = RadialField.from_function(config.radial_grid(), lambda r: np.exp(-r ** 2))
    ratio = gn_functional_check(u, params)
    constant = sharp_gn_constant(params.p, params.N)
    _write_json({
        "N": params.N,
        "p": params.p,
        "ratio": ratio,
        "gn_constant": constant,
        "gn_constant_closed_form": closed_form_gn_constant(params.p, params.N, qp_solution(params.p, params.N).l1_norm),
        "source": config.seed_profile or "gaussian",
    }, os.path.join(output_dir, "gncheck.json"))
    logger.info(f"GN ratio {ratio:.8f} (sharp constant {constant:.10g})")
    return EXIT_OK if math.isfinite(ratio) else EXIT_NOT_CONVERGED


COMMAND_HANDLERS = {
    "qp": run_qp,
    "astar": run_astar,
    "solve": run_solve,
    "excited": run_excited,
    "scan-critical": run_scan,
    "concentrate": run_concentrate,
    "gncheck": run_gncheck,
}
