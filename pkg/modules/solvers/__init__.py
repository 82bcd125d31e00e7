"""Shooting, continuation, excited-state and mass-critical solvers."""
from modules.solvers.qp_shooting import (
    QpProfile,
    QpSolution,
    a_star,
    critical_gn_constant,
    first_integral,
    free_boundary_defect,
    qp_solution,
    sharp_gn_constant,
    shoot_free_boundary,
    shoot_qp,
)
from modules.solvers.reports import SolveReport, load_report
from modules.solvers.ground_state import (
    ContinuationSchedule,
    critical_upper_level,
    critical_witness,
    fit_grid,
    normalize_mass,
    normalized_ground_state,
    witness_grid,
)
from modules.solvers.excited_states import count_nodes, excited_state
from modules.solvers.critical_scan import critical_fiber_scan, write_scan_csv
from modules.solvers.concentration import concentration_study, write_concentration_csv
