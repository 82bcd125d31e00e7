"""Dilation fibers, Pohozaev projection and the fiber-maximal energy."""
from modules.fiber.fiber_tools import (
    FiberSolveResult,
    fiber_energy,
    fiber_max_energy,
    fiber_project,
    fiber_Q,
    fiber_Q_slope,
    fiber_sweep,
    scale_field,
    solve_s_mu,
)
