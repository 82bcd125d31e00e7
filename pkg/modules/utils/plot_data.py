"""Two-column `x y` data files for external plotting tools."""
import os

import numpy as np
import pandas as pd

from modules.fiber.fiber_tools import fiber_sweep
from modules.model.functionals import compute_masses
from modules.radial_tools.grid import RadialField

FIBER_S_RANGE = (-3.0, 3.0, 241)


def write_curve(path, x, y) -> str:
    """Whitespace-separated columns, full precision, no header."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pd.DataFrame({"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float)}).to_csv(
        path, sep=" ", header=False, index=False, float_format="%.17g"
    )
    return str(path)


def emit_profile(u: RadialField, output_dir, name: str = "profile.dat") -> str:
    return write_curve(os.path.join(output_dir, name), u.grid.r, u.values)


def emit_fiber(u: RadialField, params, output_dir, name: str = "fiber.dat", s_values=None) -> str:
    """I_mu(s*u) against s, from the closed-form fiber formulas."""
    s_values = np.linspace(*FIBER_S_RANGE) if s_values is None else s_values
    sweep = fiber_sweep(compute_masses(u, params), params, s_values)
    return write_curve(os.path.join(output_dir, name), sweep["s"], sweep["energy"])


def emit_plot_data(item, output_dir, params=None) -> list:
    """
    Write the curves that belong to a report or table.

    SolveReport -> profile.dat and fiber.dat; concentration table ->
    concentration.dat (L2 distance against delta); critical scan -> scan.dat.
    """
    written = []
    if isinstance(item, pd.DataFrame):
        if "dist_l2" in item.columns:
            written.append(write_curve(os.path.join(output_dir, "concentration.dat"), item["delta"], item["dist_l2"]))
        elif "inf_fiber_energy" in item.columns:
            written.append(write_curve(os.path.join(output_dir, "scan.dat"), item["a"], item["inf_fiber_energy"]))
        else:
            raise ValueError(f"no plot layout for a table with columns {list(item.columns)}")
        return written

    profile = getattr(item, "profile", item)
    if not isinstance(profile, RadialField):
        raise ValueError(f"no plot layout for {type(item).__name__}")
    written.append(emit_profile(profile, output_dir))
    params = params if params is not None else getattr(item, "params", None)
    if params is not None:
        written.append(emit_fiber(profile, params.with_mu(0.0), output_dir))
    return written
