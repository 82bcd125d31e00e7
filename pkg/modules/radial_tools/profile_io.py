"""Profile CSV persistence (header `r,u`, 17 significant digits)."""
import os

import numpy as np
import pandas as pd

from modules.radial_tools.grid import RadialField, RadialGrid

FLOAT_FORMAT = "%.17g"


def write_profile_csv(u: RadialField, path) -> str:
    """Write a profile as `r,u` rows and return the path."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    df = pd.DataFrame({"r": u.grid.r, "u": u.values})
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return str(path)


def read_profile_csv(path, dimension: int) -> RadialField:
    """Load a profile written by write_profile_csv onto its uniform grid."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Profile not found at {path}")
    df = pd.read_csv(path, dtype=float, float_precision="round_trip")
    if list(df.columns) != ["r", "u"]:
        raise ValueError(f"{path}: expected header r,u, got {','.join(df.columns)}")
    r = df["r"].to_numpy()
    grid = RadialGrid.uniform(dimension, R_max=float(r[-1]), n_nodes=r.size)
    if not np.allclose(grid.r, r, rtol=0.0, atol=1e-12 * max(1.0, r[-1])):
        raise ValueError(f"{path}: profile nodes are not a uniform grid from 0")
    return RadialField(grid, df["u"].to_numpy())
