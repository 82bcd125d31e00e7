"""Interpolation between radial grids and symmetric decreasing rearrangement."""
import numpy as np
from scipy.interpolate import PchipInterpolator

from modules.radial_tools.grid import RadialField, RadialGrid


def evaluate_at(u: RadialField, radii: np.ndarray) -> np.ndarray:
    """Monotone cubic interpolation of u at arbitrary radii; zero beyond the source R_max."""
    radii = np.asarray(radii, dtype=float)
    interp = PchipInterpolator(u.grid.r, u.values, extrapolate=False)
    out = interp(np.abs(radii))
    return np.nan_to_num(out, nan=0.0)


def resample(u: RadialField, target: RadialGrid) -> RadialField:
    """Move a field onto another grid of the same dimension."""
    if target.dimension != u.grid.dimension:
        raise ValueError("cannot resample across dimensions")
    if target.same_as(u.grid):
        return RadialField(target, u.values)
    return RadialField(target, evaluate_at(u, target.r))


def rearrange_decreasing(u: RadialField) -> RadialField:
    """
    Equimeasurable radially nonincreasing rearrangement of |u| on the same grid.

    Values of |u| are sorted by descending magnitude and laid out against
    cumulative cell volume; each node takes the sorted distribution at the
    centre of its own cell, linearly interpolated between sorted cell centres.
    """
    grid = u.grid
    mags = np.abs(u.values)
    order = np.argsort(-mags, kind="stable")
    sorted_vals = mags[order]
    sorted_w = grid.weights[order]
    sorted_centres = np.cumsum(sorted_w) - 0.5 * sorted_w
    node_centres = np.cumsum(grid.weights) - 0.5 * grid.weights
    out = np.interp(node_centres, sorted_centres, sorted_vals)
    # rounding can leave 1-ulp upticks
    out = np.minimum.accumulate(out)
    return RadialField(grid, out)
