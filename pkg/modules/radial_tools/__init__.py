"""Radial discretization: grids, fields, quadrature, resampling."""
from modules.radial_tools.grid import (
    DEFAULT_NODES,
    DEFAULT_R_MAX,
    RadialField,
    RadialGrid,
    inner_product,
    integrate_radial,
    lq_norm,
    radial_derivative,
    radial_laplacian,
    unit_sphere_area,
)
from modules.radial_tools.resampling import evaluate_at, rearrange_decreasing, resample
from modules.radial_tools.profile_io import read_profile_csv, write_profile_csv
