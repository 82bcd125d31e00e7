import numpy as np

from modules.radial_tools.grid import RadialField, RadialGrid


def smooth_field(grid: RadialGrid, rng: np.random.Generator, terms: int = 3) -> RadialField:
    """Random even, rapidly decaying profile: sum of (1 + b r^2) exp(-r^2/w^2)."""
    r = grid.r
    values = np.zeros_like(r)
    for _ in range(terms):
        amp = rng.uniform(0.2, 1.5)
        b = rng.uniform(0.0, 1.0)
        width = rng.uniform(0.6, 2.0)
        values += amp * (1.0 + b * r ** 2) * np.exp(-(r / width) ** 2)
    return RadialField(grid, values)
