import numpy as np
import pytest

from modules.radial_tools.grid import RadialField, RadialGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid_1d():
    return RadialGrid.uniform(1, R_max=12.0, n_nodes=4801)


@pytest.fixture
def grid_2d():
    return RadialGrid.uniform(2, R_max=12.0, n_nodes=4801)


@pytest.fixture
def grid_3d():
    return RadialGrid.uniform(3, R_max=12.0, n_nodes=4801)


@pytest.fixture
def grids(grid_1d, grid_2d, grid_3d):
    return {1: grid_1d, 2: grid_2d, 3: grid_3d}


@pytest.fixture
def gaussian():
    def build(grid: RadialGrid, amplitude: float = 1.0, width: float = 1.0) -> RadialField:
        return RadialField.from_function(grid, lambda r: amplitude * np.exp(-(r / width) ** 2))

    return build
