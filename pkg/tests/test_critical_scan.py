import pandas as pd
import pytest

from modules.solvers.critical_scan import (
    BOUNDED,
    DEGENERATE,
    SCAN_COLUMNS,
    UNBOUNDED,
    critical_fiber_scan,
    write_scan_csv,
)
from modules.solvers.qp_shooting import a_star


@pytest.fixture(scope="module")
def scan_n1():
    threshold = a_star(1)
    return critical_fiber_scan(1, [0.9 * threshold, threshold, 1.5 * threshold])


def test_trichotomy_in_one_dimension(scan_n1):
    assert list(scan_n1["classification"]) == [BOUNDED, DEGENERATE, UNBOUNDED]
    assert abs(scan_n1["coefficient_relative"].iloc[1]) <= 1e-3


def test_fiber_infima(scan_n1):
    below, _, above = scan_n1.itertuples()
    assert 0.0 <= below.inf_fiber_energy < 1e-10
    assert above.inf_fiber_energy < -1e6
    assert below.certificate > 0.0


def test_scan_csv_columns(tmp_path, scan_n1):
    path = write_scan_csv(scan_n1, tmp_path / "scan.csv")
    table = pd.read_csv(path)
    assert list(table.columns) == SCAN_COLUMNS
    assert len(table) == 3

