"""dB conversion helpers and the deterministic CSV curve container."""
import math

import pytest

from ofdm_im.curves import CurveTable, column, write_csv
from ofdm_im.units import db_grid, db_to_linear, linear_to_db


def test_db_roundtrip():
    for db in (-30.0, -3.0, 0.0, 10.0, 17.5):
        assert math.isclose(linear_to_db(db_to_linear(db)), db,
                            rel_tol=0.0, abs_tol=1e-12)
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == 10.0
    assert db_to_linear(20.0) == 100.0


def test_linear_to_db_domain():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(-1.0)


def test_db_grid_inclusive_endpoints():
    assert db_grid(-10, 30, 5) == (-10, -5, 0, 5, 10, 15, 20, 25, 30)
    assert db_grid(0, 1, 0.25) == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert db_grid(5, 5, 1) == (5.0,)
    # a step that lands a hair past the endpoint by rounding still includes it
    grid = db_grid(0.0, 0.3, 0.1)
    assert len(grid) == 4 and math.isclose(grid[-1], 0.3)


def test_db_grid_errors():
    with pytest.raises(ValueError):
        db_grid(0, 10, 0)
    with pytest.raises(ValueError):
        db_grid(0, 10, -1)
    with pytest.raises(ValueError):
        db_grid(10, 0, 1)


def test_curve_table_validation():
    with pytest.raises(ValueError):
        CurveTable("x", {"a": (1.0, 2.0), "b": (1.0,)}, "analytic")
    with pytest.raises(ValueError):
        CurveTable("x", {"a": (1.0, math.nan)}, "analytic")
    with pytest.raises(ValueError):
        CurveTable("x", {"a": (1.0,)}, "guessed")
    with pytest.raises(ValueError):
        CurveTable("x", {}, "analytic")
    t = CurveTable("ok", {"a": column([1, 2, 3])}, "simulated")
    assert len(t) == 3


def test_write_csv_deterministic_bytes(tmp_path):
    table = CurveTable("demo", {"x_db": (0.0, 1.0), "y": (0.5, 0.25)},
                       "analytic", {"n_f": 4})
    p1 = write_csv(table, tmp_path / "a.csv", {"seed": 7})
    p2 = write_csv(table, tmp_path / "b.csv", {"seed": 7})
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text()
    lines = text.splitlines()
    # sorted '# key = value' metadata, then header, then repr-rendered rows
    assert lines[0] == "# label = demo"
    assert lines[1] == "# n_f = 4"
    assert lines[2] == "# provenance = analytic"
    assert lines[3] == "# seed = 7"
    assert lines[4] == "x_db,y"
    assert lines[5] == "0.0,0.5"
    assert float(lines[6].split(",")[1]) == 0.25


def test_column_normalizes():
    assert column([1, 2]) == (1.0, 2.0)
    assert all(isinstance(v, float) for v in column((True, 3)))
