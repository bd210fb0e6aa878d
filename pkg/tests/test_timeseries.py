import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from zen_tariffs.errors import HorizonMismatch, MissingColumn, NegativeLoad, UnitMismatch, UnparseableValue
from zen_tariffs.fixtures import synthetic_timeseries
from zen_tariffs.timeseries import TimeSeriesSet, hour_of_day, load_series_csv, write_series_csv


def _write(path, header, rows):
    path.write_text("\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n")
    return path


def test_full_year_round_trip(tmp_path):
    ts = synthetic_timeseries()
    write_series_csv(ts, tmp_path / "s.csv")
    back = load_series_csv(tmp_path / "s.csv", ts.manifest())
    assert back.ids == ts.ids
    for sid in ts.ids:
        assert back.unit(sid) == ts.unit(sid)
        assert np.array_equal(back[sid], ts[sid])
        assert len(back[sid]) == 8760


@given(arrays(np.float64, 24, elements=st.floats(-1e6, 1e6, allow_subnormal=True)))
def test_round_trip_is_bit_exact(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    ts = TimeSeriesSet.from_columns({"spot_price": (values, "EUR/kWh")}, 24)
    write_series_csv(ts, path)
    back = load_series_csv(path, {"spot_price": "spot_price"}, 24)
    assert back["spot_price"].tobytes() == values.tobytes()


def test_short_file_reports_row_count(tmp_path):
    p = _write(tmp_path / "s.csv", ["spot_price"], [["0.1"]] * 8759)
    with pytest.raises(HorizonMismatch) as exc:
        load_series_csv(p, {"spot_price": "spot_price"})
    assert exc.value.n_rows == 8759


def test_negative_load_is_located(tmp_path):
    rows = [["1.0"]] * 10
    rows[6] = ["-1"]
    p = _write(tmp_path / "s.csv", ["office_el"], rows)
    with pytest.raises(NegativeLoad) as exc:
        load_series_csv(p, {"office_el": {"column": "office_el", "unit": "kWh/h"}}, 10)
    assert exc.value.row == 6 and exc.value.value == -1.0


def test_negative_spot_price_is_allowed(tmp_path):
    p = _write(tmp_path / "s.csv", ["spot_price"], [["-0.01"]] * 4)
    assert load_series_csv(p, {"spot_price": "spot_price"}, 4)["spot_price"][0] == -0.01


@pytest.mark.parametrize("raw", ['"0,5"', "abc", "1 000", "nan", "inf", ""])
def test_unparseable_value(tmp_path, raw):
    rows = [["1.0", "2.0"]] * 4
    rows[2] = ["1.0", raw]
    p = _write(tmp_path / "s.csv", ["a", "spot_price"], rows)
    with pytest.raises(UnparseableValue) as exc:
        load_series_csv(p, {"spot_price": "spot_price"}, 4)
    assert (exc.value.row, exc.value.col) == (2, "spot_price")


def test_ragged_row_is_rejected(tmp_path):
    rows = [["1.0", "2.0"]] * 4
    rows[1] = ["1.0", "0", "5"]
    p = _write(tmp_path / "s.csv", ["a", "spot_price"], rows)
    with pytest.raises(UnparseableValue) as exc:
        load_series_csv(p, {"spot_price": "spot_price"}, 4)
    assert exc.value.row == 1


def test_missing_column(tmp_path):
    p = _write(tmp_path / "s.csv", ["spot_price"], [["1"]] * 3)
    with pytest.raises(MissingColumn) as exc:
        load_series_csv(p, {"spot_price": "spot_price", "insolation": "insol"}, 3)
    assert exc.value.series_id == "insolation"


def test_unit_tags_survive_and_mixing_is_rejected():
    ts = TimeSeriesSet.from_columns({"x": (np.zeros(3), "kWh/h")}, 3)
    assert ts.unit("x") == "kWh/h"
    with pytest.raises(UnitMismatch):
        ts.with_series("x", np.ones(3), "MW")
    assert ts.with_series("x", np.ones(3), "kWh/h")["x"][0] == 1.0


def test_series_are_read_only():
    ts = TimeSeriesSet.from_columns({"x": (np.zeros(3), "kWh/h")}, 3)
    with pytest.raises(ValueError):
        ts["x"][0] = 1.0


def test_wrong_length_series():
    with pytest.raises(HorizonMismatch):
        TimeSeriesSet.from_columns({"x": (np.zeros(5), "kWh/h")}, 4)


@pytest.mark.parametrize("t, h", [(0, 0), (25, 1), (8759, 23)])
def test_hour_of_day(t, h):
    assert hour_of_day(t) == h


@pytest.mark.parametrize("t", [-1, 8760])
def test_hour_of_day_out_of_range(t):
    with pytest.raises(IndexError):
        hour_of_day(t)
