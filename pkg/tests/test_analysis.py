import csv
import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import battery, gas_boiler, pv, series, spec
from zen_tariffs.analysis import (
    COST_COMPONENTS,
    SolutionReport,
    build_report,
    duration_curve,
    dso_revenue,
    investment_delta_table,
    peak_import,
    write_report,
)
from zen_tariffs.domain import discount_factor
from zen_tariffs.errors import MismatchedScenarios
from zen_tariffs.model import BuildOptions, build_model
from zen_tariffs.solve import solve
from zen_tariffs.tariffs import (
    Dynamic,
    Energy,
    ScarcityFlags,
    SubscribedCapacity,
    TimeOfUse,
    fixed_annual_charge,
)

EPS = discount_factor(0.05, 60)


# --- duration curve -----------------------------------------------------------

def test_duration_curve_examples():
    assert list(duration_curve([1, 3, 2])) == [3, 2, 1]
    assert list(duration_curve([4.0] * 5)) == [4.0] * 5


def test_duration_curve_full_year():
    x = np.random.default_rng(11).normal(100, 40, 8760)
    d = duration_curve(x)
    assert d[0] == x.max()
    assert np.all(np.diff(d) <= 0)
    assert np.array_equal(np.sort(d), np.sort(x))


@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(-1e4, 1e4)), st.floats(1e-3, 1e3))
def test_duration_curve_scales(x, alpha):
    assert np.array_equal(duration_curve(alpha * x), alpha * duration_curve(x))


# --- revenue and peaks --------------------------------------------------------

def test_energy_revenue_example():
    imports = np.full(100, 100.0)
    assert dso_revenue(imports, np.zeros(100), Energy(), None, None, 18.929) == pytest.approx(6852.3, abs=0.1)


def test_dynamic_revenue_without_flows_is_zero():
    z = np.zeros(24)
    assert dso_revenue(z, z, Dynamic(), ScarcityFlags.none(24), None, EPS) == 0.0


def test_subscription_revenue_below_capacity():
    imports = np.array([3.0, 4.0, 5.0])
    got = dso_revenue(imports, np.zeros(3), SubscribedCapacity(), None, 6.0, EPS)
    assert got == pytest.approx(EPS * (108 * 6 + 0.005 * 12), rel=1e-12)


@pytest.mark.parametrize("imports, peak", [(np.ones(24), 1.0), (np.zeros(24), 0.0), ([0.0, 622.2, 316.4], 622.2)])
def test_peak_import(imports, peak):
    assert peak_import(imports) == peak


# --- investment table ---------------------------------------------------------

def _report(label, caps, fingerprint="abc"):
    instances = {k: (k.split(".")[0], k.split(".")[1] if "." in k else None) for k in caps}
    return SolutionReport(label, label, None, dict(caps), instances, np.zeros(2), np.zeros(2), {}, {}, 0.0, 0.0,
                          None, fingerprint)


def test_identical_reports_give_zero_deltas():
    base = _report("energy", {"nPV": 298.0, "HP.student_housing": 40.0})
    rows = investment_delta_table([_report("tou", base.capacities)], base)
    assert [r["tou"] for r in rows] == [0.0, 0.0]
    assert rows[1]["building"] == "student_housing" and rows[0]["building"] == "plant"


def test_delta_of_one_kilowatt():
    rows = investment_delta_table([_report("tou", {"nPV": 299.0})], _report("energy", {"nPV": 298.0}))
    assert rows == [{"technology": "nPV", "building": "plant", "baseline": 298.0, "tou": 1.0}]


def test_missing_technology_counts_as_removed():
    rows = investment_delta_table([_report("dyn", {})], _report("energy", {"Bat": 12.5}))
    assert rows[0]["dyn"] == -12.5


def test_reports_from_other_scenarios_are_rejected():
    with pytest.raises(MismatchedScenarios):
        investment_delta_table([_report("tou", {}, "zzz")], _report("energy", {}))


# --- decomposition ------------------------------------------------------------

SCHEMES = [Energy(), TimeOfUse(), SubscribedCapacity(), Dynamic()]


@pytest.fixture(scope="module")
def mixed_case():
    rng = np.random.default_rng(5)
    ts = series(48, el=rng.uniform(1, 6, 48), heat=rng.uniform(0, 3, 48), spot=rng.uniform(0.01, 0.1, 48),
                insolation=np.clip(np.sin(np.arange(48) * np.pi / 12), 0, None), regional=rng.uniform(0, 9, 48))
    sp = spec(pv(cost=400.0, maint=6.0), battery(cost=90.0, eta=0.9, maint=1.0), gas_boiler(cost=30.0, maint=2.0),
              retailer=0.004)
    return sp, ts


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.tag)
def test_decomposition_sums_to_objective(mixed_case, scheme):
    sp, ts = mixed_case
    m = build_model(sp, ts, scheme, BuildOptions(co2_constraint=False, export_limit=4.0))
    r = solve(m, "highs")
    rep = build_report(m, r, sp, ts, scheme)
    assert set(rep.cost_breakdown) == set(COST_COMPONENTS)
    assert rep.total_cost == pytest.approx(r.objective_value + m.constant_total, rel=1e-6)
    assert np.array_equal(np.sort(rep.duration_curve), np.sort(rep.imports - rep.exports))
    # revenue minus fixed charges is the objective's tariff component brought back to lifetime value
    w = m.metadata["annual_weight"]
    lifetime_tariff = rep.dso_revenue_lifetime - EPS * fixed_annual_charge(scheme)
    assert lifetime_tariff == pytest.approx(EPS * rep.cost_breakdown["tariff"] / w, rel=1e-6, abs=1e-9)
    if isinstance(scheme, SubscribedCapacity):
        assert rep.subscribed_capacity == pytest.approx(r.value("c_sub"))


def test_co2_slack_is_reported(mixed_case):
    sp, ts = mixed_case
    sp = replace(sp, technologies=sp.technologies[:2])
    m = build_model(sp, ts, Energy())
    rep = build_report(m, solve(m, "highs"), sp, ts, Energy())
    assert rep.co2_slack >= -1e-6


def test_report_files(mixed_case, tmp_path):
    sp, ts = mixed_case
    m = build_model(sp, ts, Energy(), BuildOptions(co2_constraint=False))
    rep = build_report(m, solve(m, "scipy"), sp, ts, Energy(), label="energy_nolimit")
    write_report(rep, tmp_path)
    files = {p.name for p in tmp_path.iterdir()}
    assert {"capacities.csv", "hourly_flows.csv", "duration_curve.csv", "summary.csv", "summary.json"} <= files
    with open(tmp_path / "hourly_flows.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 48
    for row in rows:
        assert float(row["net_import_kwh"]) == pytest.approx(float(row["import_kwh"]) - float(row["export_kwh"]))
    with open(tmp_path / "capacities.csv") as fh:
        caps = list(csv.reader(fh))
    assert caps[0] == ["technology", "building", "capacity"] and len(caps) == 4
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["label"] == "energy_nolimit" and summary["peak_import"] == rep.peak_import
    text = (tmp_path / "summary.csv").read_text()
    assert "," in text and ";" not in text


def test_report_files_are_reproducible(mixed_case, tmp_path):
    sp, ts = mixed_case
    m = build_model(sp, ts, TimeOfUse(), BuildOptions(co2_constraint=False))
    x = solve(m, "highs")
    for d in ("a", "b"):
        write_report(build_report(m, x, sp, ts, TimeOfUse()), tmp_path / d)
    for name in ("capacities.csv", "hourly_flows.csv", "duration_curve.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
