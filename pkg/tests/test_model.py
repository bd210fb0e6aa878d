import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import battery, electric_boiler, gas_boiler, heat_storage, pv, series, spec
from oracles import HeatInstance, heat_gap_bound, heat_oracle, min_pv_for_balance
from zen_tariffs.domain import discount_factor
from zen_tariffs.model import BuildOptions, ModelBuilder, build_model, hourly_values
from zen_tariffs.solve import lp_text, solve
from zen_tariffs.tariffs import Energy, SubscribedCapacity

EPS = discount_factor(0.05, 60)
NO_CO2 = BuildOptions(co2_constraint=False)


def solved(sp, ts, scheme=None, options=NO_CO2, backend="scipy"):
    m = build_model(sp, ts, scheme or Energy(), options)
    r = solve(m, backend)
    return m, r


def values(m, r, symbol, tech=None):
    return hourly_values(m, r.vector(m), symbol, tech)


# --- whole-model examples -----------------------------------------------------

def test_import_only_system():
    spot = np.linspace(0.01, 0.08, 24)
    ts = series(24, el=1.0, spot=spot)
    m, r = solved(spec(retailer=0.003), ts)
    assert r.status == "optimal"
    assert np.allclose(values(m, r, "y_imp_tot"), 1.0)
    expected = math.fsum(spot + 0.0225 + 0.003) / EPS
    assert r.objective_value == pytest.approx(expected, rel=1e-9)
    assert m.constants["tariff_fixed"] == pytest.approx(137 / EPS)


def test_import_only_with_co2_is_infeasible():
    _, r = solved(spec(), series(24), options=BuildOptions())
    assert r.status == "infeasible"


def test_pv_sized_by_emission_balance():
    rng = np.random.default_rng(3)
    load = rng.uniform(0.5, 2.0, 48)
    insol = np.clip(np.sin(np.linspace(0, 4 * np.pi, 48)), 0, None) * 0.8
    ts = series(48, el=load, insolation=insol)
    m, r = solved(spec(pv(cost=5000.0, efficiency=0.9)), ts, options=BuildOptions(), backend="highs")
    expected = min_pv_for_balance(load, insol * 0.9)
    assert r.value("x[nPV]") == pytest.approx(expected, rel=1e-6)


def test_zero_load_means_zero_flows():
    ts = series(6, el=0.0)
    m, r = solved(spec(), ts)
    assert np.allclose(r.vector(m), 0.0)
    assert r.objective_value == pytest.approx(0.0, abs=1e-12)


def test_surplus_pv_is_exported():
    ts = series(4, el=1.0, insolation=1.0, spot=0.04)
    sp = spec(pv(cost=0.0, min_capacity=2.0, max_capacity=2.0))
    m, r = solved(sp, ts)
    assert np.allclose(values(m, r, "y_exp_tot"), 1.0)
    assert np.allclose(values(m, r, "y_imp_tot"), 0.0)


def test_central_electric_boiler_through_lossy_grid():
    ts = series(3, el=0.0, heat=10.0)
    sp = spec(electric_boiler(level="neighborhood", tid="nEB", eff=0.98), heating_grid=True, loss=0.1)
    m, r = solved(sp, ts)
    draw = values(m, r, "el_in", "nEB")
    assert np.allclose(draw, 10 / (0.9 * 0.98))
    assert np.allclose(values(m, r, "y_imp_tot"), draw)


def test_central_heat_needs_the_heating_grid():
    sp = spec(electric_boiler(level="neighborhood", tid="nEB"), heating_grid=False)
    m = build_model(sp, series(3, heat=1.0), Energy(), NO_CO2)
    assert "x[nEB]" not in m
    assert solve(m, "scipy").status == "infeasible"


def test_heat_storage_against_exhaustive_oracle():
    price = np.array([0.02, 0.5, 0.03])
    heat = np.array([2.0, 3.0, 1.0])
    ts = series(3, el=0.0, heat=heat, spot=price - 0.0225)
    inst = HeatInstance(heat, price, 0.9, 0.05, 0.02, 0.95, 0.5, 6.0, 0.5, 4.0)
    sp = spec(electric_boiler(cost=inst.boiler_cost, eff=0.9, max_capacity=6.0),
              heat_storage(cost=inst.store_cost, eta=0.95, ratio=2.0, max_capacity=4.0), rate=0.0, years=1)
    m, r = solved(sp, ts, backend="highs")
    ref, _, _ = heat_oracle(inst)
    assert r.objective_value <= ref + 1e-9
    assert ref - r.objective_value <= heat_gap_bound(inst)
    # storage moves production out of the expensive hour
    assert values(m, r, "el_in", "EB.house")[1] < heat[1] / 0.9


# --- storage dynamics ---------------------------------------------------------

def _storage_rows(m, x):
    rows = [i for i, c in enumerate(m.constraints) if c.family == "soc_dyn"]
    return m.slacks(x)[rows]


def test_zero_capacity_storage_is_idle():
    ts = series(24, el=1.0, spot=np.tile([0.01, 0.2], 12))
    m, r = solved(spec(battery(cost=0.0, max_capacity=0.0)), ts)
    for sym in ("soc", "gb_imp", "bat_ch", "bat_dis", "gb_exp", "pb_exp"):
        assert np.allclose(values(m, r, sym), 0.0)


@pytest.mark.parametrize("eta, charge, expected_rise", [(1.0, [5, 0, 0], 5.0), (0.9, [1] * 10, 9.0)])
def test_soc_recursion(eta, charge, expected_rise):
    T = len(charge) + 1
    m = build_model(spec(battery(eta=eta)), series(T), Energy(), NO_CO2)
    x = np.zeros(m.n_vars)
    soc = np.concatenate([[0.0], np.cumsum(np.array(charge) * eta)])
    for t in range(T):
        x[m.index(f"soc[Bat][{t}]")] = soc[t]
    for t, c in enumerate(charge):
        x[m.index(f"gb_imp[Bat][{t}]")] = c
    x[m.index(f"bat_dis[Bat][{T - 1}]")] = soc[-1]  # back to the start: cyclic year
    assert np.all(np.abs(_storage_rows(m, x)) <= 1e-12)
    assert soc[len(charge)] == pytest.approx(expected_rise)


def test_charge_then_discharge_returns_to_start():
    m = build_model(spec(battery(eta=1.0)), series(3), Energy(), NO_CO2)
    x = np.zeros(m.n_vars)
    x[m.index("gb_imp[Bat][0]")] = 5
    x[m.index("soc[Bat][1]")] = 5
    x[m.index("bat_dis[Bat][1]")] = 5
    assert np.all(np.abs(_storage_rows(m, x)) <= 1e-12)


def test_power_ratio_defaults_to_one():
    m = build_model(spec(battery(ratio=None)), series(2), Energy(), NO_CO2)
    row = m.constraint("charge_cap[Bat][0]")
    assert dict(row.terms)[m.index("x[Bat]")] == -1.0


# --- CO2 balance --------------------------------------------------------------

def test_co2_factor_cancels_for_all_electric_systems():
    insol = np.clip(np.sin(np.linspace(0, 2 * np.pi, 24)), 0, None)
    ts = series(24, el=1.0, insolation=insol)
    objs = []
    for phi in (17.0, 1.0, 250.0):
        sp = spec(pv(cost=300.0), battery(cost=50.0, eta=0.9), el_co2_factor=phi)
        _, r = solved(sp, ts, options=BuildOptions(), backend="highs")
        objs.append(r.objective_value)
    assert objs[1] == pytest.approx(objs[0], rel=1e-7) and objs[2] == pytest.approx(objs[0], rel=1e-7)


def test_gas_only_heating_is_infeasible():
    ts = series(24, el=0.0, heat=5.0)
    _, r = solved(spec(gas_boiler()), ts, options=BuildOptions())
    assert r.status == "infeasible"


def test_co2_row_coefficients():
    sp = spec(pv(), battery(eta=0.8), gas_boiler())
    m = build_model(sp, series(2, heat=1.0, insolation=0.5), Energy())
    row = m.constraint("co2_balance")
    coef = {m.variables[j].name: a for j, a in row.terms}
    assert row.unit == "gCO2" and row.sense == "<=" and row.rhs == 0
    assert coef["y_imp_tot[0]"] == 17.0
    assert coef["y_gexp[1]"] == -17.0
    assert coef["gb_exp[Bat][0]"] == pytest.approx(-17.0 * 0.8)
    assert coef["pb_exp[Bat][1]"] == pytest.approx(-17.0 * 0.8)
    assert coef["fuel[GB.house][0]"] == 277.0


# --- export limit -------------------------------------------------------------

def test_slack_export_limit_changes_nothing():
    ts = series(24, el=1.0, insolation=np.clip(np.sin(np.linspace(0, 2 * np.pi, 24)), 0, None))
    sp = spec(pv(cost=50.0, max_capacity=5.0))
    _, free = solved(sp, ts)
    _, capped = solved(sp, ts, options=BuildOptions(export_limit=100.0, co2_constraint=False))
    assert capped.objective_value == pytest.approx(free.objective_value, rel=1e-9)


def test_export_cap_curtails_surplus():
    ts = series(1, el=0.0, insolation=1.0)
    sp = spec(pv(cost=0.0, min_capacity=150.0, max_capacity=150.0))
    m, r = solved(sp, ts, options=BuildOptions(export_limit=100.0, co2_constraint=False))
    assert values(m, r, "y_exp_tot")[0] == pytest.approx(100.0)
    assert values(m, r, "pv_gen", "nPV")[0] == pytest.approx(100.0)  # 50 left unused


def test_battery_lifts_exports_above_the_cap():
    ts = series(3, el=0.0, insolation=[1.0, 0.0, 0.0], spot=0.05)
    fixed_pv = pv(cost=0.0, min_capacity=150.0, max_capacity=150.0)
    opts = BuildOptions(export_limit=100.0, co2_constraint=False)
    m0, r0 = solved(spec(fixed_pv), ts, options=opts)
    m1, r1 = solved(spec(fixed_pv, battery(cost=0.0, eta=0.9, min_capacity=60.0, max_capacity=60.0)), ts,
                    options=opts)
    e0, e1 = values(m0, r0, "y_exp_tot"), values(m1, r1, "y_exp_tot")
    assert e0.sum() == pytest.approx(100.0)
    assert e1.sum() == pytest.approx(100.0 + 50 * 0.9)
    assert e1.max() <= 100.0 + 1e-9


def test_export_limit_must_be_positive():
    with pytest.raises(ValueError):
        build_model(spec(), series(2), Energy(), BuildOptions(export_limit=0.0))


# --- objective ----------------------------------------------------------------

def test_marginal_import_cost():
    ts = series(1, el=1.0, spot=0.04)
    _, r = solved(spec(), ts)
    assert r.objective_value == pytest.approx((0.04 + 0.0225) / EPS, rel=1e-12)


def test_investment_coefficient():
    m = build_model(spec(pv(cost=800.0, maint=8.0)), series(2), Energy(), NO_CO2)
    c = m.objective_vector()[m.index("x[nPV]")]
    assert c == pytest.approx(800 + 8 / EPS, rel=1e-12)
    assert 8 / EPS == pytest.approx(0.4226, abs=1e-4)


def test_heating_grid_cost_is_a_reported_constant():
    sp = spec(heating_grid=True, heating_grid_cost=1234.0)
    m = build_model(sp, series(2, el=0.0), Energy(), NO_CO2)
    assert m.constants["heating_grid"] == 1234.0
    assert m.evaluate_objective(np.zeros(m.n_vars)) == 0.0


# --- structure ----------------------------------------------------------------

def _rich():
    sp = spec(pv(level="building", tid="PV", area_per_kw=6.0), pv(), battery(ratio=0.5),
              electric_boiler(), gas_boiler(level="neighborhood", tid="nGB"), heat_storage(),
              heating_grid=True, loss=0.1)
    return sp, series(24, heat=2.0, insolation=np.clip(np.sin(np.linspace(0, 2 * np.pi, 24)), 0, None))


def test_build_is_deterministic():
    sp, ts = _rich()
    for scheme in (Energy(), SubscribedCapacity()):
        a = build_model(sp, ts, scheme, BuildOptions(export_limit=50.0))
        b = build_model(sp, ts, scheme, BuildOptions(export_limit=50.0))
        assert a.variables == b.variables and a.constraints == b.constraints and a.objective == b.objective
        assert lp_text(a) == lp_text(b)


def test_canonical_ordering_and_names():
    sp, ts = _rich()
    m = build_model(sp, ts, Energy())
    keys = [(v.symbol, v.tech or "", -1 if v.t is None else v.t) for v in m.variables]
    assert keys == sorted(keys)
    rows = [(c.family, c.tech or "", -1 if c.t is None else c.t) for c in m.constraints]
    assert rows == sorted(rows)
    assert len({v.name for v in m.variables}) == m.n_vars
    assert len({c.name for c in m.constraints}) == m.n_rows
    assert "soc[Bat][23]" in m and "x[PV.house]" in m and "y_imp_tot[0]" in m
    assert m.registry["c^sub"] if "c^sub" in m.registry else True


def test_every_triplet_references_a_variable():
    sp, ts = _rich()
    m = build_model(sp, ts, SubscribedCapacity())
    for c in m.constraints:
        assert all(0 <= j < m.n_vars for j, _ in c.terms)
    assert all(0 <= j < m.n_vars for j, _ in m.objective)


ROW_UNITS = {"kWh": {"kWh", "kW"}, "gCO2": {"kWh"}, "m2": {"kW"}}


def test_dimensional_audit():
    """Flows are kWh per hour; capacities kW (or kWh for storage) enter hourly rows as kW x 1 h."""
    sp, ts = _rich()
    for scheme in (Energy(), SubscribedCapacity()):
        m = build_model(sp, ts, scheme, BuildOptions(export_limit=10.0))
        for v in m.variables:
            assert v.unit in ("kWh", "kW"), v
            if v.symbol == "x":
                storage = v.tech in ("Bat",) or v.tech.startswith("HS.")
                assert v.unit == ("kWh" if storage else "kW")
        for c in m.constraints:
            units = {m.variables[j].unit for j, _ in c.terms}
            assert units <= ROW_UNITS[c.unit], (c.name, units)
            if c.unit == "m2":
                assert all(m.variables[j].symbol == "x" for j, _ in c.terms)


def test_roof_area_limits_building_pv():
    sp, ts = _rich()
    m = build_model(sp, ts, Energy())
    row = m.constraint("roof[house]")
    assert row.rhs == 1000.0 and dict(row.terms) == {m.index("x[PV.house]"): 6.0}


def test_night_hours_have_no_pv_rows():
    sp, ts = _rich()
    m = build_model(sp, ts, Energy())
    v = m.variables[m.index("pv_gen[nPV][0]")]
    assert v.ub == 0.0
    with pytest.raises(KeyError):
        m.constraint("pv_gen_avail[nPV][0]")


def test_builder_rejects_duplicates():
    b = ModelBuilder(2)
    b.add_variable("a", t=0)
    with pytest.raises(ValueError):
        b.add_variable("a", t=0)
    b.add_constraint("r", [(0, 1.0)], "<=", 1.0)
    with pytest.raises(ValueError):
        b.add_constraint("r", [(0, 1.0)], "<=", 1.0)
    with pytest.raises(ValueError):
        b.add_constraint("q", [(0, 1.0)], "<", 1.0)


# --- replay and relaxation ----------------------------------------------------

def test_stored_feasible_dispatch_replays():
    sp, ts = _rich()
    m = build_model(sp, ts, Energy(), NO_CO2)
    x = np.zeros(m.n_vars)
    load = ts["house_el"]
    heat = ts["house_heat"]
    # import everything; the central gas boiler serves heat through the grid
    x[m.index("x[nGB]")] = heat.max() / 0.9 * 0.9 / 0.9
    for t in range(24):
        x[m.index(f"y_imp[{t}]")] = load[t]
        x[m.index(f"y_imp_tot[{t}]")] = load[t]
        x[m.index(f"hg[house][{t}]")] = heat[t] / 0.9
        x[m.index(f"fuel[nGB][{t}]")] = heat[t] / 0.9 / 0.9
    x[m.index("x[nGB]")] = (heat / 0.9).max()
    assert m.slacks(x).min() >= -1e-9
    assert m.max_violation(x) <= 1e-9


@settings(max_examples=12)
@given(st.integers(0, 2**31 - 1), st.floats(0.0, 3.0), st.floats(0.1, 3.0))
def test_relaxing_a_capacity_bound_never_hurts(seed, cap, extra):
    rng = np.random.default_rng(seed)
    ts = series(12, el=rng.uniform(0, 3, 12), spot=rng.uniform(0, 0.2, 12),
                insolation=np.clip(rng.normal(0.4, 0.3, 12), 0, None))
    sp_lo = spec(pv(cost=rng.uniform(0.05, 1.0), max_capacity=cap), battery(cost=rng.uniform(0.01, 0.5),
                 max_capacity=cap), rate=0.0, years=1)
    sp_hi = spec(pv(cost=sp_lo.technologies[0].discounted_investment_cost, max_capacity=cap + extra),
                 battery(cost=sp_lo.technologies[1].discounted_investment_cost, max_capacity=cap + extra),
                 rate=0.0, years=1)
    _, lo = solved(sp_lo, ts)
    _, hi = solved(sp_hi, ts)
    assert hi.objective_value <= lo.objective_value + 1e-9 * max(1.0, abs(lo.objective_value))
