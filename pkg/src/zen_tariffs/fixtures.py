"""Deterministic synthetic scenarios.

The real Norwegian inputs are not redistributable, so tests, the acceptance
suite and the CLI demo run on generated data with a plausible shape: a cold
northern climate with long summer days, office and housing load profiles,
a winter-peaking regional load and a seasonal spot price.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .domain import BuildingType, EconomicParams, FuelSpec, NeighborhoodSpec, TechnologySpec, neighborhood_to_dict
from .timeseries import HOURS_PER_YEAR, TimeSeriesSet, write_series_csv

# name -> (mean electric kW, heat kW per degree-hour below 17 °C, DHW kW, office profile)
BUILDING_PROFILES = {
    "student_housing": (22.0, 3.0, 6.0, False),
    "normal_offices": (26.0, 3.5, 1.5, True),
    "passive_offices": (14.0, 1.0, 1.0, True),
    "apartments": (18.0, 2.2, 4.0, False),
}


def carnot_cop(source_temp, supply_temp: float = 55.0, quality: float = 0.45, cap: float = 6.0) -> np.ndarray:
    """Heat-pump COP as a fraction of the Carnot limit, clipped to ``[1, cap]``."""
    src = np.asarray(source_temp, dtype=float)
    lift = np.maximum(supply_temp - src, 5.0)
    return np.clip(quality * (supply_temp + 273.15) / lift, 1.0, cap)


def synthetic_timeseries(building_types=tuple(BUILDING_PROFILES), seed: int = 7,
                         horizon: int = HOURS_PER_YEAR, start: int = 0) -> TimeSeriesSet:
    """Hourly inputs for ``horizon`` hours beginning at hour ``start`` of the year."""
    rng = np.random.default_rng(seed)
    t = np.arange(start, start + horizon)
    day, hour = t // 24, t % 24
    season = np.cos(2 * math.pi * (day - 20) / 365)  # +1 mid-winter, -1 mid-summer
    weekday = (day % 7) < 5

    daily_noise = rng.normal(0.0, 2.5, size=day.max() + 1)[day]
    outdoor = 5.0 - 9.0 * season + 3.0 * np.sin(2 * math.pi * (hour - 9) / 24) + daily_noise
    ground = 6.0 - 2.0 * np.cos(2 * math.pi * (day - 60) / 365)

    daylength = 12.0 + 8.0 * np.sin(2 * math.pi * (day - 80) / 365)
    sunrise = 12.0 - daylength / 2
    elevation = np.sin(math.pi * np.clip((hour + 0.5 - sunrise) / daylength, 0.0, 1.0))
    peak = 0.45 - 0.35 * season
    clouds = rng.uniform(0.35, 1.0, size=day.max() + 1)[day]
    insolation = np.round(peak * elevation * clouds, 6)
    insolation[insolation < 0.01] = 0.0  # twilight output is negligible and hurts LP scaling

    spot = 0.035 + 0.012 * season + 0.006 * np.isin(hour, [8, 9, 10, 17, 18, 19]) + rng.normal(0, 0.002, horizon)
    regional = (3500 + 1500 * season + 600 * np.isin(hour, list(range(7, 21)))
                + 300 * weekday + rng.normal(0, 80, horizon))

    cols = {
        "spot_price": (np.round(spot, 6), "EUR/kWh"),
        "regional_load": (np.round(regional, 3), "MW"),
        "insolation": (insolation, "kWh/m²"),
        "outdoor_temperature": (np.round(outdoor, 3), "°C"),
        "ground_temperature": (np.round(ground, 3), "°C"),
        "cop_air": (np.round(carnot_cop(outdoor), 6), "-"),
        "cop_ground": (np.round(carnot_cop(ground), 6), "-"),
    }
    hdd = np.maximum(17.0 - outdoor, 0.0)
    for bid in building_types:
        el_mean, heat_per_deg, dhw, office = BUILDING_PROFILES.get(bid, (40.0, 5.0, 5.0, False))
        if office:
            shape = np.where(weekday & (hour >= 7) & (hour < 18), 1.6, 0.55)
        else:
            shape = 0.7 + 0.35 * np.isin(hour, range(6, 9)) + 0.6 * np.isin(hour, range(17, 23))
        el = el_mean * shape / shape.mean() * (1 + 0.1 * season) * rng.uniform(0.9, 1.1, horizon)
        dhw_shape = 1 + 0.8 * np.isin(hour, range(6, 9)) + 0.5 * np.isin(hour, range(17, 22))
        heat = heat_per_deg * hdd + dhw * dhw_shape / dhw_shape.mean()
        cols[f"{bid}_el"] = (np.round(el, 4), "kWh/h")
        cols[f"{bid}_heat"] = (np.round(heat, 4), "kWh/h")
    return TimeSeriesSet.from_columns(cols, horizon)


FUELS = (FuelSpec("gas", 0.05, 277.0), FuelSpec("wood_chips", 0.03, 7.0))


def full_technologies() -> tuple[TechnologySpec, ...]:
    """Ten technologies: four per building type, six in the central plant."""
    return (
        TechnologySpec("PV", "pv", "building", "electricity", 1100.0, 12.0, efficiency=0.85, area_per_kw=6.0),
        TechnologySpec("HP", "heat_pump", "building", "heat", 1100.0, 15.0, cop_profile="cop_air"),
        TechnologySpec("EB", "electric_boiler", "building", "heat", 150.0, 1.5, efficiency=0.98),
        TechnologySpec("GB", "boiler", "building", "heat", 200.0, 3.0, efficiency=0.9, fuel="gas"),
        TechnologySpec("nPV", "pv", "neighborhood", "electricity", 950.0, 10.0, efficiency=0.85, max_capacity=3000.0),
        TechnologySpec("nHP", "heat_pump", "neighborhood", "heat", 900.0, 12.0, cop_profile="cop_ground"),
        TechnologySpec("nBB", "boiler", "neighborhood", "heat", 500.0, 15.0, efficiency=0.85, fuel="wood_chips"),
        TechnologySpec("nEB", "electric_boiler", "neighborhood", "heat", 100.0, 1.0, efficiency=0.98),
        TechnologySpec("Bat", "battery", "neighborhood", "electricity_storage", 350.0, 3.0, efficiency=0.92,
                       storage_power_ratio=0.5),
        TechnologySpec("nHS", "heat_storage", "neighborhood", "heat_storage", 15.0, 0.1, efficiency=0.97,
                       storage_power_ratio=0.25),
    )


def full_neighborhood(seed: int = 7, horizon: int = HOURS_PER_YEAR,
                      start: int = 0) -> tuple[NeighborhoodSpec, TimeSeriesSet]:
    """Four building types, ten technologies, heating grid in place."""
    ts = synthetic_timeseries(tuple(BUILDING_PROFILES), seed, horizon, start)
    roofs = {"student_housing": 900.0, "normal_offices": 700.0, "passive_offices": 500.0, "apartments": 800.0}
    counts = {"student_housing": 6, "normal_offices": 3, "passive_offices": 2, "apartments": 5}
    spec = NeighborhoodSpec(
        building_types=tuple(BuildingType(b, counts[b], f"{b}_el", f"{b}_heat", roofs[b]) for b in BUILDING_PROFILES),
        technologies=full_technologies(),
        fuels=FUELS,
        economic=EconomicParams(discount_rate=0.05, lifetime_years=60, heating_grid_cost=250000.0,
                                heating_grid_enabled=True),
        heating_grid_loss=0.08,
    )
    return spec, ts


def electric_neighborhood(pv_max: float = 600.0, battery_cost: float = 300.0, battery_max: float = math.inf,
                          pv_cost: float = 900.0, seed: int = 7, horizon: int = HOURS_PER_YEAR,
                          retailer_tariff: float = 0.0, flat_spot: float | None = None,
                          heat: bool = False, start: int = 0,
                          battery_min: float = 0.0) -> tuple[NeighborhoodSpec, TimeSeriesSet]:
    """One building type with PV and a battery; heat load zeroed unless ``heat``.

    ``battery_min = battery_max`` fixes the battery size.
    """
    ts = synthetic_timeseries(("student_housing",), seed, horizon, start)
    if not heat:
        ts = ts.with_series("student_housing_heat", np.zeros(horizon), "kWh/h")
    if flat_spot is not None:
        ts = ts.with_series("spot_price", np.full(horizon, flat_spot), "EUR/kWh")
    techs = []
    if pv_max > 0:
        techs.append(TechnologySpec("nPV", "pv", "neighborhood", "electricity", pv_cost, 10.0, efficiency=0.85,
                                    max_capacity=pv_max))
    techs.append(TechnologySpec("Bat", "battery", "neighborhood", "electricity_storage", battery_cost, 0.0,
                                efficiency=0.92, storage_power_ratio=0.5, min_capacity=battery_min,
                                max_capacity=battery_max))
    if heat:
        techs.append(TechnologySpec("EB", "electric_boiler", "building", "heat", 150.0, 1.5, efficiency=0.98))
    spec = NeighborhoodSpec(
        building_types=(BuildingType("student_housing", 6, "student_housing_el", "student_housing_heat", 900.0),),
        technologies=tuple(techs),
        fuels=FUELS,
        economic=EconomicParams(retailer_tariff=retailer_tariff, heating_grid_enabled=False),
    )
    return spec, ts


def scenario_document(spec: NeighborhoodSpec, series_csv: str, manifest: dict, tariff: dict | None = None,
                      options: dict | None = None) -> dict:
    doc = neighborhood_to_dict(spec)
    doc["series"] = {"path": series_csv, "manifest": manifest}
    doc["tariff"] = tariff or {"type": "energy"}
    doc["options"] = options or {"export_limit": None, "co2_constraint": True}
    return doc


def write_fixture(directory, variant: str = "full", horizon: int = HOURS_PER_YEAR, tariff: dict | None = None,
                  options: dict | None = None, start: int = 0) -> Path:
    """Write ``scenario.json`` plus ``series.csv`` into ``directory``; returns the scenario path.

    ``start`` picks the first hour of the year for shorter horizons.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if variant == "full":
        spec, ts = full_neighborhood(horizon=horizon, start=start)
    elif variant == "electric":
        spec, ts = electric_neighborhood(horizon=horizon, start=start)
    else:
        raise ValueError(f"unknown fixture variant {variant!r}")
    write_series_csv(ts, directory / "series.csv")
    doc = scenario_document(spec, "series.csv", ts.manifest(), tariff, options)
    if horizon != HOURS_PER_YEAR:
        doc["series"]["horizon"] = horizon
    path = directory / "scenario.json"
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path
