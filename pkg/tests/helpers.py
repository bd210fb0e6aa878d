"""Small hand-made scenarios for unit tests."""

from __future__ import annotations

import numpy as np

from zen_tariffs.domain import BuildingType, EconomicParams, FuelSpec, NeighborhoodSpec, TechnologySpec
from zen_tariffs.timeseries import TimeSeriesSet

FUELS = (FuelSpec("gas", 0.05, 277.0), FuelSpec("wood_chips", 0.03, 7.0))


def series(horizon: int, el=1.0, heat=0.0, spot=0.04, insolation=0.0, regional=None, cop=3.0,
           building: str = "house") -> TimeSeriesSet:
    """Core series plus one building type's loads; scalars are broadcast."""
    def arr(v):
        return np.broadcast_to(np.asarray(v, dtype=float), (horizon,)).copy()

    regional = np.arange(horizon, dtype=float) if regional is None else regional
    return TimeSeriesSet.from_columns({
        "spot_price": (arr(spot), "EUR/kWh"),
        "regional_load": (arr(regional), "MW"),
        "insolation": (arr(insolation), "kWh/m²"),
        "outdoor_temperature": (arr(5.0), "°C"),
        "ground_temperature": (arr(6.0), "°C"),
        "cop": (arr(cop), "-"),
        f"{building}_el": (arr(el), "kWh/h"),
        f"{building}_heat": (arr(heat), "kWh/h"),
    }, horizon)


def spec(*techs: TechnologySpec, rate=0.05, years=60, retailer=0.0, heating_grid=False, loss=0.0,
         roof=1000.0, building: str = "house", **eco) -> NeighborhoodSpec:
    return NeighborhoodSpec(
        building_types=(BuildingType(building, 1, f"{building}_el", f"{building}_heat", roof),),
        technologies=techs,
        fuels=FUELS,
        economic=EconomicParams(discount_rate=rate, lifetime_years=years, retailer_tariff=retailer,
                                heating_grid_enabled=heating_grid, **eco),
        heating_grid_loss=loss,
    )


def pv(cost=800.0, maint=0.0, level="neighborhood", tid="nPV", **kw) -> TechnologySpec:
    return TechnologySpec(tid, "pv", level, "electricity", cost, maint, **kw)


def battery(cost=100.0, eta=0.9, ratio=None, tid="Bat", maint=0.0, **kw) -> TechnologySpec:
    return TechnologySpec(tid, "battery", "neighborhood", "electricity_storage", cost, maint, efficiency=eta,
                          storage_power_ratio=ratio, **kw)


def electric_boiler(cost=50.0, eff=0.98, level="building", tid="EB", **kw) -> TechnologySpec:
    return TechnologySpec(tid, "electric_boiler", level, "heat", cost, 0.0, efficiency=eff, **kw)


def gas_boiler(cost=50.0, eff=0.9, level="building", tid="GB", maint=0.0, **kw) -> TechnologySpec:
    return TechnologySpec(tid, "boiler", level, "heat", cost, maint, efficiency=eff, fuel="gas", **kw)


def heat_storage(cost=10.0, eta=0.95, ratio=None, level="building", tid="HS", **kw) -> TechnologySpec:
    return TechnologySpec(tid, "heat_storage", level, "heat_storage", cost, 0.0, efficiency=eta,
                          storage_power_ratio=ratio, **kw)
