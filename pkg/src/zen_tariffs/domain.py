"""Core domain types, validation and lifetime discounting.

Units are fixed across the package: kW / kWh for power and energy (hourly
resolution, so kW and kWh/h coincide), EUR for money, gCO2/kWh for emission
factors.  Technology capacities are kW of output (kWp for PV, kW heat for heat
producers) and kWh for storages.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping

from .errors import ValidationError, Violation
from .timeseries import HOURS_PER_YEAR, TimeSeriesSet

LEVELS = ("building", "neighborhood")
CARRIERS = ("electricity", "heat", "electricity_storage", "heat_storage")

# technology model -> carrier it must declare
KIND_CARRIER = {
    "pv": "electricity",
    "solar_thermal": "heat",
    "heat_pump": "heat",
    "electric_boiler": "heat",
    "boiler": "heat",
    "chp": "heat",
    "battery": "electricity_storage",
    "heat_storage": "heat_storage",
}
FUELLED_KINDS = frozenset({"boiler", "chp"})
SOLAR_KINDS = frozenset({"pv", "solar_thermal"})
STORAGE_KINDS = frozenset({"battery", "heat_storage"})

CORE_SERIES = {
    "spot_price": "EUR/kWh",
    "regional_load": "MW",
    "insolation": "kWh/m²",
    "outdoor_temperature": "°C",
    "ground_temperature": "°C",
}

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class FuelSpec:
    id: str
    price: float  # EUR per kWh of fuel
    co2_factor: float  # gCO2 per kWh of fuel


@dataclass(frozen=True)
class TechnologySpec:
    """An investable technology.

    ``level`` decides whether one capacity is sized per building type
    ("building") or once for the central plant ("neighborhood").
    ``cop_profile`` names a dimensionless series in the time-series set.
    ``area_per_kw`` (m² per kW) ties solar capacity to the building roof area.
    """

    id: str
    kind: str
    level: str
    carrier: str
    discounted_investment_cost: float
    annual_maintenance_cost: float = 0.0
    efficiency: float = 1.0
    cop_profile: str | None = None
    fuel: str | None = None
    max_capacity: float = math.inf
    min_capacity: float = 0.0
    storage_power_ratio: float | None = None
    electric_efficiency: float | None = None
    area_per_kw: float | None = None


@dataclass(frozen=True)
class EconomicParams:
    discount_rate: float = 0.05
    lifetime_years: int = 60
    grid_tariff_flat: float = 0.0225
    retailer_tariff: float = 0.0
    heating_grid_cost: float = 0.0
    heating_grid_enabled: bool = True
    el_co2_factor: float = 17.0

    @property
    def discount_factor(self) -> float:
        return discount_factor(self.discount_rate, self.lifetime_years)


@dataclass(frozen=True)
class BuildingType:
    id: str
    count: int
    electric_load: str  # series id, aggregate kWh/h of all buildings of this type
    heat_load: str
    roof_area: float = 0.0  # m², aggregate


@dataclass(frozen=True)
class NeighborhoodSpec:
    building_types: tuple[BuildingType, ...]
    technologies: tuple[TechnologySpec, ...] = ()
    fuels: tuple[FuelSpec, ...] = ()
    economic: EconomicParams = field(default_factory=EconomicParams)
    heating_grid_loss: float = 0.0

    def __post_init__(self):
        for name in ("building_types", "technologies", "fuels"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def technology(self, tech_id: str) -> TechnologySpec:
        for tech in self.technologies:
            if tech.id == tech_id:
                return tech
        raise KeyError(tech_id)

    def fuel(self, fuel_id: str) -> FuelSpec:
        for fuel in self.fuels:
            if fuel.id == fuel_id:
                return fuel
        raise KeyError(fuel_id)


class ValidatedSpec(NeighborhoodSpec):
    """A :class:`NeighborhoodSpec` that passed :func:`validate_neighborhood`."""

    horizon: int

    @classmethod
    def _wrap(cls, spec: NeighborhoodSpec, horizon: int) -> "ValidatedSpec":
        obj = cls(**{f.name: getattr(spec, f.name) for f in fields(NeighborhoodSpec)})
        object.__setattr__(obj, "horizon", horizon)
        return obj


def discount_factor(rate: float, lifetime_years: int) -> float:
    """Sum of yearly discount weights ``(1 + rate) ** -y`` for ``y = 1..lifetime_years``."""
    if rate < 0 or lifetime_years < 0:
        raise ValueError("discount rate and lifetime must be non-negative")
    return math.fsum((1.0 + rate) ** -y for y in range(1, int(lifetime_years) + 1))


def _check_series(ts: TimeSeriesSet, sid: str, unit: str, owner: str, out: list[Violation]):
    if sid not in ts:
        out.append(Violation("MissingSeries", sid, f"referenced by {owner}"))
    elif ts.unit(sid) != unit:
        out.append(Violation("BadUnit", sid, f"{owner} expects {unit}, series is {ts.unit(sid)}"))


def _technology_violations(tech: TechnologySpec, fuels: set[str], ts: TimeSeriesSet) -> list[Violation]:
    out: list[Violation] = []
    tid = tech.id
    if tech.kind not in KIND_CARRIER:
        out.append(Violation("BadUnit", tid, f"unknown technology kind {tech.kind!r}"))
    elif KIND_CARRIER[tech.kind] != tech.carrier:
        out.append(Violation("BadUnit", tid, f"kind {tech.kind} requires carrier {KIND_CARRIER[tech.kind]}"))
    if tech.level not in LEVELS:
        out.append(Violation("BadUnit", tid, f"unknown level {tech.level!r}"))
    if tech.carrier not in CARRIERS:
        out.append(Violation("BadUnit", tid, f"unknown carrier {tech.carrier!r}"))
    for name in ("discounted_investment_cost", "annual_maintenance_cost"):
        if getattr(tech, name) < 0:
            out.append(Violation("NegativeCost", tid, f"{name} = {getattr(tech, name)}"))
    if tech.kind != "heat_pump" and not 0 < tech.efficiency <= 1:
        out.append(Violation("BadUnit", tid, f"efficiency {tech.efficiency} outside (0, 1]"))
    if tech.kind == "heat_pump":
        if tech.cop_profile is None:
            out.append(Violation("MissingSeries", tid, "heat pump without cop_profile"))
        else:
            _check_series(ts, tech.cop_profile, "-", tid, out)
            if tech.cop_profile in ts and ts.unit(tech.cop_profile) == "-" and ts[tech.cop_profile].min() < 1:
                out.append(Violation("BadUnit", tid, f"cop_profile {tech.cop_profile} has values below 1"))
    if tech.kind in FUELLED_KINDS:
        if tech.fuel is None:
            out.append(Violation("BadUnit", tid, "fuelled technology without fuel"))
        elif tech.fuel not in fuels:
            out.append(Violation("MissingSeries", tech.fuel, f"fuel referenced by {tid} is not defined"))
    if tech.kind == "chp":
        eel = tech.electric_efficiency
        if eel is None or not 0 < eel <= 1 or eel + tech.efficiency > 1 + 1e-12:
            out.append(Violation("BadUnit", tid, "chp needs electric_efficiency in (0, 1] with total <= 1"))
    if not tech.max_capacity >= 0:
        out.append(Violation("BadUnit", tid, f"max_capacity {tech.max_capacity} is negative"))
    if not 0 <= tech.min_capacity <= tech.max_capacity:
        out.append(Violation("BadUnit", tid, "min_capacity must lie in [0, max_capacity]"))
    if tech.storage_power_ratio is not None and tech.storage_power_ratio <= 0:
        out.append(Violation("BadUnit", tid, "storage_power_ratio must be positive"))
    if tech.area_per_kw is not None and tech.area_per_kw < 0:
        out.append(Violation("BadUnit", tid, "area_per_kw must be non-negative"))
    return out


def validate_neighborhood(spec: NeighborhoodSpec, ts: TimeSeriesSet, horizon: int | None = HOURS_PER_YEAR) -> ValidatedSpec:
    """Check every invariant of ``spec`` against ``ts``.

    Returns a :class:`ValidatedSpec`; raises :class:`ValidationError` listing
    all violations otherwise.  ``horizon=None`` accepts whatever horizon ``ts``
    has (toy models).
    """
    out: list[Violation] = []
    if horizon is not None and ts.horizon != horizon:
        out.append(Violation("HorizonMismatch", str(ts.horizon), f"expected {horizon} hours"))

    if not spec.building_types:
        out.append(Violation("BadUnit", "building_types", "at least one building type is required"))
    seen: set[str] = set()
    for ident in [b.id for b in spec.building_types] + [t.id for t in spec.technologies] + [f.id for f in spec.fuels]:
        if not _IDENT.match(ident):
            out.append(Violation("BadUnit", ident, "identifiers must match [A-Za-z_][A-Za-z0-9_]*"))
        if ident in seen:
            out.append(Violation("BadUnit", ident, "duplicate identifier"))
        seen.add(ident)

    for sid, unit in CORE_SERIES.items():
        _check_series(ts, sid, unit, "neighborhood", out)
    for b in spec.building_types:
        if b.count < 1:
            out.append(Violation("BadUnit", b.id, "count must be >= 1"))
        if b.roof_area < 0:
            out.append(Violation("BadUnit", b.id, "roof_area must be non-negative"))
        _check_series(ts, b.electric_load, "kWh/h", b.id, out)
        _check_series(ts, b.heat_load, "kWh/h", b.id, out)

    if not 0 <= spec.heating_grid_loss < 1:
        out.append(Violation("BadUnit", "heating_grid_loss", f"{spec.heating_grid_loss} outside [0, 1)"))

    eco = spec.economic
    if eco.lifetime_years < 1:
        out.append(Violation("BadUnit", "lifetime_years", "must be >= 1"))
    if eco.discount_rate < 0:
        out.append(Violation("BadUnit", "discount_rate", "must be >= 0"))
    for name in ("grid_tariff_flat", "retailer_tariff", "heating_grid_cost"):
        if getattr(eco, name) < 0:
            out.append(Violation("NegativeCost", name, str(getattr(eco, name))))
    if eco.el_co2_factor < 0:
        out.append(Violation("NegativeCost", "el_co2_factor", str(eco.el_co2_factor)))

    for fuel in spec.fuels:
        if fuel.price < 0:
            out.append(Violation("NegativeCost", fuel.id, f"price = {fuel.price}"))
        if fuel.co2_factor < 0:
            out.append(Violation("NegativeCost", fuel.id, f"co2_factor = {fuel.co2_factor}"))

    fuel_ids = {f.id for f in spec.fuels}
    for tech in spec.technologies:
        out.extend(_technology_violations(tech, fuel_ids, ts))

    if out:
        raise ValidationError(out)
    if isinstance(spec, ValidatedSpec) and spec.horizon == ts.horizon:
        return spec
    return ValidatedSpec._wrap(spec, ts.horizon)


# --- scenario document -----------------------------------------------------

def _tech_from_dict(d: Mapping) -> TechnologySpec:
    d = dict(d)
    if d.get("max_capacity") is None:
        d["max_capacity"] = math.inf
    return TechnologySpec(**d)


def neighborhood_from_dict(doc: Mapping) -> NeighborhoodSpec:
    """Build a spec from the ``neighborhood``/``technologies``/``fuels``/``economics`` parts of a scenario."""
    nb = doc["neighborhood"]
    return NeighborhoodSpec(
        building_types=tuple(BuildingType(**b) for b in nb["building_types"]),
        heating_grid_loss=nb.get("heating_grid_loss", 0.0),
        technologies=tuple(_tech_from_dict(t) for t in doc.get("technologies", ())),
        fuels=tuple(FuelSpec(**f) for f in doc.get("fuels", ())),
        economic=EconomicParams(**doc.get("economics", {})),
    )


def neighborhood_to_dict(spec: NeighborhoodSpec) -> dict:
    def tech(t: TechnologySpec) -> dict:
        d = {f.name: getattr(t, f.name) for f in fields(TechnologySpec)}
        if math.isinf(d["max_capacity"]):
            d["max_capacity"] = None
        return d

    return {
        "neighborhood": {
            "building_types": [{f.name: getattr(b, f.name) for f in fields(BuildingType)} for b in spec.building_types],
            "heating_grid_loss": spec.heating_grid_loss,
        },
        "technologies": [tech(t) for t in spec.technologies],
        "fuels": [{f.name: getattr(x, f.name) for f in fields(FuelSpec)} for x in spec.fuels],
        "economics": {f.name: getattr(spec.economic, f.name) for f in fields(EconomicParams)},
    }


# Where each objective / CO2-balance symbol lives in this package.  Entries are
# "Type.field" for inputs, "var:<symbol>" for model variables and
# "fn:<name>" for derived quantities.
SYMBOL_TABLE: dict[str, str] = {
    # objective
    "C_i^disc": "TechnologySpec.discounted_investment_cost",
    "x_i": "var:x",
    "b_hg": "EconomicParams.heating_grid_enabled",
    "C_hg": "EconomicParams.heating_grid_cost",
    "eps_tot_rD": "fn:discount_factor",
    "r": "EconomicParams.discount_rate",
    "D": "EconomicParams.lifetime_years",
    "C_i^maint": "TechnologySpec.annual_maintenance_cost",
    "f_ft": "var:fuel",
    "P_f^fuel": "FuelSpec.price",
    "P_t^spot": "series:spot_price",
    "P^grid": "EconomicParams.grid_tariff_flat",
    "P^ret": "EconomicParams.retailer_tariff",
    "y_t^imp": "var:y_imp",
    "y_t,est^gb_imp": "var:gb_imp",
    "y_t^exp": "var:y_exp_tot",
    # CO2 balance
    "phi_e": "EconomicParams.el_co2_factor",
    "phi_f": "FuelSpec.co2_factor",
    "y_t,est^gb_exp": "var:gb_exp",
    "y_t,est^pb_exp": "var:pb_exp",
    "eta_est": "TechnologySpec.efficiency",
    "y_t,g^exp": "var:y_gexp",
    # tariffs
    "y_t^imp_tot": "var:y_imp_tot",
    "y_t^exp_tot": "var:y_exp_tot",
    "c^sub": "var:c_sub",
    "y_t^imp_below": "var:imp_below",
    "y_t^imp_above": "var:imp_above",
    "delta_t^sc": "fn:scarcity_flags",
    "C^sc": "Dynamic.scarcity_price",
}

OBJECTIVE_SYMBOLS = (
    "C_i^disc", "x_i", "b_hg", "C_hg", "eps_tot_rD", "C_i^maint", "f_ft", "P_f^fuel",
    "P_t^spot", "P^grid", "P^ret", "y_t^imp", "y_t,est^gb_imp", "y_t^exp",
)
CO2_SYMBOLS = (
    "y_t^imp", "y_t,est^gb_imp", "phi_e", "phi_f", "f_ft",
    "y_t,est^gb_exp", "y_t,est^pb_exp", "eta_est", "y_t,g^exp",
)


def building_ids(spec: NeighborhoodSpec) -> tuple[str, ...]:
    return tuple(b.id for b in spec.building_types)


def iter_technologies(spec: NeighborhoodSpec, kinds: Iterable[str]) -> Iterable[TechnologySpec]:
    kinds = set(kinds)
    return (t for t in spec.technologies if t.kind in kinds)
