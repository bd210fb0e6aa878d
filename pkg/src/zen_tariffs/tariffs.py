"""Grid-tariff designs.

Each scheme supports two uses: pricing metered hourly flows after the fact
(:func:`tariff_cost_expost`) and contributing linear objective terms plus
auxiliary variables to a model under construction (:func:`tariff_linear_terms`).
Coefficients are EUR/kWh, EUR/kW/yr and EUR/yr; defaults are the Norwegian
case values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import ConfigError, MissingVariable, NegativeSubscription

LOW, MED, PEAK = "low", "med", "peak"

DEFAULT_PEAK_HOURS = frozenset({7, 8, 9, 18, 19, 20})
DEFAULT_LOW_HOURS = frozenset({23, 0, 1, 2, 3, 4})


def _nonneg(obj, *names):
    for name in names:
        if getattr(obj, name) < 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be >= 0")


@dataclass(frozen=True)
class Energy:
    fixed_annual: float = 137.0
    energy_price: float = 0.0225
    tag = "energy"

    def __post_init__(self):
        _nonneg(self, "fixed_annual", "energy_price")


@dataclass(frozen=True)
class TimeOfUse:
    low: float = 0.0123
    med: float = 0.0246
    peak: float = 0.0492
    peak_hours: frozenset = DEFAULT_PEAK_HOURS
    low_hours: frozenset = DEFAULT_LOW_HOURS
    tag = "tou"

    def __post_init__(self):
        _nonneg(self, "low", "med", "peak")
        object.__setattr__(self, "peak_hours", frozenset(self.peak_hours))
        object.__setattr__(self, "low_hours", frozenset(self.low_hours))
        if self.peak_hours & self.low_hours:
            raise ValueError("peak_hours and low_hours overlap")
        if not all(0 <= h < 24 for h in self.peak_hours | self.low_hours):
            raise ValueError("band hours must lie in 0..23")

    def band(self, hour: int) -> str:
        return tou_band(hour, self.peak_hours, self.low_hours)

    def price(self, hour: int) -> float:
        return {LOW: self.low, MED: self.med, PEAK: self.peak}[self.band(hour)]


@dataclass(frozen=True)
class SubscribedCapacity:
    capacity_price: float = 108.0
    below_price: float = 0.005
    above_price: float = 0.1
    tag = "subscribed_capacity"

    def __post_init__(self):
        _nonneg(self, "capacity_price", "below_price", "above_price")
        if not self.above_price > self.below_price:
            raise ValueError("above_price must exceed below_price")


@dataclass(frozen=True)
class Dynamic:
    base_price: float = 0.0225
    scarcity_price: float = 0.1
    export_bonus: float = 0.1
    scarcity_fraction: float = 0.05
    tag = "dynamic"

    def __post_init__(self):
        _nonneg(self, "base_price", "scarcity_price", "export_bonus")
        if not 0 < self.scarcity_fraction < 1:
            raise ValueError("scarcity_fraction must lie in (0, 1)")


TariffScheme = Union[Energy, TimeOfUse, SubscribedCapacity, Dynamic]
SCHEMES: dict[str, type] = {cls.tag: cls for cls in (Energy, TimeOfUse, SubscribedCapacity, Dynamic)}


def tariff_from_dict(doc: Mapping) -> TariffScheme:
    """``{"type": tag, ...coefficient overrides}`` -> scheme instance."""
    tag = doc.get("type")
    if tag not in SCHEMES:
        raise ConfigError("/tariff/type", f"unknown tariff {tag!r}; expected one of {sorted(SCHEMES)}")
    params = {k: v for k, v in doc.items() if k != "type"}
    try:
        return SCHEMES[tag](**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError("/tariff", str(exc)) from exc


def tariff_to_dict(scheme: TariffScheme) -> dict:
    out = {"type": scheme.tag}
    for name in scheme.__dataclass_fields__:
        value = getattr(scheme, name)
        out[name] = sorted(value) if isinstance(value, frozenset) else value
    return out


@dataclass(frozen=True)
class ScarcityFlags:
    flags: np.ndarray = field(repr=False)
    threshold: float

    @property
    def count(self) -> int:
        return int(self.flags.sum())

    @classmethod
    def none(cls, horizon: int) -> "ScarcityFlags":
        flags = np.zeros(horizon, dtype=bool)
        flags.setflags(write=False)
        return cls(flags, math.inf)


def scarcity_flags(regional_load, fraction: float = 0.05) -> ScarcityFlags:
    """Flag the ``ceil(fraction * T)`` highest-load hours; ties go to the earlier hour."""
    load = np.asarray(regional_load, dtype=float)
    if load.ndim != 1 or len(load) < 1:
        raise ValueError("regional load must be a non-empty 1-d series")
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    k = math.ceil(round(fraction * len(load), 9))
    order = np.lexsort((np.arange(len(load)), -load))
    picked = order[:k]
    flags = np.zeros(len(load), dtype=bool)
    flags[picked] = True
    flags.setflags(write=False)
    return ScarcityFlags(flags, float(load[picked].min()))


def tou_band(hour_of_day: int, peak_hours=DEFAULT_PEAK_HOURS, low_hours=DEFAULT_LOW_HOURS) -> str:
    if not 0 <= hour_of_day < 24:
        raise ValueError(f"hour of day {hour_of_day} outside 0..23")
    if hour_of_day in peak_hours:
        return PEAK
    if hour_of_day in low_hours:
        return LOW
    return MED


def hourly_import_prices(scheme: TariffScheme, horizon: int, flags: ScarcityFlags | None = None) -> np.ndarray:
    """Per-hour EUR/kWh charged on metered import (not meaningful for SubscribedCapacity)."""
    if isinstance(scheme, Energy):
        return np.full(horizon, scheme.energy_price)
    if isinstance(scheme, TimeOfUse):
        return np.array([scheme.price(t % 24) for t in range(horizon)])
    if isinstance(scheme, Dynamic):
        delta = _flags(flags, horizon)
        return np.where(delta, scheme.scarcity_price, scheme.base_price)
    raise TypeError("subscribed capacity has no single hourly import price")


def _flags(flags: ScarcityFlags | None, horizon: int) -> np.ndarray:
    if flags is None:
        raise ValueError("dynamic tariff needs scarcity flags")
    if len(flags.flags) != horizon:
        raise ValueError("scarcity flags do not match the flow horizon")
    return flags.flags


def subscription_split(imports, subscribed: float) -> tuple[np.ndarray, np.ndarray]:
    imports = np.asarray(imports, dtype=float)
    below = np.minimum(imports, subscribed)
    return below, imports - below


def tariff_cost_expost(scheme: TariffScheme, imports, exports=None, flags: ScarcityFlags | None = None,
                       subscribed: float | None = None) -> float:
    """Annual grid-tariff cost (EUR/yr) of metered hourly flows.

    Includes fixed charges.  For the dynamic scheme the export bonus is
    subtracted, so the result can be negative.
    """
    imports = np.asarray(imports, dtype=float)
    exports = np.zeros_like(imports) if exports is None else np.asarray(exports, dtype=float)
    if imports.shape != exports.shape:
        raise ValueError("import and export series differ in length")
    T = len(imports)

    if isinstance(scheme, Energy):
        return scheme.fixed_annual + scheme.energy_price * math.fsum(imports)
    if isinstance(scheme, TimeOfUse):
        return math.fsum(hourly_import_prices(scheme, T) * imports)
    if isinstance(scheme, SubscribedCapacity):
        if subscribed is None:
            raise NegativeSubscription("subscribed capacity tariff needs a subscribed capacity")
        if subscribed < 0:
            raise NegativeSubscription(f"subscribed capacity {subscribed} is negative")
        below, above = subscription_split(imports, subscribed)
        return (scheme.capacity_price * subscribed
                + math.fsum(scheme.below_price * below) + math.fsum(scheme.above_price * above))
    if isinstance(scheme, Dynamic):
        delta = _flags(flags, T)
        prices = np.where(delta, scheme.scarcity_price, scheme.base_price)
        return math.fsum(prices * imports) - math.fsum(scheme.export_bonus * exports[delta])
    raise TypeError(f"unknown tariff scheme {scheme!r}")


def fixed_annual_charge(scheme: TariffScheme) -> float:
    """Decision-independent yearly charge, kept out of the objective."""
    return scheme.fixed_annual if isinstance(scheme, Energy) else 0.0


@dataclass
class TariffTerms:
    """What :func:`tariff_linear_terms` added to a builder."""

    variables: list[str] = field(default_factory=list)
    constraints: list[str] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    annual_constant: float = 0.0


def tariff_linear_terms(scheme: TariffScheme, builder, flags: ScarcityFlags | None = None) -> TariffTerms:
    """Add the scheme's linear cost terms to ``builder``.

    Expects the per-hour metered totals ``y_imp_tot[t]`` and ``y_exp_tot[t]``.
    Every coefficient is weighted by ``builder.annual_weight`` (1/eps for a
    full model).  The energy scheme's fixed charge is returned as
    ``annual_constant`` instead of entering the objective.
    """
    T = builder.horizon
    for sym in ("y_imp_tot", "y_exp_tot"):
        if not builder.has_symbol(sym):
            raise MissingVariable(f"model has no {sym} variables")
    w = builder.annual_weight
    imp = [builder.var("y_imp_tot", t=t) for t in range(T)]
    exp = [builder.var("y_exp_tot", t=t) for t in range(T)]
    terms = TariffTerms(annual_constant=fixed_annual_charge(scheme))

    def cost(idx: int, coef: float):
        if coef != 0.0:
            builder.add_objective(idx, w * coef)
            name = builder.var_name(idx)
            terms.objective[name] = terms.objective.get(name, 0.0) + w * coef

    if isinstance(scheme, (Energy, TimeOfUse)):
        prices = hourly_import_prices(scheme, T)
        for t in range(T):
            cost(imp[t], float(prices[t]))
    elif isinstance(scheme, Dynamic):
        delta = _flags(flags, T)
        for t in range(T):
            cost(imp[t], scheme.scarcity_price if delta[t] else scheme.base_price)
            if delta[t]:
                cost(exp[t], -scheme.export_bonus)
    elif isinstance(scheme, SubscribedCapacity):
        c_sub = builder.add_variable("c_sub", unit="kW")
        terms.variables.append(builder.var_name(c_sub))
        cost(c_sub, scheme.capacity_price)
        for t in range(T):
            below = builder.add_variable("imp_below", t=t, unit="kWh")
            above = builder.add_variable("imp_above", t=t, unit="kWh")
            terms.variables += [builder.var_name(below), builder.var_name(above)]
            cost(below, scheme.below_price)
            cost(above, scheme.above_price)
            terms.constraints.append(builder.add_constraint(
                "sub_split", [(below, 1.0), (above, 1.0), (imp[t], -1.0)], "=", 0.0, t=t, unit="kWh"))
            terms.constraints.append(builder.add_constraint(
                "sub_below_cap", [(below, 1.0), (c_sub, -1.0)], "<=", 0.0, t=t, unit="kWh"))
    else:
        raise TypeError(f"unknown tariff scheme {scheme!r}")
    return terms
