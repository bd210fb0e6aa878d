"""Investment-and-operation model of a neighbourhood energy system.

The model is an explicit sparse LP/MILP: :class:`ModelBuilder` collects named
variables and rows, :meth:`ModelBuilder.finalize` freezes them into a
:class:`ModelInstance` whose ordering is canonical (by symbol, technology,
hour), so two builds of the same scenario are identical.

Variable names follow ``sym[tech][t]``; hour-only and tech-only variables drop
the missing part.  Capacities ``x`` are in kW (kWh for storages); every
hourly flow is in kWh.

Physical layout
---------------
* One electricity balance per hour for the whole neighbourhood (one grid
  connection).  Building-level technologies are sized per building type but
  share this balance.
* One heat balance per building type and hour, fed by that type's own
  technologies, its heat storage and the heating grid (with losses).  The
  central plant balance sums the heating-grid deliveries.
* Batteries carry four kinds of flow: charge from the grid (``gb_imp``),
  charge from on-site production (``bat_ch``), discharge to local load
  (``bat_dis``) and discharge to the grid, split into grid-sourced
  (``gb_exp``) and production-sourced (``pb_exp``) energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .domain import (
    SOLAR_KINDS,
    SYMBOL_TABLE,
    NeighborhoodSpec,
    TechnologySpec,
    ValidatedSpec,
    validate_neighborhood,
)
from .errors import MissingVariable
from .tariffs import Energy, ScarcityFlags, TariffScheme, scarcity_flags, tariff_linear_terms
from .timeseries import TimeSeriesSet

SENSES = ("<=", "=", ">=")
HEAT_PRODUCERS = ("solar_thermal", "heat_pump", "electric_boiler", "boiler", "chp")


@dataclass(frozen=True, slots=True)
class Variable:
    name: str
    lb: float
    ub: float
    kind: str
    unit: str
    symbol: str
    tech: str | None
    t: int | None


@dataclass(frozen=True, slots=True)
class Constraint:
    name: str
    terms: tuple  # ((var index, coefficient), ...)
    sense: str
    rhs: float
    unit: str
    family: str
    tech: str | None
    t: int | None


def format_name(symbol: str, tech: str | None = None, t: int | None = None) -> str:
    name = symbol
    if tech is not None:
        name += f"[{tech}]"
    if t is not None:
        name += f"[{t}]"
    return name


def _order_key(symbol: str, tech: str | None, t: int | None):
    return (symbol, tech or "", -1 if t is None else t)


@dataclass(frozen=True)
class ModelInstance:
    """Immutable sparse model with canonical ordering."""

    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[int, float], ...]
    sense: str = "min"
    constants: Mapping[str, float] = field(default_factory=dict)
    registry: Mapping[str, str] = field(default_factory=dict)
    metadata: Mapping[str, object] = field(default_factory=dict)
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        object.__setattr__(self, "registry", MappingProxyType(dict(self.registry)))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))
        object.__setattr__(self, "_index", {v.name: i for i, v in enumerate(self.variables)})

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    @property
    def has_binaries(self) -> bool:
        return any(v.kind == "binary" for v in self.variables)

    @property
    def constant_total(self) -> float:
        return math.fsum(self.constants.values())

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MissingVariable(name) from None

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def constraint(self, name: str) -> Constraint:
        for row in self.constraints:
            if row.name == name:
                return row
        raise KeyError(name)

    def indices(self, symbol: str, tech: str | None = None) -> list[int]:
        """Indices of all variables of ``symbol`` (optionally one tech), in hour order."""
        return [i for i, v in enumerate(self.variables) if v.symbol == symbol and (tech is None or v.tech == tech)]

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        for i, coef in self.objective:
            c[i] += coef
        return c

    def matrix(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for r, con in enumerate(self.constraints):
            for j, a in con.terms:
                rows.append(r)
                cols.append(j)
                vals.append(a)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_rows, self.n_vars))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([v.lb for v in self.variables]), np.array([v.ub for v in self.variables]))

    def row_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.n_rows, -np.inf)
        hi = np.full(self.n_rows, np.inf)
        for r, con in enumerate(self.constraints):
            if con.sense in ("<=", "="):
                hi[r] = con.rhs
            if con.sense in (">=", "="):
                lo[r] = con.rhs
        return lo, hi

    def as_vector(self, values: Mapping[str, float] | np.ndarray) -> np.ndarray:
        if isinstance(values, np.ndarray):
            return values
        x = np.zeros(self.n_vars)
        for name, val in values.items():
            x[self.index(name)] = val
        return x

    def evaluate_objective(self, values) -> float:
        """Objective value (without reported constants)."""
        x = self.as_vector(values)
        return math.fsum(coef * x[i] for i, coef in self.objective)

    def slacks(self, values) -> np.ndarray:
        """Signed slack per row; negative means violated."""
        x = self.as_vector(values)
        act = self.matrix() @ x
        lo, hi = self.row_bounds()
        return np.minimum(act - lo, hi - act)

    def max_violation(self, values) -> float:
        x = self.as_vector(values)
        lb, ub = self.bounds()
        worst = 0.0
        if self.n_rows:
            worst = max(worst, float(-self.slacks(x).min()))
        if self.n_vars:
            worst = max(worst, float(np.max(lb - x)), float(np.max(x - ub)))
        return max(worst, 0.0)


class ModelBuilder:
    """Single-writer accumulator of variables, rows and objective coefficients."""

    def __init__(self, horizon: int, annual_weight: float = 1.0):
        self.horizon = horizon
        self.annual_weight = annual_weight
        self._vars: list[Variable] = []
        self._lookup: dict[tuple, int] = {}
        self._symbols: set[str] = set()
        self._rows: list[Constraint] = []
        self._row_names: set[str] = set()
        self._objective: dict[int, float] = {}
        self.constants: dict[str, float] = {}
        self.metadata: dict[str, object] = {}

    # -- variables ---------------------------------------------------------
    def add_variable(self, symbol: str, tech: str | None = None, t: int | None = None, lb: float = 0.0,
                     ub: float = math.inf, kind: str = "continuous", unit: str = "kWh") -> int:
        key = (symbol, tech, t)
        if key in self._lookup:
            raise ValueError(f"variable {format_name(*key)} already exists")
        if kind == "binary":
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        self._vars.append(Variable(format_name(*key), float(lb), float(ub), kind, unit, symbol, tech, t))
        self._lookup[key] = len(self._vars) - 1
        self._symbols.add(symbol)
        return len(self._vars) - 1

    def var(self, symbol: str, tech: str | None = None, t: int | None = None) -> int:
        try:
            return self._lookup[(symbol, tech, t)]
        except KeyError:
            raise MissingVariable(format_name(symbol, tech, t)) from None

    def has_var(self, symbol: str, tech: str | None = None, t: int | None = None) -> bool:
        return (symbol, tech, t) in self._lookup

    def has_symbol(self, symbol: str) -> bool:
        return symbol in self._symbols

    def var_name(self, idx: int) -> str:
        return self._vars[idx].name

    def set_upper(self, idx: int, ub: float) -> None:
        v = self._vars[idx]
        self._vars[idx] = Variable(v.name, v.lb, float(ub), v.kind, v.unit, v.symbol, v.tech, v.t)

    @property
    def n_vars(self) -> int:
        return len(self._vars)

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    # -- rows / objective --------------------------------------------------
    def add_constraint(self, family: str, terms: Iterable[tuple[int, float]], sense: str, rhs: float,
                       tech: str | None = None, t: int | None = None, unit: str = "kWh") -> str:
        if sense not in SENSES:
            raise ValueError(f"bad sense {sense!r}")
        merged: dict[int, float] = {}
        for j, a in terms:
            merged[j] = merged.get(j, 0.0) + float(a)
        name = format_name(family, tech, t)
        if name in self._row_names:
            raise ValueError(f"constraint {name} already exists")
        self._row_names.add(name)
        packed = tuple((j, a) for j, a in merged.items() if a != 0.0)
        self._rows.append(Constraint(name, packed, sense, float(rhs), unit, family, tech, t))
        return name

    def add_objective(self, idx: int, coef: float) -> None:
        self._objective[idx] = self._objective.get(idx, 0.0) + float(coef)

    # -- freeze ------------------------------------------------------------
    def finalize(self, registry: Mapping[str, str] | None = None, sense: str = "min") -> ModelInstance:
        order = sorted(range(len(self._vars)), key=lambda i: _order_key(self._vars[i].symbol, self._vars[i].tech, self._vars[i].t))
        remap = np.empty(len(order), dtype=int)
        remap[order] = np.arange(len(order))
        variables = tuple(self._vars[i] for i in order)
        rows = sorted(self._rows, key=lambda r: _order_key(r.family, r.tech, r.t))
        constraints = tuple(
            Constraint(r.name, tuple(sorted((int(remap[j]), a) for j, a in r.terms)), r.sense, r.rhs, r.unit,
                       r.family, r.tech, r.t)
            for r in rows
        )
        objective = tuple(sorted((int(remap[j]), c) for j, c in self._objective.items() if c != 0.0))
        return ModelInstance(variables, constraints, objective, sense, dict(self.constants),
                             dict(registry or {}), dict(self.metadata))


# --- neighbourhood model -----------------------------------------------------

@dataclass(frozen=True)
class TechInstance:
    """One sized unit: a building-level technology at one building type, or a plant technology."""

    key: str
    tech: TechnologySpec
    building: str | None

    @property
    def kind(self) -> str:
        return self.tech.kind


@dataclass(frozen=True)
class BuildOptions:
    export_limit: float | None = None  # kWh/h at the grid connection
    co2_constraint: bool = True


def technology_instances(spec: NeighborhoodSpec) -> list[TechInstance]:
    out = []
    hg = spec.economic.heating_grid_enabled
    for tech in spec.technologies:
        if tech.level == "building":
            out.extend(TechInstance(f"{tech.id}.{b.id}", tech, b.id) for b in spec.building_types)
        elif tech.carrier in ("heat", "heat_storage") and not hg:
            # central heat needs the heating grid
            continue
        else:
            out.append(TechInstance(tech.id, tech, None))
    return out


class NeighborhoodBuilder(ModelBuilder):
    """:class:`ModelBuilder` that also knows the scenario it encodes."""

    def __init__(self, spec: ValidatedSpec, ts: TimeSeriesSet):
        eps = spec.economic.discount_factor
        super().__init__(ts.horizon, annual_weight=1.0 / eps)
        self.spec = spec
        self.ts = ts
        self.eps = eps
        self.instances = technology_instances(spec)
        self.heating_grid = spec.economic.heating_grid_enabled
        self.metadata.update(
            horizon=ts.horizon,
            discount_factor=eps,
            annual_weight=self.annual_weight,
            instances={i.key: (i.tech.id, i.building) for i in self.instances},
        )

    def of_kind(self, *kinds: str) -> list[TechInstance]:
        return [i for i in self.instances if i.kind in kinds]

    def at(self, building: str | None, *kinds: str) -> list[TechInstance]:
        return [i for i in self.instances if i.building == building and i.kind in kinds]

    def solar_availability(self, inst: TechInstance) -> np.ndarray:
        return self.ts["insolation"] * inst.tech.efficiency

    def cop(self, inst: TechInstance) -> np.ndarray:
        return self.ts[inst.tech.cop_profile]

    # linear expressions as lists of (index, coefficient)
    def heat_output(self, inst: TechInstance, t: int) -> list[tuple[int, float]]:
        k, tech = inst.kind, inst.tech
        if k == "solar_thermal":
            return [(self.var("st_heat", inst.key, t), 1.0)]
        if k == "heat_pump":
            return [(self.var("el_in", inst.key, t), float(self.cop(inst)[t]))]
        if k == "electric_boiler":
            return [(self.var("el_in", inst.key, t), tech.efficiency)]
        if k in ("boiler", "chp"):
            return [(self.var("fuel", inst.key, t), tech.efficiency)]
        raise ValueError(f"{inst.key} produces no heat")

    def electric_generation(self, t: int) -> list[tuple[int, float]]:
        terms = [(self.var("pv_gen", i.key, t), 1.0) for i in self.of_kind("pv")]
        terms += [(self.var("fuel", i.key, t), i.tech.electric_efficiency) for i in self.of_kind("chp")]
        return terms


def _add_technology_variables(b: NeighborhoodBuilder) -> None:
    T = b.horizon
    for inst in b.instances:
        tech = inst.tech
        cap_unit = "kWh" if inst.kind in ("battery", "heat_storage") else "kW"
        x = b.add_variable("x", inst.key, lb=tech.min_capacity, ub=tech.max_capacity, unit=cap_unit)
        k = inst.kind
        if k in SOLAR_KINDS:
            sym = "pv_gen" if k == "pv" else "st_heat"
            avail = b.solar_availability(inst)
            for t in range(T):
                if avail[t] <= 0:
                    b.add_variable(sym, inst.key, t, ub=0.0)
                    continue
                g = b.add_variable(sym, inst.key, t)
                b.add_constraint(f"{sym}_avail", [(g, 1.0), (x, -float(avail[t]))], "<=", 0.0, inst.key, t)
        elif k in ("heat_pump", "electric_boiler", "boiler", "chp"):
            sym = "fuel" if k in ("boiler", "chp") else "el_in"
            for t in range(T):
                v = b.add_variable(sym, inst.key, t)
                (j, a), = b.heat_output(inst, t)
                b.add_constraint("heat_cap", [(j, a), (x, -1.0)], "<=", 0.0, inst.key, t)
        elif k == "battery":
            for t in range(T):
                for sym in ("soc", "gb_imp", "bat_ch", "bat_dis", "gb_exp", "pb_exp"):
                    b.add_variable(sym, inst.key, t)
        elif k == "heat_storage":
            for t in range(T):
                for sym in ("soc", "hs_ch", "hs_dis"):
                    b.add_variable(sym, inst.key, t)


def _add_grid_variables(b: NeighborhoodBuilder) -> None:
    has_gen = bool(b.of_kind("pv", "chp"))
    for t in range(b.horizon):
        b.add_variable("y_imp", t=t)
        b.add_variable("y_gexp", t=t, ub=math.inf if has_gen else 0.0)
        b.add_variable("y_imp_tot", t=t)
        b.add_variable("y_exp_tot", t=t)
    if b.heating_grid:
        for bt in b.spec.building_types:
            for t in range(b.horizon):
                b.add_variable("hg", bt.id, t)


def add_electricity_balance(b: NeighborhoodBuilder, t: int) -> list[str]:
    """Neighbourhood electricity balance and metered totals for hour ``t``."""
    load = math.fsum(float(b.ts[bt.electric_load][t]) for bt in b.spec.building_types)
    gen = b.electric_generation(t)
    bats = b.of_kind("battery")
    terms = list(gen)
    terms.append((b.var("y_imp", t=t), 1.0))
    terms += [(b.var("bat_dis", i.key, t), 1.0) for i in bats]
    terms += [(b.var("el_in", i.key, t), -1.0) for i in b.of_kind("heat_pump", "electric_boiler")]
    terms += [(b.var("bat_ch", i.key, t), -1.0) for i in bats]
    terms.append((b.var("y_gexp", t=t), -1.0))
    names = [b.add_constraint("el_bal", terms, "=", load, t=t)]
    if gen:
        # direct exports come from on-site generation only
        names.append(b.add_constraint("gexp_cap", [(b.var("y_gexp", t=t), 1.0)] + [(j, -a) for j, a in gen],
                                      "<=", 0.0, t=t))
    imp = [(b.var("y_imp_tot", t=t), 1.0), (b.var("y_imp", t=t), -1.0)]
    imp += [(b.var("gb_imp", i.key, t), -1.0) for i in bats]
    names.append(b.add_constraint("imp_tot", imp, "=", 0.0, t=t))
    exp = [(b.var("y_exp_tot", t=t), 1.0), (b.var("y_gexp", t=t), -1.0)]
    for i in bats:
        exp += [(b.var("gb_exp", i.key, t), -1.0), (b.var("pb_exp", i.key, t), -1.0)]
    names.append(b.add_constraint("exp_tot", exp, "=", 0.0, t=t))
    return names


def add_heat_balance(b: NeighborhoodBuilder, building: str | None, t: int) -> str:
    """Heat balance of one building type (``building``) or of the central plant (``None``)."""
    terms = []
    for inst in b.at(building, *HEAT_PRODUCERS):
        terms += b.heat_output(inst, t)
    for inst in b.at(building, "heat_storage"):
        terms += [(b.var("hs_dis", inst.key, t), 1.0), (b.var("hs_ch", inst.key, t), -1.0)]
    if building is None:
        terms += [(b.var("hg", bt.id, t), -1.0) for bt in b.spec.building_types]
        return b.add_constraint("plant_bal", terms, "=", 0.0, t=t)
    if b.heating_grid:
        terms.append((b.var("hg", building, t), 1.0 - b.spec.heating_grid_loss))
    bt = next(x for x in b.spec.building_types if x.id == building)
    return b.add_constraint("heat_bal", terms, "=", float(b.ts[bt.heat_load][t]), building, t)


def add_storage_dynamics(b: NeighborhoodBuilder, inst: TechInstance, t: int) -> list[str]:
    """State-of-charge recursion (cyclic over the horizon) and energy/power limits."""
    T = b.horizon
    eta = inst.tech.efficiency
    ratio = inst.tech.storage_power_ratio or 1.0
    x = b.var("x", inst.key)
    if inst.kind == "battery":
        charge = [b.var("gb_imp", inst.key, t), b.var("bat_ch", inst.key, t)]
        discharge = [b.var(s, inst.key, t) for s in ("bat_dis", "gb_exp", "pb_exp")]
    else:
        charge = [b.var("hs_ch", inst.key, t)]
        discharge = [b.var("hs_dis", inst.key, t)]
    soc, soc_next = b.var("soc", inst.key, t), b.var("soc", inst.key, (t + 1) % T)
    if T == 1:
        dyn = [(j, eta) for j in charge] + [(j, -1.0) for j in discharge]
    else:
        dyn = [(soc_next, 1.0), (soc, -1.0)] + [(j, -eta) for j in charge] + [(j, 1.0) for j in discharge]
    return [
        b.add_constraint("soc_dyn", dyn, "=", 0.0, inst.key, t),
        b.add_constraint("soc_cap", [(soc, 1.0), (x, -1.0)], "<=", 0.0, inst.key, t),
        b.add_constraint("charge_cap", [(j, 1.0) for j in charge] + [(x, -ratio)], "<=", 0.0, inst.key, t),
        b.add_constraint("discharge_cap", [(j, 1.0) for j in discharge] + [(x, -ratio)], "<=", 0.0, inst.key, t),
    ]


def _add_battery_accounting(b: NeighborhoodBuilder, inst: TechInstance) -> str:
    # grid-sourced exports cannot exceed what was charged from the grid (net of losses)
    eta = inst.tech.efficiency
    terms = [(b.var("gb_exp", inst.key, t), 1.0) for t in range(b.horizon)]
    terms += [(b.var("gb_imp", inst.key, t), -eta) for t in range(b.horizon)]
    return b.add_constraint("gb_exp_acct", terms, "<=", 0.0, inst.key)


def _add_roof_limits(b: NeighborhoodBuilder) -> list[str]:
    names = []
    for bt in b.spec.building_types:
        terms = [(b.var("x", i.key), i.tech.area_per_kw) for i in b.at(bt.id, *SOLAR_KINDS) if i.tech.area_per_kw]
        if terms:
            names.append(b.add_constraint("roof", terms, "<=", bt.roof_area, bt.id, unit="m2"))
    return names


def add_co2_balance(b: NeighborhoodBuilder) -> str:
    """Annual emissions of imports and fuels must not exceed credited exports (gCO2)."""
    phi_e = b.spec.economic.el_co2_factor
    terms = []
    for t in range(b.horizon):
        terms.append((b.var("y_imp_tot", t=t), phi_e))
        terms.append((b.var("y_gexp", t=t), -phi_e))
    for inst in b.of_kind("battery"):
        for t in range(b.horizon):
            terms.append((b.var("gb_exp", inst.key, t), -phi_e * inst.tech.efficiency))
            terms.append((b.var("pb_exp", inst.key, t), -phi_e * inst.tech.efficiency))
    for inst in b.of_kind("boiler", "chp"):
        phi_f = b.spec.fuel(inst.tech.fuel).co2_factor
        terms += [(b.var("fuel", inst.key, t), phi_f) for t in range(b.horizon)]
    return b.add_constraint("co2_balance", terms, "<=", 0.0, unit="gCO2")


def add_export_limit(b: ModelBuilder, limit: float) -> list[str]:
    if not limit > 0:
        raise ValueError("export limit must be positive")
    return [b.add_constraint("export_limit", [(b.var("y_exp_tot", t=t), 1.0)], "<=", limit, t=t)
            for t in range(b.horizon)]


def assemble_objective(b: NeighborhoodBuilder, scheme: TariffScheme, flags: ScarcityFlags | None = None):
    """Investment + (1/eps) x annual operation; tariff terms via the scheme."""
    eco = b.spec.economic
    w = b.annual_weight
    for inst in b.instances:
        tech = inst.tech
        b.add_objective(b.var("x", inst.key), tech.discounted_investment_cost + w * tech.annual_maintenance_cost)
    for inst in b.of_kind("boiler", "chp"):
        price = b.spec.fuel(inst.tech.fuel).price
        for t in range(b.horizon):
            b.add_objective(b.var("fuel", inst.key, t), w * price)
    spot = b.ts["spot_price"]
    for t in range(b.horizon):
        b.add_objective(b.var("y_imp_tot", t=t), w * (float(spot[t]) + eco.retailer_tariff))
        b.add_objective(b.var("y_exp_tot", t=t), -w * float(spot[t]))
    terms = tariff_linear_terms(scheme, b, flags)
    if terms.annual_constant:
        b.constants["tariff_fixed"] = w * terms.annual_constant
    if eco.heating_grid_enabled and eco.heating_grid_cost:
        b.constants["heating_grid"] = eco.heating_grid_cost
    return terms


def build_model(spec: NeighborhoodSpec, ts: TimeSeriesSet, scheme: TariffScheme | None = None,
                options: BuildOptions | None = None, flags: ScarcityFlags | None = None) -> ModelInstance:
    """Assemble the full model for one tariff / export-limit cell.

    ``flags`` defaults to the top-load hours of ``regional_load`` when the
    scheme needs them.
    """
    options = options or BuildOptions()
    if not isinstance(spec, ValidatedSpec) or spec.horizon != ts.horizon:
        spec = validate_neighborhood(spec, ts, horizon=ts.horizon)
    if scheme is None:
        scheme = Energy(energy_price=spec.economic.grid_tariff_flat)
    if flags is None and hasattr(scheme, "scarcity_fraction"):
        flags = scarcity_flags(ts["regional_load"], scheme.scarcity_fraction)

    b = NeighborhoodBuilder(spec, ts)
    _add_technology_variables(b)
    _add_grid_variables(b)
    for t in range(b.horizon):
        add_electricity_balance(b, t)
        for bt in spec.building_types:
            add_heat_balance(b, bt.id, t)
        if b.heating_grid:
            add_heat_balance(b, None, t)
        for inst in b.of_kind("battery", "heat_storage"):
            add_storage_dynamics(b, inst, t)
    for inst in b.of_kind("battery"):
        _add_battery_accounting(b, inst)
    _add_roof_limits(b)
    if options.co2_constraint:
        add_co2_balance(b)
    if options.export_limit is not None:
        add_export_limit(b, options.export_limit)
    assemble_objective(b, scheme, flags)
    b.metadata.update(
        scheme=scheme.tag,
        export_limit=options.export_limit,
        co2_constraint=options.co2_constraint,
        scarcity_hours=None if flags is None else tuple(int(i) for i in np.flatnonzero(flags.flags)),
    )
    registry = {
        sym: format_name(loc[4:], "{tech}" if loc[4:] in _TECH_SYMBOLS else None,
                         None if loc[4:] in _STATIC_SYMBOLS else "{t}")
        for sym, loc in SYMBOL_TABLE.items()
        if loc.startswith("var:") and b.has_symbol(loc[4:])
    }
    return b.finalize(registry)


_TECH_SYMBOLS = {"x", "fuel", "gb_imp", "gb_exp", "pb_exp"}
_STATIC_SYMBOLS = {"x", "c_sub"}


def hourly_values(model: ModelInstance, values: Sequence[float] | np.ndarray, symbol: str,
                  tech: str | None = None) -> np.ndarray:
    """Hour-ordered values of one symbol (summed over technologies when ``tech`` is None)."""
    x = np.asarray(values, dtype=float)
    out = np.zeros(model.metadata["horizon"])
    for i in model.indices(symbol, tech):
        v = model.variables[i]
        if v.t is not None:
            out[v.t] += x[i]
    return out
