"""Post-solve reporting: cost decomposition, DSO revenue, duration curves and
investment tables.  Reports are written as plot-ready CSV files."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .domain import NeighborhoodSpec, neighborhood_to_dict
from .errors import MismatchedScenarios
from .model import ModelInstance, hourly_values
from .tariffs import (
    Dynamic,
    ScarcityFlags,
    SubscribedCapacity,
    TariffScheme,
    fixed_annual_charge,
    tariff_cost_expost,
    tariff_to_dict,
)
from .timeseries import TimeSeriesSet

COST_COMPONENTS = ("investment", "maintenance", "fuel", "spot", "retailer", "tariff")


def duration_curve(net_imports: Sequence[float]) -> np.ndarray:
    """Non-increasing sort; equal values keep their hour order."""
    x = np.asarray(net_imports, dtype=float)
    return x[np.argsort(-x, kind="stable")]


def peak_import(imports: Sequence[float]) -> float:
    x = np.asarray(imports, dtype=float)
    return float(x.max()) if x.size else 0.0


def dso_revenue(imports, exports, scheme: TariffScheme, flags: ScarcityFlags | None, subscribed: float | None,
                discount: float) -> float:
    """Lifetime-discounted tariff income of the grid operator (annual cost times ``discount``)."""
    return discount * tariff_cost_expost(scheme, imports, exports, flags, subscribed)


def spec_fingerprint(spec: NeighborhoodSpec) -> str:
    doc = json.dumps(neighborhood_to_dict(spec), sort_keys=True, ensure_ascii=True, default=str)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


@dataclass
class SolutionReport:
    label: str
    scheme: str
    export_limit: float | None
    capacities: dict[str, float]
    instances: dict[str, tuple[str, str | None]]  # key -> (technology, building type)
    imports: np.ndarray
    exports: np.ndarray
    cost_breakdown: dict[str, float]
    constants: dict[str, float]
    objective_value: float
    dso_revenue_lifetime: float
    subscribed_capacity: float | None
    fingerprint: str
    co2_slack: float | None = None
    status: str = "optimal"
    extra: dict = field(default_factory=dict)

    @property
    def net_imports(self) -> np.ndarray:
        return self.imports - self.exports

    @property
    def duration_curve(self) -> np.ndarray:
        return duration_curve(self.net_imports)

    @property
    def peak_import(self) -> float:
        return peak_import(self.imports)

    @property
    def total_cost(self) -> float:
        return math.fsum(self.cost_breakdown.values()) + math.fsum(self.constants.values())

    def summary(self) -> dict:
        out = {
            "label": self.label,
            "scheme": self.scheme,
            "export_limit": self.export_limit,
            "status": self.status,
            "objective_value": self.objective_value,
            "total_cost": self.total_cost,
            "dso_revenue_lifetime": self.dso_revenue_lifetime,
            "peak_import": self.peak_import,
            "annual_import": math.fsum(self.imports),
            "annual_export": math.fsum(self.exports),
            "subscribed_capacity": self.subscribed_capacity,
            "co2_slack": self.co2_slack,
            "fingerprint": self.fingerprint,
        }
        out.update({f"cost_{k}": v for k, v in self.cost_breakdown.items()})
        out.update({f"constant_{k}": v for k, v in self.constants.items()})
        return out


def _weighted(model: ModelInstance, x: np.ndarray, symbol: str, coef: Mapping[str | None, float]) -> float:
    return math.fsum(coef.get(model.variables[i].tech, 0.0) * x[i] for i in model.indices(symbol))


def build_report(model: ModelInstance, values, spec: NeighborhoodSpec, ts: TimeSeriesSet, scheme: TariffScheme,
                 flags: ScarcityFlags | None = None, label: str | None = None) -> SolutionReport:
    """Decompose a solved model into costs, flows and capacities.

    ``values`` is a :class:`~zen_tariffs.solve.SolveResult`, a name->value
    mapping or a vector in model column order.
    """
    if hasattr(values, "vector"):
        x = values.vector(model)
    else:
        x = model.as_vector(values)
    eco = spec.economic
    eps = model.metadata["discount_factor"]
    w = model.metadata["annual_weight"]
    instances = dict(model.metadata["instances"])
    techs = {key: spec.technology(tid) for key, (tid, _) in instances.items()}

    capacities = {model.variables[i].tech: float(x[i]) for i in model.indices("x")}
    imports = hourly_values(model, x, "y_imp_tot")
    exports = hourly_values(model, x, "y_exp_tot")
    spot = np.asarray(ts["spot_price"], dtype=float)

    if flags is None and isinstance(scheme, Dynamic):
        hours = model.metadata.get("scarcity_hours") or ()
        mask = np.zeros(model.metadata["horizon"], dtype=bool)
        mask[list(hours)] = True
        flags = ScarcityFlags(mask, float("nan"))
    subscribed = None
    if isinstance(scheme, SubscribedCapacity):
        subscribed = float(x[model.index("c_sub")])

    fuel_price = {key: spec.fuel(t.fuel).price for key, t in techs.items() if t.fuel}
    annual_tariff = tariff_cost_expost(scheme, imports, exports, flags, subscribed)
    breakdown = {
        "investment": math.fsum(techs[k].discounted_investment_cost * v for k, v in capacities.items()),
        "maintenance": w * math.fsum(techs[k].annual_maintenance_cost * v for k, v in capacities.items()),
        "fuel": w * _weighted(model, x, "fuel", fuel_price),
        "spot": w * math.fsum(spot * (imports - exports)),
        "retailer": w * eco.retailer_tariff * math.fsum(imports),
        "tariff": w * (annual_tariff - fixed_annual_charge(scheme)),
    }
    co2_slack = None
    if any(c.family == "co2_balance" for c in model.constraints):
        co2_slack = float(model.slacks(x)[[c.family for c in model.constraints].index("co2_balance")])
    return SolutionReport(
        label=label or scheme.tag,
        scheme=scheme.tag,
        export_limit=model.metadata.get("export_limit"),
        capacities=capacities,
        instances=instances,
        imports=imports,
        exports=exports,
        cost_breakdown=breakdown,
        constants=dict(model.constants),
        objective_value=model.evaluate_objective(x),
        dso_revenue_lifetime=eps * annual_tariff,
        subscribed_capacity=subscribed,
        fingerprint=spec_fingerprint(spec),
        co2_slack=co2_slack,
        extra={"tariff": tariff_to_dict(scheme)},
    )


def investment_delta_table(reports: Sequence[SolutionReport], baseline: SolutionReport) -> list[dict]:
    """Per technology and building type: baseline capacity and each report's change from it."""
    for r in reports:
        if r.fingerprint != baseline.fingerprint:
            raise MismatchedScenarios(f"report {r.label!r} comes from a different neighbourhood than "
                                      f"baseline {baseline.label!r}")
    keys = list(baseline.instances)
    for r in reports:
        keys += [k for k in r.instances if k not in keys]
    rows = []
    for key in keys:
        tech, building = baseline.instances.get(key) or next(r.instances[key] for r in reports if key in r.instances)
        base = baseline.capacities.get(key, 0.0)
        row = {"technology": tech, "building": building or "plant", "baseline": base}
        for r in reports:
            row[r.label] = r.capacities.get(key, 0.0) - base
        rows.append(row)
    return rows


# --- CSV output ---------------------------------------------------------------

def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    return str(v)


def write_csv(path, header: Sequence[str], rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])
    return path


def write_report(report: SolutionReport, out_dir) -> Path:
    """Write capacities, hourly flows, duration curve and summary files into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cap_rows = []
    for key, value in report.capacities.items():
        tech, building = report.instances[key]
        cap_rows.append((tech, building or "plant", value))
    write_csv(out / "capacities.csv", ("technology", "building", "capacity"), cap_rows)
    net = report.net_imports
    write_csv(out / "hourly_flows.csv", ("hour", "import_kwh", "export_kwh", "net_import_kwh"),
              zip(range(len(net)), report.imports, report.exports, net))
    write_csv(out / "duration_curve.csv", ("rank", "net_import_kwh"), enumerate(report.duration_curve))
    summary = report.summary()
    write_csv(out / "summary.csv", ("key", "value"), summary.items())
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out
