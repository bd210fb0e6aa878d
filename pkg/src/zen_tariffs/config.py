"""Scenario documents: one JSON file describing a neighbourhood, its input
series, the tariff and the build options.

Schema errors are reported as :class:`~zen_tariffs.errors.ConfigError` with
the JSON pointer of the offending value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import jsonschema

from .domain import KIND_CARRIER, LEVELS, NeighborhoodSpec, neighborhood_from_dict
from .errors import ConfigError
from .model import BuildOptions
from .tariffs import SCHEMES, TariffScheme, tariff_from_dict
from .timeseries import HOURS_PER_YEAR, TimeSeriesSet, load_series_csv

_NUM = {"type": "number"}
_NONNEG = {"type": "number", "minimum": 0}
_ID = {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"}
_NULLABLE_ID = {"anyOf": [{"type": "null"}, _ID]}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["neighborhood", "technologies", "series", "tariff"],
    "additionalProperties": False,
    "properties": {
        "neighborhood": {
            "type": "object",
            "required": ["building_types"],
            "additionalProperties": False,
            "properties": {
                "building_types": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["id", "electric_load", "heat_load"],
                        "additionalProperties": False,
                        "properties": {
                            "id": _ID,
                            "count": {"type": "integer", "minimum": 0},
                            "electric_load": {"type": "string"},
                            "heat_load": {"type": "string"},
                            "roof_area": {"anyOf": [{"type": "null"}, _NONNEG]},
                        },
                    },
                },
                "heating_grid_loss": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            },
        },
        "technologies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind", "level", "carrier", "discounted_investment_cost"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "kind": {"enum": sorted(KIND_CARRIER)},
                    "level": {"enum": list(LEVELS)},
                    "carrier": {"enum": sorted(set(KIND_CARRIER.values()))},
                    "discounted_investment_cost": _NUM,
                    "annual_maintenance_cost": _NUM,
                    "efficiency": _NUM,
                    "cop_profile": {"anyOf": [{"type": "null"}, {"type": "string"}]},
                    "fuel": _NULLABLE_ID,
                    "max_capacity": {"anyOf": [{"type": "null"}, _NONNEG]},
                    "min_capacity": _NONNEG,
                    "storage_power_ratio": {"anyOf": [{"type": "null"}, {"type": "number", "exclusiveMinimum": 0}]},
                    "electric_efficiency": {"anyOf": [{"type": "null"}, _NONNEG]},
                    "area_per_kw": {"anyOf": [{"type": "null"}, _NONNEG]},
                },
            },
        },
        "fuels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "price", "co2_factor"],
                "additionalProperties": False,
                "properties": {"id": _ID, "price": _NUM, "co2_factor": _NUM},
            },
        },
        "economics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "discount_rate": {"type": "number", "minimum": 0},
                "lifetime_years": {"type": "integer", "minimum": 1},
                "grid_tariff_flat": _NONNEG,
                "retailer_tariff": _NONNEG,
                "heating_grid_cost": _NONNEG,
                "heating_grid_enabled": {"type": "boolean"},
                "el_co2_factor": _NONNEG,
            },
        },
        "series": {
            "type": "object",
            "required": ["path", "manifest"],
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "horizon": {"type": "integer", "minimum": 1},
                "manifest": {
                    "type": "object",
                    "additionalProperties": {
                        "anyOf": [
                            {"type": "string"},
                            {
                                "type": "object",
                                "required": ["column", "unit"],
                                "additionalProperties": False,
                                "properties": {"column": {"type": "string"}, "unit": {"type": "string"}},
                            },
                        ]
                    },
                },
            },
        },
        "tariff": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": sorted(SCHEMES)}},
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "export_limit": {"anyOf": [{"type": "null"}, {"type": "number", "exclusiveMinimum": 0}]},
                "co2_constraint": {"type": "boolean"},
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def check_schema(doc) -> None:
    """Raise :class:`ConfigError` at the deepest schema violation (leftmost among equals)."""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if not errors:
        return
    # the most specific error wins: an enum failure on a leaf beats a parent complaint
    err = max(errors, key=lambda e: len(e.absolute_path))
    raise ConfigError(_pointer(err.absolute_path), err.message)


@dataclass(frozen=True)
class Scenario:
    spec: NeighborhoodSpec
    series: TimeSeriesSet
    scheme: TariffScheme
    options: BuildOptions
    source: Path | None = None
    document: Mapping | None = None


def scenario_from_dict(doc: Mapping, base_dir: Path | str = ".") -> Scenario:
    check_schema(doc)
    spec = neighborhood_from_dict(doc)
    scheme = tariff_from_dict(doc["tariff"])
    opts = doc.get("options", {})
    options = BuildOptions(export_limit=opts.get("export_limit"), co2_constraint=opts.get("co2_constraint", True))
    series = doc["series"]
    path = Path(base_dir) / series["path"]
    if not path.is_file():
        raise ConfigError("/series/path", f"series file {str(path)!r} not found")
    ts = load_series_csv(path, series["manifest"], series.get("horizon", HOURS_PER_YEAR))
    return Scenario(spec, ts, scheme, options, None, doc)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError("", f"config file {str(path)!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    sc = scenario_from_dict(doc, path.parent)
    return Scenario(sc.spec, sc.series, sc.scheme, sc.options, path, doc)
