"""Investment planning for zero-emission neighbourhoods under alternative grid tariffs."""

from .domain import BuildingType, EconomicParams, FuelSpec, NeighborhoodSpec, TechnologySpec, validate_neighborhood
from .model import BuildOptions, ModelInstance, build_model
from .tariffs import Dynamic, Energy, SubscribedCapacity, TimeOfUse, scarcity_flags, tariff_cost_expost
from .timeseries import TimeSeriesSet, load_series_csv

__version__ = "0.1.0"

__all__ = [
    "BuildOptions",
    "BuildingType",
    "Dynamic",
    "EconomicParams",
    "Energy",
    "FuelSpec",
    "ModelInstance",
    "NeighborhoodSpec",
    "SubscribedCapacity",
    "TechnologySpec",
    "TimeOfUse",
    "TimeSeriesSet",
    "build_model",
    "load_series_csv",
    "scarcity_flags",
    "tariff_cost_expost",
    "validate_neighborhood",
]
