"""Gravitational time-scales versus thermal coherence for massive mechanical superpositions."""

__version__ = "0.1.0"

from .catalog import CatalogEntry, RModel, builtin_catalog, characteristic_size, load_catalog, serialize_catalog
from .constants import constants
from .feasibility import (
    evaluate,
    inequality_margins,
    min_quality_factor,
    required_cat_size,
    sweep,
)
from .selfenergy import IntegrationConfig, delta_E, pair_energy

__all__ = [
    "CatalogEntry",
    "IntegrationConfig",
    "RModel",
    "builtin_catalog",
    "characteristic_size",
    "constants",
    "delta_E",
    "evaluate",
    "inequality_margins",
    "load_catalog",
    "min_quality_factor",
    "pair_energy",
    "required_cat_size",
    "serialize_catalog",
    "sweep",
]
