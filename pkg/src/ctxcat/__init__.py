"""Contextual labelling of image regions.

Appearance-based fuzzy labels are refined by minimising an energy that
combines concept priors, co-occurrence and fuzzy spatial relations between
every pair of regions.
"""

from .appearance import FuzzyLabelSet, candidates, fuzzy_memberships, train_classifier
from .context import ContextModel, train_context
from .energy import EnergyParams, LabelingInstance, exhaustive_min, icm, total_energy
from .params import Params
from .scene import Scene, pair_descriptors, parse_scene, region_geometry, serialize_scene
from .spatial import FuzzyParams, RelationVector, relation_vector

__version__ = "0.1.0"

__all__ = [
    "ContextModel", "EnergyParams", "FuzzyLabelSet", "FuzzyParams", "LabelingInstance",
    "Params", "RelationVector", "Scene", "candidates", "exhaustive_min", "fuzzy_memberships",
    "icm", "pair_descriptors", "parse_scene", "region_geometry", "relation_vector",
    "serialize_scene", "total_energy", "train_classifier", "train_context",
]
