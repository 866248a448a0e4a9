"""Exact explanation queries for FBDDs, perceptrons and ReLU MLPs."""

from globex.core import (DeskScaleError, DimensionError, FeatureSubset, Instance, ParseError,
                         compose, parse_instance, parse_subset)
from globex.models import (Fbdd, Mlp, Perceptron, evaluate, parse_model, random_fbdd,
                           random_mlp, random_perceptron, serialize_model)

__version__ = "0.1.0"
