"""Random subcube intersection graphs on the hypercube Q_d."""

from .cube import Point, Subcube, contains_point, hamming_distance, intersection, intersects, restrict
from .models import Binomial, FeatureFamily, SeedSpec, Uniform, load_family, sample_family, save_family

__version__ = "0.1.0"

__all__ = [
    "Binomial",
    "FeatureFamily",
    "Point",
    "SeedSpec",
    "Subcube",
    "Uniform",
    "contains_point",
    "hamming_distance",
    "intersection",
    "intersects",
    "load_family",
    "restrict",
    "sample_family",
    "save_family",
]
