"""Uniqueness sets for bounded holomorphic functions, made computable.

Nontangential counting of disk sequences, essential-minorant criteria for
the classes S_w / L_v / P_w, and the dyadic Cantor-type extremal
construction together with its harmonic and bounded-holomorphic witnesses.
"""

from ntdecay.geometry import (
    DEFAULT_ALPHA,
    CircleArc,
    DiskPoint,
    DyadicIndex,
    cube_diameter_bound,
    dyadic_index_of,
    gleason_distance,
    neighbor_cover_width,
    separation_constant,
    stolz_arc,
    stolz_contains,
)

from ntdecay.classes import DecreaseFunction, WeightSequence, class_membership, parse_g, parse_weights
from ntdecay.construction import ConstructionRefused, construct_lemma61, construct_necessity_thm2, ring_counterexample
from ntdecay.counting import coverage_distribution, maximal_distribution, sequence_profile
from ntdecay.geometry import DiskSequence
from ntdecay.potential import CircleMeasure, HarmonicWitness, herglotz_transform, poisson_integral

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ALPHA",
    "CircleMeasure",
    "ConstructionRefused",
    "DecreaseFunction",
    "DiskSequence",
    "HarmonicWitness",
    "WeightSequence",
    "class_membership",
    "construct_lemma61",
    "construct_necessity_thm2",
    "coverage_distribution",
    "herglotz_transform",
    "maximal_distribution",
    "parse_g",
    "parse_weights",
    "poisson_integral",
    "ring_counterexample",
    "sequence_profile",
    "CircleArc",
    "DiskPoint",
    "DyadicIndex",
    "cube_diameter_bound",
    "dyadic_index_of",
    "gleason_distance",
    "neighbor_cover_width",
    "separation_constant",
    "stolz_arc",
    "stolz_contains",
]
