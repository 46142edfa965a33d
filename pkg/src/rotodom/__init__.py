"""Exact-arithmetic toolkit for rotated odometers and their tree models.

Evaluates the von Neumann-Kakutani map composed with finite interval
rotations on [0, 1), models the result as a finite-state automorphism of a
grafted binary tree, and computes the complete periodic/minimal
decomposition symbolically, with an independent brute-force oracle for
cross-checking.
"""

from .dyadic import Dyadic, DyadicInterval, add_mod1, binary_digit, level_index, normalize
from .permutations import CycleDecomposition, Permutation
from .interval_maps import (
    NoPreimageError,
    RotatedOdometer,
    apply_odometer,
    apply_rotation,
    detect_period,
    discontinuity_points,
    periodic_intervals_oracle,
    vnk,
    vnk_inverse,
)
from .tree_automorphisms import (
    BoundaryPoint,
    OrderBound,
    TreeAutomorphism,
    adding_machine,
    apply_boundary,
    apply_vertex,
    compose,
    finite_depth,
    finite_depth_from_table,
    from_json,
    graft,
    identity,
    inverse,
    is_identity,
    level_permutation,
    order_probe,
    power,
    rotation_automorphism,
    section,
    sigma,
    symbol_to_word,
    to_json,
    vnk_interval_permutation,
    word_to_symbol,
)
from .correspondence import (
    Counterexample,
    EncodedPoint,
    boundary_distance,
    conjugacy_check,
    cylinder_mass,
    decode_point,
    encode_point,
)
from .analysis import (
    ClassificationReport,
    EnumerationResult,
    Mismatch,
    PeriodicPart,
    PipelineResult,
    analyze_finite_depth,
    classify,
    enumerate_all,
    odometer_automorphism,
    oracle_crosscheck,
)

__version__ = "0.1.0"
