"""Minimal projections of randomly rotated cubes onto complex lines."""

from ._accel import USE_NUMBA
from .linalg import (
    ComplexLine,
    RngSeed,
    haar_orthogonal,
    make_complex_structure,
    random_unit_vector,
    rotated_complex_structure,
)
from .nets import (
    Certificate,
    LatticeNet,
    SliceNet,
    cardinality_bound,
    certify_min_diameter,
    covering_check,
    lattice_net,
    slice_net,
)
from .search import (
    MinimizationResult,
    OptimizerConfig,
    capacity_sandwich,
    j_operator_norm_cube,
    minimize_diam_proxy,
    minimize_shadow_area,
    octahedron_section_diameter,
    shadow_area,
    width_direction_upper_bound,
)
from .zonogon import Zonogon, area, diameter, hull_oracle, project_generators, support

__version__ = "0.1.0"
