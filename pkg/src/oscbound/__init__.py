"""Rearrangements, shape-basis BMO seminorms and Calderon-Zygmund decompositions on grids.

Set ``OSCBOUND_DISABLE_NUMBA=1`` before import to run the pure-numpy kernels.
"""

from ._accel import USE_NUMBA
from .concentration import ConcentrationInstance, bounded_differences, check_concentration, subcube_gadget
from .constants import ConstantsRow, constants, crossover_dimension
from .corpus import CorpusConfig, generate_corpus
from .cz import CZDecomposition, bisection_cz, dyadic_cz, rising_sun_1d, validate_cz
from .errors import (
    BadMagicError,
    CZError,
    DimensionMismatchError,
    EmptyShapeError,
    GridFormatError,
    NotEnumerableError,
    OscboundError,
    ShapeError,
    TruncatedPayloadError,
)
from .grid import GridFunction, PrefixSumTable, box_mean, build_prefix, load_grid, save_grid
from .oscillation import (
    OscillationReport,
    blo_functional,
    bmo_seminorm,
    mean_oscillation,
    neighbor_mean_gap,
    partition_bounds,
    step_seminorm,
)
from .rearrangement import (
    RadialFunction,
    StepFunction1D,
    decreasing_rearrangement,
    distribution,
    hardy_littlewood_check,
    local_interval_for_cube,
    polar_oscillation,
    radial_oscillation,
    radial_reduction,
    rasterize_radial,
    symmetrize,
)
from .shapes import (
    CUBES,
    FALSECUBES,
    RECTANGLES,
    Ball,
    BasisDescriptor,
    Box,
    Family,
    Sector,
    ball_for_sector,
    circumscribe_cube_ball,
    enumerate_basis,
    omega,
    sector_for_ball,
)
from .suites import SUITES, SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
