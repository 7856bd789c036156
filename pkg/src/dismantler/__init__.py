"""Greedy dismantling and build-up on d-dimensional box grids.

The process removes a black cell with exactly d black neighbours, or adds
a white one with exactly d black neighbours.  This package decides which
minimum-size independent sets complete to the full grid, constructs the
explicit families that always do, compares greedy growth with bootstrap
percolation, and catalogues all solutions of small orders.
"""

from .constructions import (
    BoxPlacement,
    TriangularFamily,
    corner_peeling_trace,
    corridor,
    counting_identity,
    cuboid_fixtures,
    cyclic_base,
    cyclic_solution_trace,
    diagonal_peeling_trace,
    heap_of_oranges,
    hexagonal_board,
    imperfect_solution_order4,
    level_permuted_cyclic,
    nested_heap,
    nested_hexagon,
    shifted_cyclic_base,
    shifted_cyclic_trace,
    staircase_trace,
    triangular_set,
)
from .engine import (
    IllegalMoveError,
    MoveStar,
    Trace,
    TraceVerificationError,
    all_moves_balanced,
    apply_move,
    buildup_candidates,
    dismantle_candidates,
    greedy_complete,
    greedy_final,
    is_balanced,
    is_solution,
    random_order_buildup,
    restricted_dismantle,
    trace_end,
    traces_equivalent,
    verify_trace,
)
from .enumeration import (
    CuboidScanReport,
    SolutionCatalogue,
    cuboid_conjecture_scan,
    cuboid_feasibility,
    enumerate_all_solutions,
    enumerate_perfect_solutions,
    latin_square_total,
    level_permutation_table,
    order7_exception_check,
    order7_exception_square,
)
from .grid import Coord, GridShape, decode, encode, is_facial, line, neighbors, project
from .latin import (
    ExperimentReport,
    LatinHypercube,
    LatinSampler,
    count_latin_squares,
    enumerate_latin_squares,
    is_latin_position,
    latin_from_position,
    latin_is_solution,
    position_from_latin,
    random_latin_square,
    shapiro_stephens_percolates,
    solution_fraction_experiment,
)
from .percolation import (
    bootstrap_closure,
    convex_equivalence_check,
    modified_bootstrap_closure,
    random_convex_position,
)
from .position import (
    BoundsReport,
    Position,
    black_degree,
    black_degrees,
    bounds_report,
    check_facial_bound,
    facial_count,
    facial_lower_bound,
    is_base_position,
    is_convex,
    is_independent,
    is_perfect,
    min_black,
    projection_area,
    projection_lower_bound,
    render_layers,
    section_count,
    total_projection_area,
    visible_surface,
)
from .symmetry import (
    Isometry,
    apply_isometry,
    canonical_form,
    canonical_representative,
    isometry_group,
    orbit_and_stabilizer,
)

__version__ = "0.1.0"
