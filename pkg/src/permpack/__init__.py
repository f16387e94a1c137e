"""Exact counting, maximization and packing densities for layered permutation patterns."""
from .core import (
    DEFAULT_MAX_EXHAUSTIVE_N,
    Block,
    BlockStructure,
    ExhaustiveBoundError,
    NotLayeredError,
    PatternSpec,
    Permutation,
    PermutationError,
    build_from_blocks,
    compositions,
    count_occurrences,
    count_occurrences_layered,
    count_occurrences_naive,
    decompose_blocks,
    enumerate_all,
    enumerate_layered,
    parse_blocks,
    parse_permutation,
)
from .formulas import (
    DensityReport,
    binom_inequality_check,
    density_2beta,
    density_alpha_alpha,
    g_formula_2beta,
    g_formula_alpha_alpha,
)
from .search import RatioTable, SearchResult, g_k, galvin_ratios, max_over_all, max_over_layered
from .transforms import (
    RewriteOutcome,
    absorb_isolated_points,
    merge_A1L1,
    move_point_A1_to_Lk,
    push_antilayers_left,
    sort_layers,
)

__version__ = "0.1.0"
