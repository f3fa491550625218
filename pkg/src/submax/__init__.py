"""Submodular maximization under uniform and partition matroid constraints.

Solvers: discrete sequential greedy (plain, blockwise, lazy), conditional-
gradient ascent of the multilinear extension with lossless rounding, and a
message-passing simulator for decentralized greedy.  A brute-force optimum
makes every ratio guarantee checkable at desk scale.
"""

__version__ = "0.1.0"

from .bruteforce import brute_force_opt, empirical_gap
from .continuous import (
    AscentStep,
    CGParams,
    MatroidPolytope,
    chernoff_success_probability,
    conditional_gradient_direction,
    continuous_greedy,
    cross_partial,
    grad_estimate,
    grad_exact,
    multilinear_estimate,
    multilinear_exact,
    pipage_round,
)
from .core import (
    CallCounter,
    Curvature,
    EPS_VAL,
    GroundSet,
    GroundSetMismatchError,
    GroundSetTooLargeError,
    N_MAX_EXHAUSTIVE,
    PropertyReport,
    Subset,
    ValueOracle,
    check_monotone,
    check_normal,
    check_submodular,
    marginal_gain,
    tabulate,
    total_curvature,
)
from .distributed import (
    CommGraph,
    DisconnectedGraphError,
    DropModel,
    InfoGraph,
    MessageSchedule,
    SweepResult,
    bernoulli_sweep,
    clique_number,
    find_message_sequence,
    gap_bound_incomplete,
    run_distributed_sg,
)
from .functions import (
    BoundedCardinalityOracle,
    CardinalityPowerOracle,
    CoverageInstance,
    CoverageOracle,
    ExemplarInstance,
    ExemplarOracle,
    LiftedPointOracle,
    ModularInstance,
    ModularOracle,
    RankInstance,
    RankOracle,
    WelfareOracle,
    coverage_value,
    exemplar_loss,
    exemplar_utility,
    make_oracle,
    random_coverage_instance,
    random_exemplar_instance,
    random_harvesting_instance,
    random_instance,
    random_modular_instance,
    random_partition_blocks,
    random_rank_instance,
    rank_value,
    row_elimination_rank,
    welfare_lift,
)
from .greedy import (
    GreedyTrace,
    bound_partition_curvature,
    bound_uniform_curvature,
    lazy_greedy,
    sequential_greedy,
    sequential_greedy_partition,
)
from .matroids import (
    ExcludedPairsFamily,
    PartitionMatroid,
    UniformMatroid,
    as_partition,
    decoy_non_matroid,
    is_independent,
    matroid_rank_ceiling,
    verify_matroid_axioms,
)
