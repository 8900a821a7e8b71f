"""Election control through social influence.

Simulation of multi-message cascades over voter networks, ranking
revision rules, margin-of-victory objectives, greedy seed selection with
its approximation guarantee, an exact brute-force oracle, and generators
for the benchmark instance families.
"""

from .diffusion import (
    DiffusionOutcome,
    LiveGraph,
    MessageVector,
    Solution,
    diffuse,
    diffuse_timed,
    full_live_graph,
    influence,
    make_vector,
    message_count,
    replicate_rng,
    sample_live_graph_ic,
    sample_live_graph_lt,
    validate_solution,
    vector_messages,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    ConstructionError,
    ElectionControlError,
    InapplicableError,
    RuleIncompleteError,
    StructuralError,
)
from .estimation import (
    DELTA_MOV,
    C0_VOTES,
    INFLUENCE,
    PROBABILITY_OF_VICTORY,
    Estimate,
    Objective,
    baseline_mov,
    estimate,
    meets_threshold,
    victory_above_threshold,
)
from .instances import (
    ReductionBuild,
    SetCoverInstance,
    VertexCoverInstance,
    bribed_blowup,
    epsilon_connect,
    demo_clique,
    greedy_trap_ring,
    greedy_trap_tree,
    random_instance,
    set_cover_certificate,
    set_cover_reduction,
    vertex_cover_lt_reduction,
)
from .model import (
    Instance,
    Ranking,
    Tally,
    VoterNetwork,
    delta_mov,
    margin_of_victory,
    tally,
    undirected_network,
)
from .optimize import (
    FrontierEntry,
    OptimizerConfig,
    approximation_ratio,
    budgeted_greedy,
    frontier,
    greedy_approach_loop,
    greedy_influence_seeds,
    universal_greedy,
)
from .oracle import OracleResult, solve_exact, symmetry_classes
from .revision import (
    OPTIMISTIC,
    PESSIMISTIC,
    AxiomViolation,
    CustomRule,
    OptimisticRule,
    PessimisticRule,
    RevisionRule,
    ScoreBasedRule,
    UniversalMessageSetResult,
    apply_single,
    cancel_pairs,
    check_axioms,
    enumerate_orderings,
    is_least_candidate_manipulable,
    min_universal_message_set,
    revise,
    revised_top,
)

__version__ = "0.1.0"
