"""Message-spread simulation on typed networks and evidential classification."""

from .belief import (
    Frame,
    MassFunction,
    ProbDistribution,
    SimilarityMatrix,
    build_similarity_matrix,
    consonant_transform,
    euclidean_distance,
    jousselme_distance,
    pignistic,
    uniform_distribution,
    vacuous_mass,
    validate_mass,
)
from .classify import ClassificationResult, classify
from .experiment import (
    ExperimentConfig,
    PccReport,
    default_strategies,
    emit_report,
    generate_dataset,
    load_config,
    make_noisy_strategy,
    run_experiment,
    save_config,
)
from .learning import (
    LevelProfile,
    accrue,
    count_effectives,
    learn_profile,
    load_profile,
    save_profile,
    to_profile,
)
from .network import (
    Edge,
    HeteroNetwork,
    NetworkMetrics,
    NodeParams,
    assign_random_link_types,
    compute_metrics,
    generate_synthetic_network,
    load_edge_list,
    load_untyped_edge_list,
    save_edge_list,
    save_node_params,
)
from .propagation import (
    PropagationStrategy,
    PropagationTrace,
    TraceEvent,
    load_trace,
    save_trace,
    simulate,
    trace_level_counts,
)

__version__ = "0.1.0"
