"""submax: non-negative submodular maximization under k-system constraints.

A library and CLI for the greedy family of constrained maximizers —
plain/lazy greedy, repeated greedy with unconstrained interleaving,
subsampled greedy — with strict oracle-call accounting, brute-force
verification oracles, a query-indistinguishable hard-instance family, and a
reproducible benchmark harness.
"""

from .core import (
    CapacityError,
    ElementSet,
    GroundSet,
    IndependenceOracle,
    NonNegativityError,
    PropertyViolation,
    Rng,
    SolveResult,
    ValueOracle,
    bernoulli,
    marginal_gain,
)
from .constraints import (
    GenreConstraint,
    IntersectionSystem,
    PartitionMatroid,
    UniformMatroid,
    load_genres_csv,
    max_feasible_size,
    verify_downward_closed,
    verify_k_extendible,
    verify_k_system,
)
from .objectives import (
    CoverageDispersionObjective,
    CutObjective,
    ModularObjective,
    SyntheticSpec,
    WeightedCoverageObjective,
    check_monotone,
    check_submodular,
    check_submodular_pairwise,
    eval_coverage_dispersion,
    generate,
    load_similarity_csv,
)
from .algorithms import (
    GreedyStep,
    InstrumentedStep,
    brute_force_opt,
    default_rounds,
    greedy,
    instrumented_sample_greedy,
    repeated_greedy,
    repeated_greedy_bound,
    sample_greedy,
    sample_greedy_linear,
    unconstrained_max_det,
    unconstrained_max_rand,
)
from .hardness import (
    MODE_M,
    MODE_M_PRIME,
    GadgetParams,
    HardInstance,
    gadget_g,
    is_independent_hard,
    large_witness,
    overlap_probe,
    witness_size,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CoverageDispersionObjective",
    "CutObjective",
    "ElementSet",
    "GadgetParams",
    "MODE_M",
    "MODE_M_PRIME",
    "GenreConstraint",
    "GreedyStep",
    "GroundSet",
    "HardInstance",
    "IndependenceOracle",
    "InstrumentedStep",
    "IntersectionSystem",
    "ModularObjective",
    "NonNegativityError",
    "PartitionMatroid",
    "PropertyViolation",
    "Rng",
    "SolveResult",
    "SyntheticSpec",
    "UniformMatroid",
    "ValueOracle",
    "WeightedCoverageObjective",
    "bernoulli",
    "brute_force_opt",
    "check_monotone",
    "check_submodular",
    "check_submodular_pairwise",
    "default_rounds",
    "eval_coverage_dispersion",
    "gadget_g",
    "generate",
    "greedy",
    "instrumented_sample_greedy",
    "is_independent_hard",
    "large_witness",
    "load_genres_csv",
    "load_similarity_csv",
    "marginal_gain",
    "max_feasible_size",
    "overlap_probe",
    "repeated_greedy",
    "repeated_greedy_bound",
    "sample_greedy",
    "sample_greedy_linear",
    "unconstrained_max_det",
    "unconstrained_max_rand",
    "verify_downward_closed",
    "verify_k_extendible",
    "verify_k_system",
    "witness_size",
]
