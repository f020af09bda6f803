"""Property testing, adversarial instances, and adaptive learning for discrete distributions."""

from .core import (
    Distribution,
    NonConcentrationParams,
    SamplingOracle,
    additive_chernoff_bound,
    derive_seed,
    draw_samples,
    empirical_distribution,
    high_set,
    is_non_concentrated,
    l1_distance,
    load_distribution,
    multiplicative_chernoff_bound,
    sample_size_additive,
    save_distribution,
    sorted_l1_distance,
    top_elements,
)
from .errors import DimensionError, ParameterError, SolverError, StructureError
from .tester import (
    HighEstimate,
    TesterParams,
    Verdict,
    check_conditions,
    derive_params,
    estimate_high_part,
    majority_tolerant_test,
    tolerant_test,
)
from .linprop import (
    FeasibilityInstance,
    LinearProperty,
    Polyhedron,
    build_feasibility_lp,
    linear_property_oracle,
    load_polyhedron,
    lp_feasible,
    save_polyhedron,
    uniformity_polyhedron,
)
from .adversarial import (
    AdversarialPair,
    Pairing,
    build_pairing,
    collision_rate,
    dno_general,
    dno_label_invariant,
    make_adversarial_pair,
    relabel,
    verify_adversarial,
)
from .learner import (
    IdentityTestParams,
    LearnResult,
    learn_adaptive,
    learn_known_support,
    tol_identity_test,
)

__version__ = "0.1.0"

__all__ = [
    "AdversarialPair",
    "DimensionError",
    "Distribution",
    "FeasibilityInstance",
    "HighEstimate",
    "IdentityTestParams",
    "LearnResult",
    "LinearProperty",
    "NonConcentrationParams",
    "Pairing",
    "ParameterError",
    "Polyhedron",
    "SamplingOracle",
    "SolverError",
    "StructureError",
    "TesterParams",
    "Verdict",
    "additive_chernoff_bound",
    "build_feasibility_lp",
    "build_pairing",
    "check_conditions",
    "collision_rate",
    "derive_params",
    "derive_seed",
    "dno_general",
    "dno_label_invariant",
    "draw_samples",
    "empirical_distribution",
    "estimate_high_part",
    "high_set",
    "is_non_concentrated",
    "l1_distance",
    "learn_adaptive",
    "learn_known_support",
    "linear_property_oracle",
    "load_distribution",
    "load_polyhedron",
    "lp_feasible",
    "majority_tolerant_test",
    "make_adversarial_pair",
    "multiplicative_chernoff_bound",
    "relabel",
    "sample_size_additive",
    "save_distribution",
    "save_polyhedron",
    "sorted_l1_distance",
    "tol_identity_test",
    "tolerant_test",
    "top_elements",
    "uniformity_polyhedron",
    "verify_adversarial",
]
