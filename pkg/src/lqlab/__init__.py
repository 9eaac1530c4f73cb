"""Simulation laboratory for adaptive linear-quadratic control with a
learned or misspecified dynamics basis."""

from .adaptive import (
    AdaptiveRunConfig,
    ExplorationSpec,
    RegretTrace,
    exploration_schedule,
    optimal_baseline,
    run_adaptive,
)
from .estimator import (
    LsOutput,
    Trajectory,
    affine_least_squares,
    excitation_check,
    least_squares,
    steady_covariance,
)
from .pretrain import MultiTaskDataset, PretrainResult, generate_offline_data, pretrain
from .riccati import (
    LinearSystem,
    LQRWeights,
    SynthesisResult,
    ce_closeness,
    closed_loop_cost,
    dare,
    dlyap,
    lqr_gain,
)
from .sysrep import (
    AffineBase,
    BasisBundle,
    Representation,
    TheoryConstants,
    cartpole_system,
    extended_lumped,
    full_basis,
    fixture_initial_gain,
    known_a_embedding,
    known_b_embedding,
    lumped_cartpole,
    cartpole_fixture,
    perturb_to_distance,
    realize,
    scale_known_a,
    subspace_distance,
    theory_constants,
    vec,
    vec_inv,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRunConfig",
    "AffineBase",
    "BasisBundle",
    "ExplorationSpec",
    "LinearSystem",
    "LQRWeights",
    "LsOutput",
    "MultiTaskDataset",
    "PretrainResult",
    "RegretTrace",
    "Representation",
    "SynthesisResult",
    "TheoryConstants",
    "Trajectory",
    "affine_least_squares",
    "cartpole_system",
    "ce_closeness",
    "closed_loop_cost",
    "dare",
    "dlyap",
    "excitation_check",
    "exploration_schedule",
    "extended_lumped",
    "fixture_initial_gain",
    "full_basis",
    "generate_offline_data",
    "known_a_embedding",
    "known_b_embedding",
    "least_squares",
    "lqr_gain",
    "lumped_cartpole",
    "optimal_baseline",
    "cartpole_fixture",
    "perturb_to_distance",
    "pretrain",
    "realize",
    "run_adaptive",
    "scale_known_a",
    "steady_covariance",
    "subspace_distance",
    "theory_constants",
    "vec",
    "vec_inv",
]
