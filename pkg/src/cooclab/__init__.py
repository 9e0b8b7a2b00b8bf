"""Co-occurrence estimation from single Markov-chain trajectories."""

from .cooccurrence import (
    CoocMatrix,
    StepWeights,
    asymptotic_expectation,
    error_2norm,
    estimate_cooc,
    pmi_transform,
    project_states,
)
from .markov import (
    mixing_time,
    pi_norm,
    regularity_check,
    spectral_expansion,
    spectral_norm,
    stationary_distribution,
    total_variation,
    validate_stochastic,
)
from .walks import Trajectory, sample_walk

__version__ = "0.1.0"
