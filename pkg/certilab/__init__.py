"""Certifiability of many-qubit pure states under local depolarizing noise."""
from certilab.utils.certify import (
    CertificationResult,
    certifiability_exact,
    ground_state_bound,
    macro_upper_bound,
    pairwise_noisy_distance,
    projector_lower_bound,
    witness_lower_bound,
)
from certilab.utils.errors import ArgumentError, CapExceededError, CertilabError, ScenarioError
from certilab.utils.families import get_family, get_hamiltonian
from certilab.utils.hilbert import DensityMatrix, Observable, StateVector
from certilab.utils.optimizer import OptimizerOptions
from certilab.utils.scaling import classify_decay, scaling_sweep
from certilab.utils.states import counterexample_states

__version__ = "0.1.0"
