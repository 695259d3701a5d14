"""The certifiability measure, its closed-form bounds and consistency checks.

certifiability_exact searches the orthogonal complement of psi for the state
whose noisy image is closest to the noisy image of psi. The search is local,
so the reported value is the best found and therefore an upper estimate of
the true minimum; the analytic lower bounds below guard it.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from ..config import check_qubit_cap
from .channels import _check_probability, apply_to_operator
from .errors import ArgumentError
from .hamiltonians import PauliHamiltonian, rescale_to_unit_spectral_radius, spectral_info
from .hilbert import (
    Observable,
    StateVector,
    reduce_operator,
    trace_distance,
    trace_norm,
)
from .optimizer import OptimizerOptions, OptimizerReport, minimize_over_complement

logger = logging.getLogger(__name__)

SANDWICH_SLACK = 1e-7
ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CertificationResult:
    value: float
    argmin_state: StateVector
    p: float
    lower_bounds: Dict[str, float] = field(default_factory=dict)
    upper_bounds: Dict[str, float] = field(default_factory=dict)
    optimizer_report: Optional[OptimizerReport] = None
    bounds_consistent: bool = True

    @property
    def converged(self) -> bool:
        return self.optimizer_report is None or self.optimizer_report.converged

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "p": self.p,
            "lower_bounds": dict(self.lower_bounds),
            "upper_bounds": dict(self.upper_bounds),
            "bounds_consistent": self.bounds_consistent,
            "converged": self.converged,
            "optimizer": self.optimizer_report.to_dict() if self.optimizer_report else None,
        }


def _noisy(psi: StateVector, p: float) -> np.ndarray:
    return apply_to_operator(psi.projector(), p)


def _check_pair(psi: StateVector, phi: StateVector):
    if psi.n_qubits != phi.n_qubits:
        raise ArgumentError(f"states act on {psi.n_qubits} and {phi.n_qubits} qubits")


def _check_orthogonal(psi: StateVector, phi: StateVector):
    _check_pair(psi, phi)
    overlap = abs(psi.inner(phi))
    if overlap > ORTHOGONALITY_TOL:
        raise ArgumentError(f"states are not orthogonal (|<psi|phi>| = {overlap:.3g})")


def check_sandwich(value: float, lower: Dict[str, float], upper: Dict[str, float]) -> bool:
    """Every lower bound <= value <= every upper bound, up to SANDWICH_SLACK"""
    ok = True
    for name, bound in lower.items():
        if bound - SANDWICH_SLACK > value:
            logger.warning("lower bound %s=%.12g exceeds the optimized value %.12g", name, bound, value)
            ok = False
    for name, bound in upper.items():
        if value > bound + SANDWICH_SLACK:
            logger.warning("optimized value %.12g exceeds upper bound %s=%.12g", value, name, bound)
            ok = False
    return ok


def certifiability_exact(
    psi: StateVector,
    p: float,
    opts: Optional[OptimizerOptions] = None,
    candidates: Sequence[StateVector] = (),
    lower_bounds: Optional[Dict[str, float]] = None,
    upper_bounds: Optional[Dict[str, float]] = None,
) -> CertificationResult:
    """min over phi orthogonal to psi of D[E(psi), E(phi)], by multi-start descent"""
    check_qubit_cap(psi.n_qubits, exact=True)
    _check_probability(p)
    opts = opts or OptimizerOptions()
    value, phi, report, _ = minimize_over_complement(psi, p, opts, candidates)

    overlap = abs(psi.inner(phi))
    if overlap > ORTHOGONALITY_TOL:
        raise ArgumentError(f"optimizer left the orthogonal complement (overlap {overlap:.3g})")

    lower = {"projector": projector_lower_bound(psi, p)}
    lower.update(lower_bounds or {})
    upper = dict(upper_bounds or {})
    consistent = check_sandwich(value, lower, upper)
    logger.info("C(psi) ~ %.12g for %d qubits at p=%g (converged=%s)", value, psi.n_qubits, p, report.converged)
    return CertificationResult(value, phi, p, lower, upper, report, consistent)


def pairwise_noisy_distance(psi: StateVector, phi: StateVector, p: float) -> float:
    """D[E(psi), E(phi)]"""
    _check_pair(psi, phi)
    check_qubit_cap(psi.n_qubits)
    _check_probability(p)
    return trace_distance(_noisy(psi, p), _noisy(phi, p))


def witness_lower_bound(
    psi: StateVector,
    phi: StateVector,
    A: Observable,
    p: float,
    adjoint: bool = True,
) -> float:
    """1/2 |<A>_E(psi) - <A>_E(phi)| for an observable of spectral radius <= 1.

    With adjoint=True the noise is moved onto the observable, E(A), which is
    the same number because the depolarizing Kraus operators are Hermitian.
    """
    _check_pair(psi, phi)
    check_qubit_cap(psi.n_qubits)
    _check_probability(p)
    if A.n_qubits != psi.n_qubits:
        raise ArgumentError(f"observable acts on {A.n_qubits} qubits, states on {psi.n_qubits}")
    if A.spectral_radius > 1.0 + 1e-9:
        raise ArgumentError(f"witness spectral radius {A.spectral_radius:.6g} exceeds 1; rescale it first")
    if adjoint:
        damped = apply_to_operator(A.matrix, p)
        diff = psi.projector() - phi.projector()
    else:
        damped = A.matrix
        diff = _noisy(psi, p) - _noisy(phi, p)
    return 0.5 * abs(float(np.real(np.trace(damped @ diff))))


def ground_state_bound(h: PauliHamiltonian, p: float) -> float:
    """p^k * gap / 2 for the unique ground state of a k-local Hamiltonian at unit spectral radius"""
    _check_probability(p)
    scaled, _ = rescale_to_unit_spectral_radius(h)
    info = spectral_info(scaled)
    if info.ground_degeneracy != 1:
        raise ArgumentError(f"ground space is {info.ground_degeneracy}-fold degenerate; the bound needs a unique ground state")
    if info.gap <= 0:
        raise ArgumentError("Hamiltonian is gapless")
    return p ** scaled.locality * info.gap / 2


def projector_lower_bound(psi: StateVector, p: float) -> float:
    """p^k / 2 with k the largest Pauli weight in |psi><psi|.

    psi is the unique ground state of -|psi><psi|, which has unit spectral
    radius and unit gap, so the ground-state bound applies to every state.
    """
    check_qubit_cap(psi.n_qubits)
    _check_probability(p)
    k = PauliHamiltonian.from_matrix(psi.projector(), tol=1e-10).locality
    return p ** k / 2


def _check_n_eff(N: int, N_eff: float):
    if N < 1:
        raise ArgumentError(f"N must be at least 1, got {N}")
    if not 1 <= N_eff <= N:
        raise ArgumentError(f"N_eff must lie in [1, N={N}], got {N_eff}")


def macro_upper_bound(N: int, N_eff: float, p: float) -> float:
    """q^N_eff with q = 1 - (1-p)^(N/N_eff)"""
    _check_n_eff(N, N_eff)
    _check_probability(p)
    q = 1.0 - (1.0 - p) ** (N / N_eff)
    return q ** N_eff


def macro_upper_bound_groups(group_sizes: Iterable[int], p: float) -> float:
    """prod_g (1 - (1-p)^m_g) for groups of unequal size"""
    _check_probability(p)
    sizes = list(group_sizes)
    if not sizes or any(m < 1 for m in sizes):
        raise ArgumentError(f"group sizes must be positive, got {sizes}")
    return float(np.prod([1.0 - (1.0 - p) ** m for m in sizes]))


def epsilon_macro_bound(N_eff: float, q: float, eps: float) -> float:
    """[q + eps(1-q)]^N_eff for branches only distinguishable with probability 1 - eps"""
    if N_eff < 1:
        raise ArgumentError(f"N_eff must be at least 1, got {N_eff}")
    if not 0.0 <= q <= 1.0:
        raise ArgumentError(f"q must lie in [0, 1], got {q}")
    if not 0.0 <= eps < 0.5:
        raise ArgumentError(f"eps must lie in [0, 1/2), got {eps}")
    return (q + eps * (1.0 - q)) ** N_eff


def mixture_family_check(psi: StateVector, phi: StateVector, p: float, a_grid: Sequence[float]):
    """D[E(psi), E(a psi + (1-a) phi)] for each a"""
    _check_orthogonal(psi, phi)
    check_qubit_cap(psi.n_qubits)
    _check_probability(p)
    target = _noisy(psi, p)
    noisy_phi = _noisy(phi, p)
    values = []
    for a in a_grid:
        if not 0.0 <= a <= 1.0:
            raise ArgumentError(f"mixing weight must lie in [0, 1], got {a}")
        # E is linear, so E(rho(a)) mixes the two noisy images
        values.append(trace_distance(target, a * target + (1 - a) * noisy_phi))
    return values


def off_diagonal_group_trace(psi0: StateVector, psi1: StateVector, group: Sequence[int]) -> float:
    """||Tr_group |psi0><psi1| ||_1"""
    _check_pair(psi0, psi1)
    group = list(group)
    if not group:
        raise ArgumentError("group must be nonempty")
    n = psi0.n_qubits
    if len(group) == n:
        return abs(psi1.inner(psi0))
    block = np.outer(psi0.amplitudes, psi1.amplitudes.conj())
    return trace_norm(reduce_operator(block, group, n))


def off_diagonal_noisy_norm(psi0: StateVector, psi1: StateVector, p: float) -> float:
    """||E(|psi0><psi1|)||_1"""
    _check_pair(psi0, psi1)
    check_qubit_cap(psi0.n_qubits)
    _check_probability(p)
    return trace_norm(apply_to_operator(np.outer(psi0.amplitudes, psi1.amplitudes.conj()), p))


def epsilon_ball_certifiable(result, delta: float, eps: float) -> bool:
    """Certifiable against preparations within eps of psi at threshold delta"""
    if delta < 0 or eps < 0:
        raise ArgumentError("delta and eps must be nonnegative")
    value = result.value if isinstance(result, CertificationResult) else float(result)
    return value > delta and value > 2 * eps

