"""Confusability of orthogonal state sets, branch distinguishability and effective size."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import check_qubit_cap
from .certify import (
    _check_orthogonal,
    macro_upper_bound_groups,
    off_diagonal_group_trace,
    pairwise_noisy_distance,
)
from .channels import _check_probability, apply_to_operator
from .errors import ArgumentError
from .hamiltonians import PauliHamiltonian, spectral_info
from .hilbert import (
    ASSERT_TOL,
    StateVector,
    _check_qubits,
    eigendecompose_hermitian,
    embed_operator,
    expectation,
    reduce_operator,
    trace_distance,
    von_neumann_entropy,
)
from .pool import run_ordered
from .scaling import DecayClassification, classify_decay, records_from_values
from .states import superposition

logger = logging.getLogger(__name__)

Members = Union[Sequence[StateVector], Callable[[int], Sequence[StateVector]]]
Grouping = List[Tuple[int, ...]]


def _check_orthonormal(states: Sequence[StateVector]):
    if not states:
        raise ArgumentError("need at least one state")
    n = states[0].n_qubits
    if any(s.n_qubits != n for s in states):
        raise ArgumentError("states act on different qubit counts")
    amps = np.column_stack([s.amplitudes for s in states])
    deviation = float(np.max(np.abs(amps.conj().T @ amps - np.eye(len(states)))))
    if deviation > ASSERT_TOL:
        raise ArgumentError(f"states are not mutually orthogonal (Gram deviation {deviation:.3g})")


@dataclass(frozen=True, eq=False)
class ConfusabilityMatrix:
    states: Tuple[StateVector, ...]
    p: float
    N: int
    distances: np.ndarray
    sweep: Dict[int, np.ndarray] = field(default_factory=dict)
    classifications: Dict[Tuple[int, int], DecayClassification] = field(default_factory=dict)

    def all_confusable(self) -> bool:
        """Every off-diagonal pair decays exponentially over the sweep"""
        return bool(self.classifications) and all(c.label == "exponential" for c in self.classifications.values())

    def to_dict(self) -> Dict:
        return {
            "N": self.N,
            "p": self.p,
            "size": len(self.states),
            "distances": self.distances.tolist(),
            "sweep": {str(N): d.tolist() for N, d in sorted(self.sweep.items())},
            "classifications": {f"{i},{j}": c.to_dict() for (i, j), c in sorted(self.classifications.items())},
        }


def distance_matrix(states: Sequence[StateVector], p: float) -> np.ndarray:
    _check_orthonormal(states)
    n = len(states)
    out = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        out[i, j] = out[j, i] = pairwise_noisy_distance(states[i], states[j], p)
    return out


def confusability_matrix(
    members: Members,
    p: float,
    N_sweep: Optional[Sequence[int]] = None,
    margin: float = 2.0,
    jobs: int = 1,
) -> ConfusabilityMatrix:
    """Pairwise noisy distances of an orthogonal family, classified over an N sweep.

    members is either a fixed list of states or a callable N -> states for a
    family parametric in N.
    """
    _check_probability(p)
    if callable(members):
        if not N_sweep:
            raise ArgumentError("a parametric family needs an N sweep")
        build = members
        Ns = [int(N) for N in N_sweep]
    else:
        fixed = list(members)
        _check_orthonormal(fixed)
        build = lambda N: fixed  # noqa: E731
        Ns = [fixed[0].n_qubits]

    matrices = run_ordered(lambda N: distance_matrix(list(build(N)), p), Ns, jobs)
    sweep = dict(zip(Ns, matrices))
    size = matrices[0].shape[0]
    if any(m.shape[0] != size for m in matrices):
        raise ArgumentError("family size changes across the N sweep")

    classifications = {}
    if len(Ns) >= 4:
        for i, j in itertools.combinations(range(size), 2):
            records = records_from_values(f"pair-{i}-{j}", Ns, [sweep[N][i, j] for N in Ns], p)
            classifications[(i, j)] = classify_decay(records, margin)
    N_ref = max(Ns)
    return ConfusabilityMatrix(tuple(build(N_ref)), p, N_ref, sweep[N_ref], sweep, classifications)


def _equal_mixture(states: Sequence[StateVector]) -> np.ndarray:
    return sum(s.projector() for s in states) / len(states)


def equal_mixture_distance(states: Sequence[StateVector], p: float) -> float:
    """D[E(psi_1), E(mean_j |psi_j><psi_j|)]"""
    _check_orthonormal(states)
    check_qubit_cap(states[0].n_qubits)
    _check_probability(p)
    return trace_distance(
        apply_to_operator(states[0].projector(), p),
        apply_to_operator(_equal_mixture(states), p),
    )


def mixture_entropy(states: Sequence[StateVector]) -> float:
    """von Neumann entropy (nats) of the equal mixture"""
    _check_orthonormal(states)
    return von_neumann_entropy(_equal_mixture(states))


def confusability_index_upper_bound(h: PauliHamiltonian, min_gap: Optional[float] = None) -> int:
    """Ground-space degeneracy of a gapped local Hamiltonian.

    min_gap defaults to 1/N^2.
    """
    threshold = 1.0 / h.n_qubits ** 2 if min_gap is None else min_gap
    info = spectral_info(h)
    if info.gap < threshold:
        raise ArgumentError(f"gap {info.gap:.3g} is below the threshold {threshold:.3g}")
    return info.ground_degeneracy


@dataclass(frozen=True, eq=False)
class GroupDistinguishability:
    group: Tuple[int, ...]
    success_probability: float
    observable: np.ndarray

    def to_dict(self) -> Dict:
        return {"group": list(self.group), "success_probability": self.success_probability}


def _reduced(psi: StateVector, group: Sequence[int]) -> np.ndarray:
    rest = [q for q in range(psi.n_qubits) if q not in group]
    return reduce_operator(psi.projector(), rest, psi.n_qubits)


def helstrom_observable(rho0: np.ndarray, rho1: np.ndarray) -> np.ndarray:
    """+1 on the nonnegative eigenspace of rho0 - rho1, -1 elsewhere"""
    evals, evecs = eigendecompose_hermitian(rho0 - rho1)
    signs = np.where(evals >= -ASSERT_TOL, 1.0, -1.0)
    return (evecs * signs) @ evecs.conj().T


def group_success_probability(psi0: StateVector, psi1: StateVector, group: Sequence[int]) -> GroupDistinguishability:
    """Helstrom success probability 1/2 + 1/2 D(rho0, rho1) on the reduced states of a group"""
    if psi0.n_qubits != psi1.n_qubits:
        raise ArgumentError("branches act on different qubit counts")
    check_qubit_cap(psi0.n_qubits)
    group = tuple(sorted(_check_qubits(group, psi0.n_qubits)))
    if not group:
        raise ArgumentError("group must be nonempty")
    rho0, rho1 = _reduced(psi0, group), _reduced(psi1, group)
    P = 0.5 + 0.5 * trace_distance(rho0, rho1)
    return GroupDistinguishability(group, P, helstrom_observable(rho0, rho1))


def contiguous_blocks(N: int, m: int) -> Grouping:
    if m < 1 or N % m:
        raise ArgumentError(f"N={N} does not split into blocks of {m}")
    return [tuple(range(start, start + m)) for start in range(0, N, m)]


def contiguous_strategy(N: int) -> List[Grouping]:
    """Equal contiguous blocks, finest first"""
    return [contiguous_blocks(N, m) for m in range(1, N + 1) if N % m == 0]


def best_grouping(
    psi0: StateVector,
    psi1: StateVector,
    eps: float,
    strategy: Callable[[int], List[Grouping]] = contiguous_strategy,
) -> Optional[Grouping]:
    """Grouping with the most groups in which every group distinguishes with P >= 1 - eps"""
    if not 0.0 <= eps < 0.5:
        raise ArgumentError(f"eps must lie in [0, 1/2), got {eps}")
    candidates = sorted(strategy(psi0.n_qubits), key=len, reverse=True)
    for grouping in candidates:
        if all(group_success_probability(psi0, psi1, g).success_probability >= 1 - eps - ASSERT_TOL for g in grouping):
            return grouping
    return None


def effective_size(
    psi0: StateVector,
    psi1: StateVector,
    eps: float = 0.0,
    strategy: Callable[[int], List[Grouping]] = contiguous_strategy,
) -> int:
    grouping = best_grouping(psi0, psi1, eps, strategy)
    if grouping is None:
        logger.info("no grouping distinguishes the branches at eps=%g; N_eff=1", eps)
        return 1
    return len(grouping)


def independence_diagnostic(psi0: StateVector, psi1: StateVector, groups: Sequence[Sequence[int]]) -> List[Dict]:
    """|<A_i A_j> - <A_i><A_j>| per group pair and branch, A the Helstrom observable of each group"""
    n = psi0.n_qubits
    flat = [q for g in groups for q in g]
    if len(flat) != len(set(flat)):
        raise ArgumentError("groups must be disjoint")
    observables = [
        embed_operator(group_success_probability(psi0, psi1, g).observable, sorted(g), n) for g in groups
    ]
    rows = []
    for (i, a), (j, b) in itertools.combinations(enumerate(observables), 2):
        for branch, psi in (("psi0", psi0), ("psi1", psi1)):
            rho = psi.projector()
            value = abs(expectation(a @ b, rho) - expectation(a, rho) * expectation(b, rho))
            rows.append({"groups": [i, j], "branch": branch, "value": value})
    return rows


@dataclass(frozen=True)
class EffectiveSizeReport:
    N_eff: int
    eps: float
    groups: Tuple[Tuple[int, ...], ...]
    success_probabilities: Tuple[float, ...]
    independence: Tuple[Dict, ...] = ()

    def to_dict(self) -> Dict:
        return {
            "N_eff": self.N_eff,
            "eps": self.eps,
            "groups": [list(g) for g in self.groups],
            "success_probabilities": list(self.success_probabilities),
            "independence": [dict(row) for row in self.independence],
        }


def effective_size_report(
    psi0: StateVector,
    psi1: StateVector,
    eps: float = 0.0,
    strategy: Callable[[int], List[Grouping]] = contiguous_strategy,
) -> EffectiveSizeReport:
    """effective_size with the winning grouping, its success probabilities and the independence diagnostic"""
    grouping = best_grouping(psi0, psi1, eps, strategy)
    if grouping is None:
        return EffectiveSizeReport(1, eps, (), ())
    probabilities = tuple(group_success_probability(psi0, psi1, g).success_probability for g in grouping)
    independence = tuple(independence_diagnostic(psi0, psi1, grouping)) if len(grouping) > 1 else ()
    return EffectiveSizeReport(len(grouping), eps, tuple(tuple(g) for g in grouping), probabilities, independence)


@dataclass(frozen=True)
class MacroCheck:
    distance: float
    bound: float
    groups: Tuple[Tuple[int, ...], ...]
    off_diagonal: Tuple[float, ...]

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound + 1e-9

    def to_dict(self) -> Dict:
        return {
            "distance": self.distance,
            "bound": self.bound,
            "holds": self.holds,
            "N_eff": len(self.groups),
            "groups": [list(g) for g in self.groups],
            "off_diagonal": list(self.off_diagonal),
        }


def superposition_macro_check(
    psi0: StateVector,
    psi1: StateVector,
    p: float,
    groups: Optional[Sequence[Sequence[int]]] = None,
) -> MacroCheck:
    """Noisy distance of (psi0 +- psi1)/sqrt(2) against the group bound prod_g q_g.

    Without explicit groups the finest grouping with perfectly
    distinguishing groups is used.
    """
    _check_orthogonal(psi0, psi1)
    if groups is None:
        groups = best_grouping(psi0, psi1, 0.0) or [tuple(range(psi0.n_qubits))]
    groups = tuple(tuple(g) for g in groups)
    distance = pairwise_noisy_distance(superposition(psi0, psi1, 1), superposition(psi0, psi1, -1), p)
    bound = macro_upper_bound_groups([len(g) for g in groups], p)
    off = tuple(off_diagonal_group_trace(psi0, psi1, g) for g in groups)
    return MacroCheck(distance, bound, groups, off)
