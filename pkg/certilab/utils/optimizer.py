"""Multi-start descent on the unit sphere of the orthogonal complement.

The objective is f(u) = D[E(psi), E(V u)] where the columns of V span the
complement of psi. The trace norm is nonsmooth, so each restart combines an
Armijo line search along the projected subgradient with a diminishing
fallback step, and keeps the best point it has seen.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channels import apply_to_operator
from .errors import ArgumentError
from .hilbert import StateVector, eigendecompose_hermitian, orthonormal_complement_matrix, pauli_string_matrix
from .pool import run_ordered

logger = logging.getLogger(__name__)

SIGN_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 32
    max_evaluations: int = 50_000
    rel_tol: float = 1e-9
    window: int = 20
    armijo: float = 1e-4
    initial_step: float = 0.5
    max_backtracks: int = 30
    gradient_tol: float = 1e-12
    seed: int = 0
    jobs: int = 1
    # share of restarts reserved for Haar-random starts
    random_fraction: float = 0.25

    def __post_init__(self):
        if self.restarts < 1:
            raise ArgumentError("restarts must be at least 1")
        if self.max_evaluations < self.restarts:
            raise ArgumentError("max_evaluations must allow one evaluation per restart")
        if self.window < 1 or self.rel_tol < 0:
            raise ArgumentError("window must be positive and rel_tol nonnegative")
        if not 0.0 <= self.random_fraction <= 1.0:
            raise ArgumentError("random_fraction must lie in [0, 1]")

    @classmethod
    def from_dict(cls, raw: Optional[dict], **overrides) -> "OptimizerOptions":
        values = dict(raw or {})
        values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ArgumentError(f"unknown optimizer options: {sorted(unknown)}")
        return cls(**values)

    @property
    def budget_per_restart(self) -> int:
        return self.max_evaluations // self.restarts


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    value: float
    u: np.ndarray
    iterations: int
    evaluations: int
    gradient_norm: float
    converged: bool
    seeded: bool


@dataclass(frozen=True)
class OptimizerReport:
    restarts: int
    iterations: int
    evaluations: int
    final_gradient_norm: float
    converged: bool
    best_restart: int
    converged_restarts: int

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "final_gradient_norm": self.final_gradient_norm,
            "converged": self.converged,
            "best_restart": self.best_restart,
            "converged_restarts": self.converged_restarts,
        }


class ComplementObjective:
    """Noisy trace distance between psi and states in its orthogonal complement"""

    def __init__(self, psi: StateVector, p: float):
        self.psi = psi
        self.p = p
        self.basis = orthonormal_complement_matrix(psi)
        self.target = apply_to_operator(psi.projector(), p)

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def state(self, u: np.ndarray) -> np.ndarray:
        return self.basis @ u

    def value_and_gradient(self, u: np.ndarray) -> Tuple[float, np.ndarray]:
        """f(u) and the Euclidean subgradient w.r.t. Re<g, du>"""
        phi = self.basis @ u
        delta = self.target - apply_to_operator(np.outer(phi, phi.conj()), self.p)
        evals, evecs = eigendecompose_hermitian(delta)
        signs = np.where(np.abs(evals) < SIGN_TOL, 0.0, np.sign(evals))
        value = 0.5 * float(np.sum(np.abs(evals)))
        # E is self-adjoint, so d f = -Re<V^dag E(S) phi, du>
        s = (evecs * signs) @ evecs.conj().T
        g = -(self.basis.conj().T @ (apply_to_operator(s, self.p) @ phi))
        return min(value, 1.0), g

    def project(self, v: np.ndarray) -> Optional[np.ndarray]:
        u = self.basis.conj().T @ v
        norm = np.linalg.norm(u)
        if norm < 1e-8:
            return None
        return u / norm


def _tangent(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.real(np.vdot(u, g)) * u


def seed_vectors(psi: StateVector, candidates: Sequence[StateVector] = ()) -> List[np.ndarray]:
    """Caller candidates, then global X and Z flips of psi, then single-qubit flips
    alternating X and Z per qubit, then basis states
    """
    n = psi.n_qubits
    amps = psi.amplitudes
    vectors = [c.amplitudes for c in candidates]
    vectors.append(pauli_string_matrix("X" * n) @ amps)
    vectors.append(pauli_string_matrix("Z" * n) @ amps)
    for q in range(n):
        for label in "XZ":
            vectors.append(pauli_string_matrix("I" * q + label + "I" * (n - q - 1)) @ amps)
    eye = np.eye(2 ** n, dtype=complex)
    vectors.extend(eye[:, j] for j in range(2 ** n))
    return vectors


def _descend(objective: ComplementObjective, u: np.ndarray, budget: int, opts: OptimizerOptions):
    value, g = objective.value_and_gradient(u)
    evaluations = 1
    best_value, best_u = value, u
    history = [value]
    step = opts.initial_step
    iterations = 0
    converged = False
    grad_norm = float(np.linalg.norm(_tangent(u, g)))

    while evaluations < budget:
        d = _tangent(u, g)
        grad_norm = float(np.linalg.norm(d))
        if grad_norm < opts.gradient_tol:
            converged = True
            break
        accepted = False
        t = min(2 * step, 1.0)
        for _ in range(opts.max_backtracks):
            if evaluations >= budget:
                break
            trial = u - t * d
            trial = trial / np.linalg.norm(trial)
            trial_value, trial_g = objective.value_and_gradient(trial)
            evaluations += 1
            if trial_value <= value - opts.armijo * t * grad_norm ** 2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if evaluations >= budget:
                break
            # kink: take a diminishing normalized subgradient step
            t = opts.initial_step / (iterations + 1)
            trial = u - t * d / grad_norm
            trial = trial / np.linalg.norm(trial)
            trial_value, trial_g = objective.value_and_gradient(trial)
            evaluations += 1
        step = t
        u, value, g = trial, trial_value, trial_g
        iterations += 1
        if value < best_value:
            best_value, best_u = value, u
        history.append(best_value)
        if len(history) > opts.window:
            old = history[-opts.window - 1]
            if old - best_value <= opts.rel_tol * max(old, 1e-300):
                converged = True
                break

    return best_value, best_u, iterations, evaluations, grad_norm, converged


def minimize_over_complement(
    psi: StateVector,
    p: float,
    opts: OptimizerOptions = OptimizerOptions(),
    candidates: Sequence[StateVector] = (),
) -> Tuple[float, StateVector, OptimizerReport, List[RestartOutcome]]:
    """Best D[E(psi), E(phi)] over phi orthogonal to psi found by multi-start descent"""
    objective = ComplementObjective(psi, p)
    budget = opts.budget_per_restart
    seeded_limit = opts.restarts - int(round(opts.random_fraction * opts.restarts))
    if candidates:
        seeded_limit = max(seeded_limit, min(len(candidates), opts.restarts))

    starts: List[Optional[np.ndarray]] = []
    for v in seed_vectors(psi, candidates):
        if len(starts) >= seeded_limit:
            break
        u = objective.project(v)
        if u is not None and not any(s is not None and abs(abs(np.vdot(s, u)) - 1) < 1e-12 for s in starts):
            starts.append(u)
    starts.extend([None] * (opts.restarts - len(starts)))

    def run(task) -> RestartOutcome:
        index, start = task
        seeded = start is not None
        if start is None:
            rng = np.random.default_rng([opts.seed, index])
            start = rng.normal(size=objective.dimension) + 1j * rng.normal(size=objective.dimension)
            start = start / np.linalg.norm(start)
        value, u, iterations, evaluations, grad_norm, converged = _descend(objective, start, budget, opts)
        logger.debug(
            "restart %d (%s): value=%.12g iterations=%d evaluations=%d converged=%s",
            index, "seeded" if seeded else "random", value, iterations, evaluations, converged,
        )
        return RestartOutcome(index, value, u, iterations, evaluations, grad_norm, converged, seeded)

    outcomes = run_ordered(run, list(enumerate(starts)), opts.jobs)
    best = min(outcomes, key=lambda o: (o.value, o.index))
    phi = StateVector.from_amplitudes(objective.state(best.u)).canonical()
    report = OptimizerReport(
        restarts=len(outcomes),
        iterations=sum(o.iterations for o in outcomes),
        evaluations=sum(o.evaluations for o in outcomes),
        final_gradient_norm=best.gradient_norm,
        converged=best.converged,
        best_restart=best.index,
        converged_restarts=sum(o.converged for o in outcomes),
    )
    if not report.converged:
        logger.warning("optimizer did not converge on the best restart (%d)", best.index)
    return best.value, phi, report, outcomes
