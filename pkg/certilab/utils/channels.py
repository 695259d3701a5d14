"""Local depolarizing noise per qubit, per group, and the correction map.

All maps act on plain operators (numpy arrays) first; the DensityMatrix
wrappers validate their output. Qubit indices are 0-based, qubit 0 being the
most significant bit.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, CapExceededError
from .hilbert import (
    ASSERT_TOL,
    DensityMatrix,
    _check_qubits,
    _matrix_of,
    _n_qubits_for,
    pauli_string_matrix,
    random_density_matrix,
    reduce_operator,
    reinsert_maximally_mixed,
)

logger = logging.getLogger(__name__)

CHOI_MAX_QUBITS = 4
KRAUS_MAX_QUBITS = 5

Channel = Callable[[np.ndarray], np.ndarray]


def _check_probability(p: float, name: str = "p"):
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit retention probability p and an optional partition into groups"""
    p: float
    grouping: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __post_init__(self):
        _check_probability(self.p)
        if self.grouping is not None:
            groups = tuple(tuple(sorted(int(q) for q in g)) for g in self.grouping)
            if any(not g for g in groups):
                raise ArgumentError("groups must be nonempty")
            flat = [q for g in groups for q in g]
            if len(flat) != len(set(flat)):
                raise ArgumentError("groups must be disjoint")
            object.__setattr__(self, "grouping", groups)

    @classmethod
    def from_gamma_t(cls, gamma: float, t: float, grouping=None) -> "NoiseModel":
        if gamma < 0 or t < 0:
            raise ArgumentError("gamma and t must be nonnegative")
        return cls(math.exp(-gamma * t), grouping)

    def check_covers(self, n: int):
        if self.grouping is None:
            return
        flat = sorted(q for g in self.grouping for q in g)
        if flat != list(range(n)):
            raise ArgumentError(f"grouping does not partition qubits 0..{n - 1}")

    def group_retention(self, group: Sequence[int]) -> float:
        """q = 1 - (1 - p)^m for a group of m qubits"""
        return 1.0 - (1.0 - self.p) ** len(group)


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex, copy=True) for k in self.operators)
        if not ops:
            raise ArgumentError("a Kraus set needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape or shape[0] != shape[1] for k in ops):
            raise ArgumentError("Kraus operators must be square and of equal dimension")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        deviation = np.max(np.abs(self.completeness() - np.eye(shape[0])))
        if deviation > ASSERT_TOL:
            raise ArgumentError(f"Kraus operators are not trace preserving (deviation {deviation:.3g})")

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)

    def apply(self, rho) -> np.ndarray:
        m = _matrix_of(rho)
        return sum(k @ m @ k.conj().T for k in self.operators)


def _depolarize_one(m: np.ndarray, n: int, qubit: int, p: float) -> np.ndarray:
    """p*m + (1-p) Tr_q(m) x I/2 on qubit q of a 2^n operator"""
    left, right = 2 ** qubit, 2 ** (n - qubit - 1)
    r = m.reshape(left, 2, right, left, 2, right)
    traced = r[:, 0, :, :, 0, :] + r[:, 1, :, :, 1, :]
    out = p * r
    out[:, 0, :, :, 0, :] += (1 - p) / 2 * traced
    out[:, 1, :, :, 1, :] += (1 - p) / 2 * traced
    return out.reshape(m.shape)


def _depolarize_qubits(m: np.ndarray, qubits: Sequence[int], p: float) -> np.ndarray:
    n = _n_qubits_for(m.shape[0])
    out = np.array(m, dtype=complex, copy=True)
    if p == 1.0:
        return out
    for q in qubits:
        out = _depolarize_one(out, n, q, p)
    return out


def depolarize_qubit(rho: DensityMatrix, i: int, p: float) -> DensityMatrix:
    _check_probability(p)
    _check_qubits([i], rho.n_qubits)
    return DensityMatrix(rho.n_qubits, _depolarize_qubits(rho.matrix, [i], p))


def depolarize_all(rho: DensityMatrix, p: float) -> DensityMatrix:
    _check_probability(p)
    return DensityMatrix(rho.n_qubits, _depolarize_qubits(rho.matrix, range(rho.n_qubits), p))


def apply_to_operator(op, p: float) -> np.ndarray:
    """Linear extension of depolarize_all to any 2^n x 2^n operator"""
    _check_probability(p)
    m = _matrix_of(op)
    n = _n_qubits_for(m.shape[0])
    return _depolarize_qubits(m, range(n), p)


def _group_depolarize_operator(m: np.ndarray, group: Sequence[int], q: float) -> np.ndarray:
    n = _n_qubits_for(m.shape[0])
    group = _check_qubits(group, n)
    if not group:
        raise ArgumentError("group must be nonempty")
    if len(group) == n:
        replaced = np.trace(m) * np.eye(2 ** n, dtype=complex) / 2 ** n
    else:
        replaced = reinsert_maximally_mixed(reduce_operator(m, group, n), group, n)
    return q * m + (1 - q) * replaced


def group_depolarize(rho: DensityMatrix, group: Sequence[int], q: float) -> DensityMatrix:
    """q*rho + (1-q) (Tr_group rho) x (I/2)^{x m}"""
    _check_probability(q, "q")
    return DensityMatrix(rho.n_qubits, _group_depolarize_operator(rho.matrix, group, q))


def group_depolarize_operator(op, group: Sequence[int], q: float) -> np.ndarray:
    _check_probability(q, "q")
    return _group_depolarize_operator(_matrix_of(op), group, q)


def _correction_norm(m: int, p: float) -> float:
    if not 0.0 < p <= 1.0:
        raise ArgumentError(f"the correction map needs p in (0, 1], got {p}")
    if m < 1:
        raise ArgumentError("the correction map needs at least one qubit")
    return 1.0 - (1.0 - p) ** m


def _correction_operator(x: np.ndarray, p: float, qubits: Optional[Sequence[int]] = None) -> np.ndarray:
    """Correction map on the given qubits (default: all) of operator x"""
    n = _n_qubits_for(x.shape[0])
    qubits = list(range(n)) if qubits is None else _check_qubits(qubits, n)
    m = len(qubits)
    norm = _correction_norm(m, p)
    out = np.zeros_like(x, dtype=complex)
    for k in range(m):
        weight = p ** (m - k) * (1 - p) ** k / norm
        if weight == 0.0:
            continue
        for subset in itertools.combinations(qubits, k):
            if not subset:
                out += weight * x
            else:
                out += weight * reinsert_maximally_mixed(reduce_operator(x, subset, n), subset, n)
    return out


def correction_map(rho: DensityMatrix, p: float) -> DensityMatrix:
    return DensityMatrix(rho.n_qubits, _correction_operator(rho.matrix, p))


def correction_map_operator(op, p: float, qubits: Optional[Sequence[int]] = None) -> np.ndarray:
    return _correction_operator(_matrix_of(op), p, qubits)


def correction_coefficient(m: int, k: int, p: float) -> float:
    """Kraus weight c_j for a term that touches k of the m qubits"""
    return p ** (m - k) * (1 - p) ** k / (4 ** k * _correction_norm(m, p))


def correction_map_kraus(m: int, p: float) -> KrausSet:
    """Operator-sum form sqrt(c_j) sigma_{j1}^{(i1)}...sigma_{jk}^{(ik)} of the correction map"""
    _correction_norm(m, p)
    if m > KRAUS_MAX_QUBITS:
        raise CapExceededError(f"Kraus enumeration for m={m} is too large")
    operators = []
    for k in range(m):
        c = correction_coefficient(m, k, p)
        if c == 0.0:
            continue
        for subset in itertools.combinations(range(m), k):
            for labels in itertools.product("IXYZ", repeat=k):
                word = ["I"] * m
                for q, label in zip(subset, labels):
                    word[q] = label
                operators.append(math.sqrt(c) * pauli_string_matrix("".join(word)))
    logger.debug("correction map m=%d p=%g: %d Kraus operators", m, p, len(operators))
    return KrausSet(tuple(operators))


def apply_noise_model(rho: DensityMatrix, model: NoiseModel) -> DensityMatrix:
    """Whole-register noise; with a grouping, applied in the factorized form (E~ o E_g) per group"""
    if model.grouping is None:
        return depolarize_all(rho, model.p)
    model.check_covers(rho.n_qubits)
    m = rho.matrix
    for group in model.grouping:
        m = _group_depolarize_operator(m, group, model.group_retention(group))
        if model.p > 0:
            m = _correction_operator(m, model.p, group)
        else:
            m = _depolarize_qubits(m, group, 0.0)
    return DensityMatrix(rho.n_qubits, m)


def transpose_map(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).T.copy()


def choi_matrix(channel: Channel, m: int) -> np.ndarray:
    """sum_ij |i><j| x channel(|i><j|) on m qubits"""
    if m > CHOI_MAX_QUBITS:
        raise CapExceededError(f"Choi matrices are limited to {CHOI_MAX_QUBITS} qubits, got {m}")
    if m < 1:
        raise ArgumentError("Choi matrix needs at least one qubit")
    d = 2 ** m
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            choi[i * d:(i + 1) * d, j * d:(j + 1) * d] = channel(unit)
    return choi


def is_completely_positive(channel: Channel, m: int, tol: float = 1e-9) -> bool:
    choi = choi_matrix(channel, m)
    return bool(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0] >= -tol)


def depolarizing_channel(p: float) -> Channel:
    _check_probability(p)
    return lambda x: apply_to_operator(x, p)


def correction_channel(p: float) -> Channel:
    _correction_norm(1, p)
    return lambda x: correction_map_operator(x, p)


def kraus_channel(kraus: KrausSet) -> Channel:
    return kraus.apply


def factorized_noise(op, p: float, groups: Sequence[Sequence[int]]) -> np.ndarray:
    """(E~ o E_g) applied group by group to an arbitrary operator"""
    m = _matrix_of(op)
    for group in groups:
        q = 1.0 - (1.0 - p) ** len(group)
        m = _correction_operator(_group_depolarize_operator(m, group, q), p, group)
    return m


@dataclass(frozen=True)
class ChannelCheck:
    m: int
    p: float
    n_kraus: int
    completeness_deviation: float
    kraus_deviation: float
    factorization_deviation: float
    choi_min_eigenvalue: Optional[float] = None

    @property
    def passed(self) -> bool:
        deviations = (self.completeness_deviation, self.kraus_deviation, self.factorization_deviation)
        cp = self.choi_min_eigenvalue is None or self.choi_min_eigenvalue >= -1e-9
        return max(deviations) <= ASSERT_TOL and cp

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "p": self.p,
            "n_kraus": self.n_kraus,
            "completeness_deviation": self.completeness_deviation,
            "kraus_deviation": self.kraus_deviation,
            "factorization_deviation": self.factorization_deviation,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "passed": self.passed,
        }


def verify_correction_map(m: int, p: float, rng: np.random.Generator, samples: int = 100) -> ChannelCheck:
    """Check the Kraus form of the correction map on m qubits against its definition.

    Compares Kraus and direct application on random density matrices, checks
    the Choi matrix when m is small enough, and checks that two groups of m
    qubits under (E~ o E_g) reproduce plain depolarizing noise.
    """
    if samples < 1:
        raise ArgumentError("samples must be positive")
    kraus = correction_map_kraus(m, p)
    completeness = float(np.max(np.abs(kraus.completeness() - np.eye(2 ** m))))
    kraus_dev = 0.0
    for _ in range(samples):
        rho = random_density_matrix(m, rng)
        kraus_dev = max(kraus_dev, float(np.max(np.abs(kraus.apply(rho) - correction_map_operator(rho, p)))))
    choi_min = None
    if m <= CHOI_MAX_QUBITS:
        choi = choi_matrix(kraus_channel(kraus), m)
        choi_min = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0])

    n = 2 * m
    model = NoiseModel(p, (tuple(range(m)), tuple(range(m, n))))
    rho = random_density_matrix(n, rng)
    factor_dev = float(np.max(np.abs(apply_noise_model(rho, model).matrix - depolarize_all(rho, p).matrix)))
    check = ChannelCheck(m, p, len(kraus.operators), completeness, kraus_dev, factor_dev, choi_min)
    logger.info("correction map m=%d p=%g passed=%s", m, p, check.passed)
    return check
