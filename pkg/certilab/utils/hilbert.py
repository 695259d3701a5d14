"""Dense linear-algebra substrate: states, density matrices, observables.

Basis convention: for an n-qubit register the computational-basis index of
|x_0 x_1 ... x_{n-1}> is sum_q x_q * 2**(n-1-q), i.e. qubit 0 is the most
significant bit and |0...0> is index 0. Every index map in the package is
written against this convention.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .errors import ArgumentError

logger = logging.getLogger(__name__)

ASSERT_TOL = 1e-10
BUILD_TOL = 1e-12

PAULI: Dict[str, np.ndarray] = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen_copy(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2 ** n != dim:
        raise ArgumentError(f"dimension {dim} is not a power of two >= 2")
    return n


def _check_qubits(qubits: Iterable[int], n: int) -> List[int]:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ArgumentError(f"qubit indices must be distinct, got {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise ArgumentError(f"qubit index {q} out of range for {n} qubits")
    return qubits


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over the 2^n computational basis"""
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_copy(np.asarray(self.amplitudes).reshape(-1))
        if self.n_qubits < 1:
            raise ArgumentError("a state needs at least one qubit")
        if amps.size != 2 ** self.n_qubits:
            raise ArgumentError(
                f"expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > BUILD_TOL:
            raise ArgumentError(f"state is not normalized (norm {norm:.15g})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ArgumentError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(_n_qubits_for(amps.size), amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def inner(self, other: "StateVector") -> complex:
        """<self|other>"""
        if other.n_qubits != self.n_qubits:
            raise ArgumentError("inner product of states with different qubit counts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector.from_amplitudes(np.kron(self.amplitudes, other.amplitudes))

    def canonical(self) -> "StateVector":
        """Same ray with the first nonzero amplitude real and positive"""
        amps = self.amplitudes
        idx = int(np.flatnonzero(np.abs(amps) > BUILD_TOL)[0])
        phase = amps[idx] / abs(amps[idx])
        return StateVector.from_amplitudes(amps / phase)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.projector())

    def allclose(self, other: "StateVector", atol: float = ASSERT_TOL) -> bool:
        return other.n_qubits == self.n_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0)
        )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite 2^n x 2^n matrix"""
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_copy(self.matrix)
        d = 2 ** self.n_qubits
        if self.n_qubits < 1 or m.shape != (d, d):
            raise ArgumentError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > BUILD_TOL:
            raise ArgumentError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > BUILD_TOL:
            raise ArgumentError(f"density matrix trace is {tr.real:.15g}, expected 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -ASSERT_TOL:
            raise ArgumentError(f"density matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix) -> "DensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        return cls(_n_qubits_for(m.shape[0]), m)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator together with its spectral radius"""
    n_qubits: int
    matrix: np.ndarray
    spectral_radius: float = field(init=False)

    def __post_init__(self):
        m = _frozen_copy(self.matrix)
        d = 2 ** self.n_qubits
        if self.n_qubits < 1 or m.shape != (d, d):
            raise ArgumentError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > BUILD_TOL * max(1.0, np.max(np.abs(m))):
            raise ArgumentError("observable is not Hermitian")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spectral_radius", float(np.max(np.abs(np.linalg.eigvalsh(m)))))

    @classmethod
    def from_matrix(cls, matrix) -> "Observable":
        m = np.asarray(matrix, dtype=complex)
        return cls(_n_qubits_for(m.shape[0]), m)

    def scaled(self, factor: float) -> "Observable":
        return Observable(self.n_qubits, self.matrix * factor)

    def rescaled(self) -> "Observable":
        """Copy normalized to unit spectral radius"""
        if self.spectral_radius == 0:
            raise ArgumentError("cannot rescale the zero observable")
        return self.scaled(1.0 / self.spectral_radius)


Operand = Union[DensityMatrix, np.ndarray]


def _matrix_of(x: Operand) -> np.ndarray:
    if isinstance(x, (DensityMatrix, Observable)):
        return x.matrix
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, tol: float = ASSERT_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * scale)


def eigendecompose_hermitian(m, tol: float = ASSERT_TOL):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix"""
    m = _matrix_of(m)
    if not is_hermitian(m, tol):
        raise ArgumentError("eigendecompose_hermitian needs a Hermitian matrix")
    return np.linalg.eigh((m + m.conj().T) / 2)


def trace_norm(m) -> float:
    """Sum of singular values, computed through the Hermitian eigensolver"""
    m = _matrix_of(m)
    if is_hermitian(m, BUILD_TOL):
        return float(np.sum(np.abs(eigendecompose_hermitian(m)[0])))
    # eigenvalues of [[0, M], [M^dagger, 0]] are +-s_i
    d = m.shape[0]
    dilation = np.zeros((2 * d, 2 * d), dtype=complex)
    dilation[:d, d:] = m
    dilation[d:, :d] = m.conj().T
    return float(np.sum(np.abs(eigendecompose_hermitian(dilation)[0]))) / 2


def trace_distance(rho: Operand, sigma: Operand) -> float:
    a, b = _matrix_of(rho), _matrix_of(sigma)
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.clip(0.5 * trace_norm(a - b), 0.0, 1.0))


def reduce_operator(m: np.ndarray, traced: Sequence[int], n: int) -> np.ndarray:
    """Partial trace of an arbitrary 2^n x 2^n operator over the given qubits"""
    traced = _check_qubits(traced, n)
    if not traced:
        return np.array(m, dtype=complex, copy=True)
    kept = [q for q in range(n) if q not in traced]
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for q in traced:
        cols[q] = rows[q]
    out = "".join(rows[q] for q in kept) + "".join(cols[q] for q in kept)
    t = np.asarray(m, dtype=complex).reshape([2] * (2 * n))
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(kept)
    return reduced.reshape(d, d)


def reinsert_maximally_mixed(reduced: np.ndarray, traced: Sequence[int], n: int) -> np.ndarray:
    """reduced (on the kept qubits, in order) tensored with I/2 on each traced qubit"""
    traced = _check_qubits(traced, n)
    if not traced:
        return np.array(reduced, dtype=complex, copy=True)
    kept = [q for q in range(n) if q not in traced]
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    subscripts = "".join(rows[q] for q in kept) + "".join(cols[q] for q in kept)
    operands = [np.asarray(reduced, dtype=complex).reshape([2] * (2 * len(kept)))]
    for q in traced:
        subscripts += "," + rows[q] + cols[q]
        operands.append(PAULI["I"] / 2)
    full = np.einsum(subscripts + "->" + "".join(rows) + "".join(cols), *operands)
    d = 2 ** n
    return full.reshape(d, d)


def partial_trace(rho: DensityMatrix, qubits: Iterable[int]) -> DensityMatrix:
    qubits = _check_qubits(qubits, rho.n_qubits)
    if len(qubits) >= rho.n_qubits:
        raise ArgumentError("partial_trace cannot trace out every qubit")
    return DensityMatrix(rho.n_qubits - len(qubits), reduce_operator(rho.matrix, qubits, rho.n_qubits))


def orthonormal_complement_matrix(psi: StateVector) -> np.ndarray:
    """2^n x (2^n - 1) matrix whose columns complete psi to an orthonormal basis"""
    d = psi.dim
    # Householder QR of [psi | I]: the first column of Q spans psi
    q, _ = np.linalg.qr(np.column_stack([psi.amplitudes, np.eye(d, dtype=complex)]), mode="reduced")
    basis = q[:, 1:d]
    overlap = np.max(np.abs(psi.amplitudes.conj() @ basis)) if d > 1 else 0.0
    if overlap > BUILD_TOL:
        raise ArgumentError(f"complement basis leaks onto psi ({overlap:.3g})")
    return basis


def orthonormal_complement_basis(psi: StateVector) -> List[StateVector]:
    basis = orthonormal_complement_matrix(psi)
    return [StateVector.from_amplitudes(basis[:, j]) for j in range(basis.shape[1])]


def expectation(obs: Union[Observable, np.ndarray], rho: Operand) -> float:
    """Tr(A rho); the imaginary part must vanish"""
    a, r = _matrix_of(obs), _matrix_of(rho)
    if a.shape != r.shape:
        raise ArgumentError(f"dimension mismatch: {a.shape} vs {r.shape}")
    value = np.trace(a @ r)
    if abs(value.imag) >= ASSERT_TOL:
        raise ArgumentError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def _check_unitary(u: np.ndarray, tol: float = BUILD_TOL):
    if u.shape != (2, 2):
        raise ArgumentError(f"local factors must be 2x2, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > tol:
        raise ArgumentError("local factor is not unitary")


def apply_local_unitary(psi: StateVector, unitaries: Sequence[np.ndarray]) -> StateVector:
    """(U_0 x ... x U_{n-1}) |psi>"""
    if len(unitaries) != psi.n_qubits:
        raise ArgumentError(f"expected {psi.n_qubits} local unitaries, got {len(unitaries)}")
    t = psi.amplitudes.reshape([2] * psi.n_qubits)
    for q, u in enumerate(unitaries):
        u = np.asarray(u, dtype=complex)
        _check_unitary(u)
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [q])), 0, q)
    return StateVector.from_amplitudes(t.reshape(-1))


def embed_operator(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n matrix of op acting on `qubits` (in op's tensor order)"""
    qubits = _check_qubits(qubits, n)
    k = len(qubits)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2 ** k, 2 ** k):
        raise ArgumentError(f"operator shape {op.shape} does not match {k} qubits")
    rest = [q for q in range(n) if q not in qubits]
    order = qubits + rest
    t = np.kron(op, np.eye(2 ** (n - k), dtype=complex)).reshape([2] * (2 * n))
    src = [order.index(q) for q in range(n)]
    d = 2 ** n
    return t.transpose(src + [n + s for s in src]).reshape(d, d)


def pauli_string_matrix(labels: str) -> np.ndarray:
    """Matrix of a Pauli string over "IXYZ", one letter per qubit"""
    n = len(labels)
    d = 2 ** n
    idx = np.arange(d)
    flip = 0
    phase = np.ones(d, dtype=complex)
    for q, label in enumerate(labels):
        bit = (idx >> (n - 1 - q)) & 1
        if label in "XY":
            flip |= 1 << (n - 1 - q)
        if label in "YZ":
            phase = phase * (1 - 2 * bit)
        if label == "Y":
            phase = phase * 1j
        elif label not in "IXZ":
            raise ArgumentError(f"unknown Pauli label {label!r}")
    m = np.zeros((d, d), dtype=complex)
    m[idx ^ flip, idx] = phase
    return m


def purity(rho: Operand) -> float:
    m = _matrix_of(rho)
    return float(np.real(np.trace(m @ m)))


def fidelity_with_pure(rho: Operand, psi: StateVector) -> float:
    """<psi|rho|psi>"""
    m = _matrix_of(rho)
    return float(np.real(np.vdot(psi.amplitudes, m @ psi.amplitudes)))


def von_neumann_entropy(rho: Operand) -> float:
    """Entropy in nats"""
    evals = eigendecompose_hermitian(_matrix_of(rho))[0]
    evals = evals[evals > BUILD_TOL]
    return float(-np.sum(evals * np.log(evals)))


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state"""
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector.from_amplitudes(amps)


def random_density_matrix(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    d = 2 ** n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(n, m / np.trace(m).real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction"""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_local_unitaries(n: int, rng: np.random.Generator) -> List[np.ndarray]:
    return [random_unitary(2, rng) for _ in range(n)]
