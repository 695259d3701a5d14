"""Pauli-basis Hamiltonians, their spectra, and the named constructions.

A PauliHamiltonian is a real linear combination of Pauli strings. Strings are
written one letter per qubit over "IXYZ", qubit 0 first.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from scipy.linalg import hadamard

from ..config import check_qubit_cap
from .errors import ArgumentError
from .hilbert import (
    BUILD_TOL,
    Observable,
    StateVector,
    _n_qubits_for,
    eigendecompose_hermitian,
    pauli_string_matrix,
)
from .states import GraphSpec

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-8
_DROP_TOL = 1e-14

# (left, right) -> (phase, product), single-qubit Pauli multiplication
_PRODUCT: Dict[Tuple[str, str], Tuple[complex, str]] = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def _multiply_words(a: str, b: str) -> Tuple[complex, str]:
    phase: complex = 1
    word = []
    for x, y in zip(a, b):
        f, label = _PRODUCT[(x, y)]
        phase *= f
        word.append(label)
    return phase, "".join(word)


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    labels: str

    def __post_init__(self):
        if not self.labels or any(c not in "IXYZ" for c in self.labels):
            raise ArgumentError(f"Pauli labels must be a nonempty string over 'IXYZ', got {self.labels!r}")
        if not math.isfinite(self.coefficient):
            raise ArgumentError(f"coefficient of {self.labels} is not finite")
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def weight(self) -> int:
        return sum(1 for c in self.labels if c != "I")

    def matrix(self) -> np.ndarray:
        return self.coefficient * pauli_string_matrix(self.labels)


@dataclass(frozen=True)
class PauliHamiltonian:
    """Real combination of Pauli strings; duplicate strings are merged on construction"""
    n_qubits: int
    terms: Tuple[PauliTerm, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ArgumentError("a Hamiltonian needs at least one qubit")
        merged: Dict[str, float] = {}
        for term in self.terms:
            if len(term.labels) != self.n_qubits:
                raise ArgumentError(f"term {term.labels} does not act on {self.n_qubits} qubits")
            merged[term.labels] = merged.get(term.labels, 0.0) + term.coefficient
        terms = tuple(PauliTerm(c, w) for w, c in sorted(merged.items()) if abs(c) > _DROP_TOL)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_dict(cls, n_qubits: int, coefficients: Mapping[str, complex]) -> "PauliHamiltonian":
        """Build from {labels: coefficient}; imaginary parts must cancel"""
        terms = []
        for labels, c in coefficients.items():
            c = complex(c)
            if abs(c.imag) > BUILD_TOL:
                raise ArgumentError(f"term {labels} has imaginary coefficient {c.imag:.3g}; operator is not Hermitian")
            terms.append(PauliTerm(c.real, labels))
        return cls(n_qubits, tuple(terms))

    @classmethod
    def from_records(cls, records: Iterable[Mapping], n_qubits: Optional[int] = None) -> "PauliHamiltonian":
        """Parse [{"coefficient": c, "labels": "XZI"}, ...]"""
        terms = []
        for record in records:
            try:
                labels = str(record.get("labels", record.get("label"))).upper()
                terms.append(PauliTerm(float(record["coefficient"]), labels))
            except (AttributeError, KeyError, TypeError, ValueError) as exc:
                raise ArgumentError(f"malformed Hamiltonian record {record!r}: {exc}") from None
        if not terms and n_qubits is None:
            raise ArgumentError("an empty Hamiltonian needs an explicit qubit count")
        n = n_qubits if n_qubits is not None else len(terms[0].labels)
        return cls(n, tuple(terms))

    @classmethod
    def from_matrix(cls, matrix, tol: float = BUILD_TOL) -> "PauliHamiltonian":
        """Pauli decomposition of a Hermitian matrix, coefficients Tr(sigma M) / 2^n.

        A Pauli string is a flip mask x and a sign mask z, with a factor i for
        every Y; all sign masks of one flip mask come out of a single
        Walsh-Hadamard transform.
        """
        m = np.asarray(matrix, dtype=complex)
        n = _n_qubits_for(m.shape[0])
        d = 2 ** n
        idx = np.arange(d)
        flipped = m[idx[:, None], idx[:, None] ^ idx[None, :]]
        sums = hadamard(d) @ flipped / d
        popcount = np.array([bin(i).count("1") for i in range(d)])
        coefficients = (1j ** popcount[idx[:, None] & idx[None, :]]) * sums
        labels = {}
        for z, x in np.argwhere(np.abs(coefficients) > tol):
            word = "".join(
                "IXZY"[((x >> (n - 1 - q)) & 1) + 2 * ((z >> (n - 1 - q)) & 1)] for q in range(n)
            )
            labels[word] = coefficients[z, x]
        return cls.from_dict(n, labels) if labels else cls(n)

    def to_records(self) -> List[Dict]:
        return [{"coefficient": t.coefficient, "labels": t.labels} for t in self.terms]

    @property
    def locality(self) -> int:
        return max((t.weight for t in self.terms), default=0)

    def as_dict(self) -> Dict[str, float]:
        return {t.labels: t.coefficient for t in self.terms}

    @cached_property
    def matrix(self) -> np.ndarray:
        d = 2 ** self.n_qubits
        out = np.zeros((d, d), dtype=complex)
        for term in self.terms:
            out += term.matrix()
        out.setflags(write=False)
        return out

    def to_observable(self) -> Observable:
        return Observable(self.n_qubits, self.matrix)

    def _check_same_size(self, other: "PauliHamiltonian"):
        if other.n_qubits != self.n_qubits:
            raise ArgumentError(f"cannot combine {self.n_qubits}- and {other.n_qubits}-qubit Hamiltonians")

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        self._check_same_size(other)
        return PauliHamiltonian(self.n_qubits, self.terms + other.terms)

    def __sub__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        return self + (-1.0) * other

    def __mul__(self, factor: float) -> "PauliHamiltonian":
        return PauliHamiltonian(self.n_qubits, tuple(PauliTerm(factor * t.coefficient, t.labels) for t in self.terms))

    __rmul__ = __mul__

    def __neg__(self) -> "PauliHamiltonian":
        return (-1.0) * self

    def __matmul__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        """Operator product; the result must again be Hermitian"""
        self._check_same_size(other)
        product: Dict[str, complex] = {}
        for a in self.terms:
            for b in other.terms:
                phase, word = _multiply_words(a.labels, b.labels)
                product[word] = product.get(word, 0) + phase * a.coefficient * b.coefficient
        return PauliHamiltonian.from_dict(self.n_qubits, product)


@dataclass(frozen=True, eq=False)
class SpectralInfo:
    ground_energy: float
    first_excited_energy: float
    gap: float
    ground_degeneracy: int
    ground_space: Tuple[StateVector, ...]

    def ground_projector(self) -> np.ndarray:
        return sum(v.projector() for v in self.ground_space)

    def to_dict(self) -> Dict:
        return {
            "ground_energy": self.ground_energy,
            "first_excited_energy": self.first_excited_energy,
            "gap": self.gap,
            "ground_degeneracy": self.ground_degeneracy,
        }


def _word(n: int, placed: Mapping[int, str]) -> str:
    labels = ["I"] * n
    for q, label in placed.items():
        labels[q] = label
    return "".join(labels)


def _check_n(N: int):
    if N < 1:
        raise ArgumentError(f"N must be at least 1, got {N}")


def identity(N: int, coefficient: float = 1.0) -> PauliHamiltonian:
    _check_n(N)
    return PauliHamiltonian(N, (PauliTerm(coefficient, "I" * N),))


def _collective(N: int, axis: str) -> PauliHamiltonian:
    _check_n(N)
    return PauliHamiltonian(N, tuple(PauliTerm(0.5, _word(N, {i: axis})) for i in range(N)))


def jz(N: int) -> PauliHamiltonian:
    """J_z = 1/2 sum_i Z_i"""
    return _collective(N, "Z")


def jx(N: int) -> PauliHamiltonian:
    return _collective(N, "X")


def jy(N: int) -> PauliHamiltonian:
    return _collective(N, "Y")


def j_squared(N: int) -> PauliHamiltonian:
    """J^2 = J_x^2 + J_y^2 + J_z^2, expanded into weight <= 2 terms"""
    return sum((j @ j for j in (jx(N), jy(N))), jz(N) @ jz(N))


def dicke_hamiltonian(N: int, k: int) -> PauliHamiltonian:
    """-J^2 + (J_z - (N/2 - k))^2, unique ground state |N,k> with gap 1"""
    _check_n(N)
    if not 0 <= k <= N:
        raise ArgumentError(f"Dicke excitation k must lie in 0..{N}, got {k}")
    shifted = jz(N) - identity(N, N / 2 - k)
    return -j_squared(N) + shifted @ shifted


def graph_hamiltonian(g: GraphSpec) -> PauliHamiltonian:
    """-sum_a K_a over the generating stabilizers of the graph state"""
    return PauliHamiltonian(
        g.n_vertices,
        tuple(PauliTerm(-1.0, g.stabilizer_labels(a)) for a in range(g.n_vertices)),
    )


def neg_jz_squared(N: int) -> PauliHamiltonian:
    """-J_z^2; ground space spanned by |0...0> and |1...1>"""
    z = jz(N)
    return -(z @ z)


def logical_ghz_hamiltonian(n_groups: int, m: int) -> PauliHamiltonian:
    """Negative sum of the N-1 generators fixing the logical GHZ pair.

    Generators are Z_i Z_{i+1} inside each block of m qubits and
    X^m X^m across neighbouring blocks. The ground space is two-fold and
    spanned by logical_ghz(n_groups, m, +1) and its sign-flipped partner.
    """
    if n_groups < 1 or m < 1:
        raise ArgumentError("logical GHZ needs n_groups >= 1 and m >= 1")
    N = n_groups * m
    terms = []
    for b in range(n_groups):
        start = b * m
        for i in range(start, start + m - 1):
            terms.append(PauliTerm(-1.0, _word(N, {i: "Z", i + 1: "Z"})))
        if b + 1 < n_groups:
            terms.append(PauliTerm(-1.0, _word(N, {q: "X" for q in range(start, start + 2 * m)})))
    return PauliHamiltonian(N, tuple(terms))


def spectral_info(h: PauliHamiltonian, tol: float = DEGENERACY_TOL) -> SpectralInfo:
    """Full diagonalization; eigenvalues within tol of E_0 count as ground states"""
    check_qubit_cap(h.n_qubits)
    evals, evecs = eigendecompose_hermitian(h.matrix)
    e0 = float(evals[0])
    ground = np.flatnonzero(evals <= e0 + tol)
    excited = evals[evals > e0 + tol]
    e1 = float(excited[0]) if excited.size else e0
    space = tuple(StateVector.from_amplitudes(evecs[:, j]).canonical() for j in ground)
    logger.debug("spectrum of %d-qubit H: E0=%g E1=%g degeneracy=%d", h.n_qubits, e0, e1, len(ground))
    return SpectralInfo(e0, e1, e1 - e0, len(ground), space)


def spectral_radius(h: PauliHamiltonian) -> float:
    check_qubit_cap(h.n_qubits)
    evals = eigendecompose_hermitian(h.matrix)[0]
    return float(max(abs(evals[0]), abs(evals[-1])))


def rescale_to_unit_spectral_radius(h: PauliHamiltonian) -> Tuple[PauliHamiltonian, float]:
    """(h / r, r) with r the exact spectral radius"""
    r = spectral_radius(h)
    if r <= BUILD_TOL:
        raise ArgumentError("cannot rescale the zero operator")
    return (1.0 / r) * h, r


def pad_to_uniform_weight(h: PauliHamiltonian, k: Optional[int] = None) -> PauliHamiltonian:
    """Append k ancilla qubits so every term has weight exactly k.

    A term of weight w gets Z on the first k - w ancillas and I on the rest;
    with the ancillas in |0...0> every expectation value is unchanged.
    """
    k = h.locality if k is None else k
    if k < h.locality or k < 1:
        raise ArgumentError(f"padding weight {k} is below the locality {h.locality}")
    terms = tuple(
        PauliTerm(t.coefficient, t.labels + "Z" * (k - t.weight) + "I" * t.weight) for t in h.terms
    )
    return PauliHamiltonian(h.n_qubits + k, terms)


def damped(h: PauliHamiltonian, p: float) -> PauliHamiltonian:
    """Heisenberg-picture image under local depolarizing noise: each term times p^weight"""
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"p must lie in [0, 1], got {p}")
    return PauliHamiltonian(h.n_qubits, tuple(PauliTerm(t.coefficient * p ** t.weight, t.labels) for t in h.terms))
