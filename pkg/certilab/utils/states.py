"""Constructors for the state families under study.

Every constructor returns a StateVector whose first nonzero amplitude is real
and positive.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import FrozenSet, List, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import ArgumentError
from .hilbert import PAULI, Observable, StateVector, embed_operator, pauli_string_matrix

logger = logging.getLogger(__name__)


def _check_n(N: int):
    if N < 1:
        raise ArgumentError(f"N must be at least 1, got {N}")


def _basis_index(bits: Sequence[int]) -> int:
    return int("".join(str(b) for b in bits), 2)


def _repeat_block(block: Sequence[int], copies: int) -> int:
    return _basis_index(list(block) * copies)


def superposition(psi0: StateVector, psi1: StateVector, sign: complex = 1) -> StateVector:
    """(psi0 + sign*psi1) normalized"""
    return StateVector.from_amplitudes(psi0.amplitudes + sign * psi1.amplitudes).canonical()


@dataclass(frozen=True)
class GraphSpec:
    """Undirected simple graph on vertices 0..n_vertices-1"""
    n_vertices: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ArgumentError("a graph needs at least one vertex")
        normalized = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ArgumentError(f"self-loop on vertex {a}")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ArgumentError(f"edge ({a}, {b}) out of range")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "GraphSpec":
        return cls(n_vertices, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "GraphSpec":
        mapping = {v: i for i, v in enumerate(sorted(graph.nodes))}
        return cls(graph.number_of_nodes(), frozenset((mapping[a], mapping[b]) for a, b in graph.edges))

    @classmethod
    def named(cls, kind: str, n: int) -> "GraphSpec":
        builders = {
            "line": nx.path_graph,
            "ring": nx.cycle_graph,
            "star": nx.star_graph,
            "complete": nx.complete_graph,
            "empty": nx.empty_graph,
        }
        if kind not in builders:
            raise ArgumentError(f"unknown graph kind {kind!r}; choose from {sorted(builders)}")
        # star_graph(k) has k+1 nodes
        graph = builders[kind](n - 1 if kind == "star" else n)
        return cls.from_networkx(graph)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges)
        return graph

    def neighbourhood(self, a: int) -> List[int]:
        return sorted(self.to_networkx().neighbors(a))

    def max_degree(self) -> int:
        return max((d for _, d in self.to_networkx().degree), default=0)

    def stabilizer_labels(self, a: int) -> str:
        """K_a = X_a prod_{b in N(a)} Z_b as a Pauli string"""
        labels = ["I"] * self.n_vertices
        labels[a] = "X"
        for b in self.neighbourhood(a):
            labels[b] = "Z"
        return "".join(labels)


def product_zero(N: int) -> StateVector:
    _check_n(N)
    amps = np.zeros(2 ** N, dtype=complex)
    amps[0] = 1.0
    return StateVector(N, amps)


def plus_product(N: int) -> StateVector:
    _check_n(N)
    return StateVector.from_amplitudes(np.ones(2 ** N))


def ghz(N: int, sign: int = 1) -> StateVector:
    """(|0...0> + sign|1...1>)/sqrt(2)"""
    _check_n(N)
    if sign not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {sign}")
    amps = np.zeros(2 ** N, dtype=complex)
    amps[0] += 1.0
    amps[-1] += sign
    return StateVector.from_amplitudes(amps)


def dicke(N: int, k: int) -> StateVector:
    """Equal superposition of all basis states with Hamming weight k"""
    _check_n(N)
    if not 0 <= k <= N:
        raise ArgumentError(f"Dicke excitation k must lie in 0..{N}, got {k}")
    amps = np.zeros(2 ** N, dtype=complex)
    for ones in itertools.combinations(range(N), k):
        amps[sum(1 << (N - 1 - q) for q in ones)] = 1.0
    return StateVector.from_amplitudes(amps)


def w_state(N: int) -> StateVector:
    return dicke(N, 1)


def inverted_w_state(N: int) -> StateVector:
    return dicke(N, N - 1)


def graph_state(g: GraphSpec) -> StateVector:
    """prod_{(a,b) in E} CZ_ab |+>^N"""
    n = g.n_vertices
    idx = np.arange(2 ** n)
    signs = np.ones(2 ** n)
    for a, b in g.edges:
        both = ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
        signs = signs * (1 - 2 * both)
    return StateVector.from_amplitudes(signs)


def graph_superposition(g: GraphSpec, sign: int = 1) -> StateVector:
    """(|G> + sign Z^N |G>) normalized"""
    state = graph_state(g)
    flipped = StateVector.from_amplitudes(pauli_string_matrix("Z" * g.n_vertices) @ state.amplitudes)
    return superposition(state, flipped, sign)


def _check_blocks(N: int, m: int) -> int:
    _check_n(N)
    if m < 1 or N % m != 0:
        raise ArgumentError(f"N={N} is not divisible into blocks of m={m}")
    return N // m


def phase_family(N: int, m: int, k: int) -> StateVector:
    """2^{-m/2} sum_j exp(2 pi i j k / 2^m) |j>^{N/m}, j over m-qubit basis labels"""
    _check_n(N)
    if m < 1 or N % m != 0:
        raise ArgumentError(f"N={N} must be a multiple of m={m}")
    copies = N // m
    M = 2 ** m
    if not 1 <= k <= M:
        raise ArgumentError(f"k must lie in 1..{M}, got {k}")
    amps = np.zeros(2 ** N, dtype=complex)
    for j in range(M):
        bits = [(j >> (m - 1 - b)) & 1 for b in range(m)]
        amps[_repeat_block(bits, copies)] = np.exp(2j * np.pi * j * k / M)
    return StateVector.from_amplitudes(amps).canonical()


def ghz_product_family(N: int, m: int, bits: Sequence[int]) -> StateVector:
    """GHZ^{k_1}_{N/m} x ... x GHZ^{k_m}_{N/m}"""
    size = _check_blocks(N, m)
    if len(bits) != m or any(b not in (0, 1) for b in bits):
        raise ArgumentError(f"bits must be {m} values in {{0, 1}}, got {list(bits)}")
    blocks = [ghz(size, (-1) ** b).amplitudes for b in bits]
    return StateVector.from_amplitudes(reduce(np.kron, blocks))


def logical_ghz_branches(n_groups: int, m: int) -> Tuple[StateVector, StateVector]:
    """|0_L>^n and |1_L>^n with |0_L>, |1_L> = GHZ^{+-} on m qubits"""
    if n_groups < 1:
        raise ArgumentError("logical GHZ needs at least one group")
    zero_l = ghz(m, 1).amplitudes
    one_l = ghz(m, -1).amplitudes
    return (
        StateVector.from_amplitudes(reduce(np.kron, [zero_l] * n_groups)),
        StateVector.from_amplitudes(reduce(np.kron, [one_l] * n_groups)),
    )


def logical_ghz(n_groups: int, m: int, sign: int = 1) -> StateVector:
    """(|0_L>^n + sign|1_L>^n)/sqrt(2)"""
    branch0, branch1 = logical_ghz_branches(n_groups, m)
    return superposition(branch0, branch1, sign)


def counterexample_witness(N: int) -> Observable:
    """sum over pairs (0,1), (2,3), ... of Z Z"""
    zz = np.kron(PAULI["Z"], PAULI["Z"])
    return Observable(N, sum(embed_operator(zz, [i, i + 1], N) for i in range(0, N, 2)))


def counterexample_states(N: int):
    """psi, phi1, phi2, xi1, xi2 and the pairwise ZZ witness.

    psi is confusable with (phi1+phi2)/sqrt(2) but separated from phi1 by the
    witness; psi is confusable with xi1 and xi2 but (xi1+xi2)/sqrt(2) = phi1.
    """
    if N < 2 or N % 2:
        raise ArgumentError(f"the counterexample needs an even N >= 2, got {N}")
    copies = N // 2
    blocks = {label: _repeat_block(bits, copies) for label, bits in
              {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}.items()}

    def combine(weights) -> StateVector:
        amps = np.zeros(2 ** N, dtype=complex)
        for label, w in weights.items():
            amps[blocks[label]] += w
        return StateVector.from_amplitudes(amps)

    psi = combine({"00": 1, "01": 1, "10": 1, "11": 1})
    phi1 = combine({"00": 1, "11": -1})
    phi2 = combine({"01": 1, "10": -1})
    xi1 = StateVector.from_amplitudes((phi1.amplitudes + phi2.amplitudes) / np.sqrt(2))
    xi2 = StateVector.from_amplitudes((phi1.amplitudes - phi2.amplitudes) / np.sqrt(2))
    return psi, phi1, phi2, xi1, xi2, counterexample_witness(N)
