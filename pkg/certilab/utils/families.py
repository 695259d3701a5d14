"""Named state and Hamiltonian families addressable from scenario files.

A family maps a system size N to a state, an orthogonal partner, optional
member lists, branches, Hamiltonians and closed-form bounds. Families are
looked up with get_family(name, params).
"""
import itertools
import logging
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .certify import (
    macro_upper_bound,
    pairwise_noisy_distance,
    projector_lower_bound,
    ground_state_bound,
    witness_lower_bound,
)
from .confuse import effective_size
from .errors import ArgumentError
from .hamiltonians import (
    PauliHamiltonian,
    dicke_hamiltonian,
    graph_hamiltonian,
    j_squared,
    jz,
    logical_ghz_hamiltonian,
    neg_jz_squared,
    spectral_info,
)
from .hilbert import Observable, StateVector, pauli_string_matrix
from .states import (
    GraphSpec,
    counterexample_states,
    dicke,
    ghz,
    ghz_product_family,
    graph_state,
    graph_superposition,
    inverted_w_state,
    logical_ghz,
    logical_ghz_branches,
    phase_family,
    product_zero,
    superposition,
    w_state,
)

logger = logging.getLogger(__name__)


class Params:
    """Scenario parameters consumed one by one; leftovers are an error"""

    def __init__(self, family: str, raw: Optional[Mapping]):
        self.family = family
        self.raw = dict(raw or {})
        self.used: Dict = {}

    def take(self, key: str, default=None, cast: Callable = int):
        if key not in self.raw:
            if default is not None:
                self.used[key] = default
            return default
        try:
            value = cast(self.raw[key])
        except (TypeError, ValueError):
            raise ArgumentError(f"parameter {key!r} of {self.family} is invalid: {self.raw[key]!r}") from None
        self.used[key] = value
        return value

    def finish(self) -> Dict:
        unknown = set(self.raw) - set(self.used)
        if unknown:
            raise ArgumentError(f"unknown parameters for {self.family}: {sorted(unknown)}")
        return dict(self.used)


class StateFamily:
    def __init__(
        self,
        name: str,
        params: Dict,
        state: Callable[[int], StateVector],
        partner: Optional[Callable[[int], StateVector]] = None,
        members: Optional[Callable[[int], List[StateVector]]] = None,
        branches: Optional[Callable[[int], Tuple[StateVector, StateVector]]] = None,
        hamiltonian: Optional[Callable[[int], PauliHamiltonian]] = None,
        witness: Optional[Callable[[int], Observable]] = None,
        lower_bounds: Optional[Callable[[int, float], Dict[str, float]]] = None,
        upper_bounds: Optional[Callable[[int, float], Dict[str, float]]] = None,
        min_n: int = 1,
        step: int = 1,
        fixed_n: Optional[int] = None,
    ):
        self.name = name
        self.params = params
        self._state = state
        self._partner = partner
        self._members = members
        self._branches = branches
        self._hamiltonian = hamiltonian
        self._witness = witness
        self._lower = lower_bounds
        self._upper = upper_bounds
        self.min_n = min_n
        self.step = step
        self.fixed_n = fixed_n

    def check_n(self, N: int):
        if self.fixed_n is not None and N != self.fixed_n:
            raise ArgumentError(f"{self.name} is defined for N={self.fixed_n} only, got {N}")
        if N < self.min_n or N % self.step:
            raise ArgumentError(f"{self.name} needs N >= {self.min_n} and a multiple of {self.step}, got {N}")

    def _require(self, builder, what: str, N: int):
        if builder is None:
            raise ArgumentError(f"family {self.name} defines no {what}")
        self.check_n(N)
        return builder(N)

    def state(self, N: int) -> StateVector:
        self.check_n(N)
        return self._state(N)

    def partner(self, N: int) -> StateVector:
        return self._require(self._partner, "partner state", N)

    def members(self, N: int) -> List[StateVector]:
        if self._members is None:
            return [self.state(N), self.partner(N)]
        return self._require(self._members, "member list", N)

    def branches(self, N: int) -> Tuple[StateVector, StateVector]:
        return self._require(self._branches, "superposition branches", N)

    def hamiltonian(self, N: int) -> PauliHamiltonian:
        return self._require(self._hamiltonian, "parent Hamiltonian", N)

    def witness(self, N: int) -> Observable:
        return self._require(self._witness, "witness observable", N)

    @property
    def has_partner(self) -> bool:
        return self._partner is not None

    @property
    def has_branches(self) -> bool:
        return self._branches is not None

    @property
    def has_hamiltonian(self) -> bool:
        return self._hamiltonian is not None

    @property
    def has_witness(self) -> bool:
        return self._witness is not None

    def candidates(self, N: int) -> List[StateVector]:
        """Known orthogonal states used as optimizer seeds"""
        psi = self.state(N)
        out = [self.partner(N)] if self._partner is not None else []
        if self._members is not None:
            out.extend(s for s in self.members(N) if abs(s.inner(psi)) < 1e-9)
        return out

    def lower_bounds(self, N: int, p: float) -> Dict[str, float]:
        self.check_n(N)
        return dict(self._lower(N, p)) if self._lower else {}

    def upper_bounds(self, N: int, p: float) -> Dict[str, float]:
        """Closed-form upper bounds, plus the noisy distance to the partner"""
        self.check_n(N)
        out = dict(self._upper(N, p)) if self._upper else {}
        if self._partner is not None:
            out["partner"] = pairwise_noisy_distance(self.state(N), self.partner(N), p)
        return out

    def primary_bound(self, N: int, p: float) -> Tuple[str, float]:
        """The closed-form upper bound if there is one, else the best lower bound"""
        self.check_n(N)
        if self._upper:
            name, value = min(self._upper(N, p).items(), key=lambda kv: kv[1])
            return name, value
        lower = self.lower_bounds(N, p)
        lower["projector"] = projector_lower_bound(self.state(N), p)
        return max(lower.items(), key=lambda kv: kv[1])

    def describe(self) -> Dict:
        return {"family": self.name, **self.params}


FAMILIES: Dict[str, Callable[[Params], StateFamily]] = {}


def register(*names: str):
    def wrap(builder):
        for name in names:
            FAMILIES[name] = builder
        return builder
    return wrap


def _flip_one(psi: StateVector, label: str, qubit: int = 0) -> StateVector:
    n = psi.n_qubits
    word = "I" * qubit + label + "I" * (n - qubit - 1)
    return StateVector.from_amplitudes(pauli_string_matrix(word) @ psi.amplitudes)


def _graph(params: Params, N: int) -> GraphSpec:
    return GraphSpec.named(params.used.get("graph", "line"), N)


@register("product")
def _product(params: Params) -> StateFamily:
    return StateFamily(
        "product",
        params.finish(),
        state=product_zero,
        partner=w_state,
        hamiltonian=lambda N: -1.0 * jz(N),
        witness=lambda N: jz(N).to_observable().scaled(2.0 / N),
        lower_bounds=lambda N, p: {"product": p / N},
    )


@register("ghz", "ghz-pair")
def _ghz(params: Params) -> StateFamily:
    return StateFamily(
        "ghz",
        params.finish(),
        state=lambda N: ghz(N, 1),
        partner=lambda N: ghz(N, -1),
        branches=lambda N: (product_zero(N), StateVector.from_amplitudes(np.eye(2 ** N)[:, -1])),
        hamiltonian=neg_jz_squared,
        upper_bounds=lambda N, p: {"ghz": p ** N},
    )


@register("dicke", "w")
def _dicke(params: Params) -> StateFamily:
    k = params.take("k", 1)
    if k < 0:
        raise ArgumentError(f"Dicke excitation k must be nonnegative, got {k}")

    def partner(N: int) -> StateVector:
        return dicke(N, k + 1 if k < N else k - 1)

    return StateFamily(
        "dicke",
        params.finish(),
        state=lambda N: dicke(N, k),
        partner=partner,
        hamiltonian=lambda N: dicke_hamiltonian(N, k),
        min_n=max(k, 1),
    )


@register("w-superposition")
def _w_superposition(params: Params) -> StateFamily:
    return StateFamily(
        "w-superposition",
        params.finish(),
        state=lambda N: superposition(w_state(N), inverted_w_state(N), 1),
        partner=lambda N: superposition(w_state(N), inverted_w_state(N), -1),
        branches=lambda N: (w_state(N), inverted_w_state(N)),
        min_n=3,
    )


@register("graph", "cluster")
def _graph_family(params: Params) -> StateFamily:
    params.take("graph", "line", str)
    return StateFamily(
        "graph",
        params.finish(),
        state=lambda N: graph_state(_graph(params, N)),
        partner=lambda N: _flip_one(graph_state(_graph(params, N)), "Z"),
        hamiltonian=lambda N: graph_hamiltonian(_graph(params, N)),
    )


@register("graph-superposition")
def _graph_superposition(params: Params) -> StateFamily:
    params.take("graph", "line", str)

    def branches(N: int) -> Tuple[StateVector, StateVector]:
        g = graph_state(_graph(params, N))
        return g, StateVector.from_amplitudes(pauli_string_matrix("Z" * N) @ g.amplitudes)

    return StateFamily(
        "graph-superposition",
        params.finish(),
        state=lambda N: graph_superposition(_graph(params, N), 1),
        partner=lambda N: graph_superposition(_graph(params, N), -1),
        branches=branches,
        min_n=2,
    )


@register("logical-ghz")
def _logical_ghz(params: Params) -> StateFamily:
    m = params.take("m", 2)
    if m < 1:
        raise ArgumentError(f"block size m must be positive, got {m}")
    return StateFamily(
        "logical-ghz",
        params.finish(),
        state=lambda N: logical_ghz(N // m, m, 1),
        partner=lambda N: logical_ghz(N // m, m, -1),
        branches=lambda N: logical_ghz_branches(N // m, m),
        hamiltonian=lambda N: logical_ghz_hamiltonian(N // m, m),
        upper_bounds=lambda N, p: {"macro": macro_upper_bound(N, N // m, p)},
        min_n=m,
        step=m,
    )


@register("phase-family")
def _phase_family(params: Params) -> StateFamily:
    m = params.take("m", 2)
    k = params.take("k", 1)
    if m < 1 or not 1 <= k <= 2 ** m:
        raise ArgumentError(f"phase family needs m >= 1 and k in 1..{2 ** max(m, 1)}")
    return StateFamily(
        "phase-family",
        params.finish(),
        state=lambda N: phase_family(N, m, k),
        partner=lambda N: phase_family(N, m, k % 2 ** m + 1),
        members=lambda N: [phase_family(N, m, j) for j in range(1, 2 ** m + 1)],
        min_n=m,
        step=m,
    )


@register("ghz-product")
def _ghz_product(params: Params) -> StateFamily:
    m = params.take("m", 2)
    bits = params.take("bits", None, lambda v: tuple(int(b) for b in v))
    if m < 1:
        raise ArgumentError(f"block count m must be positive, got {m}")
    bits = bits if bits is not None else (0,) * m
    if len(bits) != m or any(b not in (0, 1) for b in bits):
        raise ArgumentError(f"bits must be {m} values in {{0, 1}}, got {list(bits)}")
    flipped = bits[:-1] + (1 - bits[-1],)
    return StateFamily(
        "ghz-product",
        params.finish(),
        state=lambda N: ghz_product_family(N, m, bits),
        partner=lambda N: ghz_product_family(N, m, flipped),
        members=lambda N: [ghz_product_family(N, m, b) for b in itertools.product((0, 1), repeat=m)],
        min_n=m,
        step=m,
    )


COUNTEREXAMPLE_PARTNERS = ("phi1", "phi2", "xi1", "xi2")


@register("counterexample")
def _counterexample(params: Params) -> StateFamily:
    which = params.take("partner", "xi1", str)
    if which not in COUNTEREXAMPLE_PARTNERS:
        raise ArgumentError(f"partner must be one of {COUNTEREXAMPLE_PARTNERS}, got {which!r}")

    def parts(N: int):
        psi, phi1, phi2, xi1, xi2, witness = counterexample_states(N)
        return psi, dict(zip(COUNTEREXAMPLE_PARTNERS, (phi1, phi2, xi1, xi2))), witness

    return StateFamily(
        "counterexample",
        params.finish(),
        state=lambda N: parts(N)[0],
        partner=lambda N: parts(N)[1][which],
        witness=lambda N: parts(N)[2].rescaled(),
        min_n=2,
        step=2,
    )


@register("custom")
def _custom(params: Params) -> StateFamily:
    records = params.take("hamiltonian", None, list)
    amplitudes = params.take("amplitudes", None, list)
    if (records is None) == (amplitudes is None):
        raise ArgumentError("custom family needs exactly one of 'hamiltonian' or 'amplitudes'")
    finished = params.finish()
    if records is not None:
        h = PauliHamiltonian.from_records(records)
        info = spectral_info(h)
        if info.ground_degeneracy != 1:
            raise ArgumentError(f"custom Hamiltonian has a {info.ground_degeneracy}-fold ground space")
        psi = info.ground_space[0]
        return StateFamily("custom", finished, state=lambda N: psi, hamiltonian=lambda N: h, fixed_n=h.n_qubits)
    psi = StateVector.from_amplitudes([_complex(a) for a in amplitudes])
    return StateFamily("custom", finished, state=lambda N: psi, fixed_n=psi.n_qubits)


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ArgumentError(f"complex amplitudes are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def get_family(name: str, params: Optional[Mapping] = None) -> StateFamily:
    if name not in FAMILIES:
        raise ArgumentError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    fixed = {"w": {"k": 1}, "cluster": {"graph": "line"}}.get(name, {})
    raw = dict(params or {})
    for key, value in fixed.items():
        if key in raw and raw[key] != value:
            raise ArgumentError(f"family {name} fixes {key}={value}")
        raw[key] = value
    return FAMILIES[name](Params(name, raw))


HAMILTONIANS: Dict[str, Callable[[int, Params], PauliHamiltonian]] = {
    "jz": lambda N, params: jz(N),
    "j-squared": lambda N, params: j_squared(N),
    "neg-jz-squared": lambda N, params: neg_jz_squared(N),
    "dicke-hamiltonian": lambda N, params: dicke_hamiltonian(N, params.take("k", 1)),
    "graph-hamiltonian": lambda N, params: graph_hamiltonian(GraphSpec.named(params.take("graph", "line", str), N)),
    "logical-ghz-hamiltonian": lambda N, params: logical_ghz_hamiltonian(N // params.take("m", 2), params.used["m"]),
    "custom-hamiltonian": lambda N, params: PauliHamiltonian.from_records(params.take("hamiltonian", None, list) or [], N),
}


def get_hamiltonian(name: str, N: int, params: Optional[Mapping] = None) -> PauliHamiltonian:
    """A named Hamiltonian, or the parent Hamiltonian of a state family"""
    if name in HAMILTONIANS:
        parsed = Params(name, params)
        if name == "logical-ghz-hamiltonian" and N % parsed.take("m", 2):
            raise ArgumentError(f"N={N} is not a multiple of m={parsed.used['m']}")
        h = HAMILTONIANS[name](N, parsed)
        parsed.finish()
        if h.n_qubits != N:
            raise ArgumentError(f"{name} acts on {h.n_qubits} qubits, expected N={N}")
        return h
    return get_family(name, params).hamiltonian(N)


def family_bounds(family: StateFamily, N: int, p: float) -> Dict[str, Dict[str, float]]:
    """Every bound that applies to the family's state at (N, p).

    lower and upper bracket the certifiability; pairwise holds the noisy
    distance to the partner and the witness bound on that distance.
    """
    psi = family.state(N)
    lower = family.lower_bounds(N, p)
    lower["projector"] = projector_lower_bound(psi, p)
    if family.has_hamiltonian:
        try:
            lower["ground_state"] = ground_state_bound(family.hamiltonian(N), p)
        except ArgumentError as exc:
            logger.info("no ground-state bound for %s at N=%d: %s", family.name, N, exc)
    upper = family.upper_bounds(N, p)
    pairwise: Dict[str, float] = {}
    if family.has_partner:
        pairwise["distance"] = upper["partner"]
        if family.has_witness:
            pairwise["witness"] = witness_lower_bound(psi, family.partner(N), family.witness(N), p)
    if family.has_branches:
        psi0, psi1 = family.branches(N)
        N_eff = effective_size(psi0, psi1, 0.0)
        upper["macro"] = macro_upper_bound(N, N_eff, p)
        return {"lower": lower, "upper": upper, "pairwise": pairwise, "effective_size": N_eff}
    return {"lower": lower, "upper": upper, "pairwise": pairwise}
