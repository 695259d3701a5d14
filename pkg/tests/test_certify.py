import numpy as np
import pytest

from certilab.utils.certify import (
    CertificationResult,
    certifiability_exact,
    check_sandwich,
    epsilon_ball_certifiable,
    epsilon_macro_bound,
    ground_state_bound,
    macro_upper_bound,
    macro_upper_bound_groups,
    mixture_family_check,
    off_diagonal_group_trace,
    off_diagonal_noisy_norm,
    pairwise_noisy_distance,
    projector_lower_bound,
    witness_lower_bound,
)
from certilab.utils.errors import ArgumentError, CapExceededError
from certilab.utils.families import family_bounds, get_family
from certilab.utils.hamiltonians import dicke_hamiltonian, graph_hamiltonian, jz, neg_jz_squared
from certilab.utils.hilbert import Observable, StateVector, apply_local_unitary, orthonormal_complement_matrix, random_local_unitaries
from certilab.utils.optimizer import OptimizerOptions
from certilab.utils.states import (
    GraphSpec,
    counterexample_states,
    dicke,
    ghz,
    graph_state,
    inverted_w_state,
    product_zero,
    w_state,
)


def basis(n, index):
    amps = np.zeros(2 ** n)
    amps[index] = 1
    return StateVector.from_amplitudes(amps)


@pytest.mark.parametrize("N", range(1, 9))
@pytest.mark.parametrize("p", [0.5, 0.9, 0.99])
def test_ghz_pair_distance(N, p):
    assert pairwise_noisy_distance(ghz(N), ghz(N, -1), p) == pytest.approx(p ** N, abs=1e-10)


def test_pairwise_distance_known_values():
    psi = w_state(3)
    assert pairwise_noisy_distance(psi, psi, 0.7) == pytest.approx(0.0, abs=1e-12)
    assert pairwise_noisy_distance(dicke(4, 0), dicke(4, 1), 0.9) >= 0.225 - 1e-12
    with pytest.raises(ArgumentError):
        pairwise_noisy_distance(ghz(2), ghz(3), 0.5)
    with pytest.raises(ArgumentError):
        pairwise_noisy_distance(ghz(2), ghz(2, -1), 1.5)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_certifiability_at_noise_extremes(p, quick_opts, random_states):
    result = certifiability_exact(random_states(2)[0], p, quick_opts)
    assert result.value == pytest.approx(p, abs=1e-9)
    assert result.lower_bounds["projector"] <= result.value + 1e-9


def test_certifiability_of_product_state_beats_random_search(rng):
    p = 0.9
    psi = product_zero(2)
    result = certifiability_exact(psi, p, OptimizerOptions(restarts=8, max_evaluations=20_000, seed=5))
    assert result.value >= p / 2 - 1e-7
    assert abs(result.argmin_state.inner(psi)) < 1e-9

    basis_matrix = orthonormal_complement_matrix(psi)
    best = 1.0
    for _ in range(20_000):
        u = rng.normal(size=3) + 1j * rng.normal(size=3)
        phi = StateVector.from_amplitudes(basis_matrix @ u)
        best = min(best, pairwise_noisy_distance(psi, phi, p))
    assert result.value <= best + 1e-4


def test_certifiability_of_ghz_respects_bounds(quick_opts):
    p = 0.9
    result = certifiability_exact(
        ghz(3), p, quick_opts, candidates=[ghz(3, -1)], upper_bounds={"ghz": p ** 3}
    )
    assert result.value <= p ** 3 + 1e-10
    assert result.bounds_consistent
    payload = result.to_dict()
    assert payload["upper_bounds"] == {"ghz": p ** 3}
    assert set(payload["optimizer"]) >= {"restarts", "iterations", "final_gradient_norm", "converged"}


@pytest.mark.parametrize("p", [0.7, 0.9])
@pytest.mark.parametrize("N", [2, 3, 4, pytest.param(5, marks=pytest.mark.slow), pytest.param(6, marks=pytest.mark.slow)])
def test_ghz_certifiability_below_closed_form(N, p, quick_opts):
    result = certifiability_exact(ghz(N), p, quick_opts, candidates=[ghz(N, -1)], upper_bounds={"ghz": p ** N})
    assert result.value <= p ** N + 1e-10
    assert result.value >= p ** N / 2 - 1e-9
    assert result.bounds_consistent


@pytest.mark.parametrize("p", [0.7, 0.9])
def test_dicke_state_certifiability_exceeds_ground_state_bound(p, quick_opts):
    result = certifiability_exact(dicke(4, 2), p, quick_opts, candidates=[dicke(4, 3)])
    assert result.value >= ground_state_bound(dicke_hamiltonian(4, 2), p) - 1e-6


@pytest.mark.parametrize("p", [0.7, 0.9, 0.99])
@pytest.mark.parametrize(
    "name, params, N",
    [("product", {}, 3), ("ghz", {}, 4), ("dicke", {"k": 2}, 4), ("cluster", {}, 4)],
    ids=["product", "ghz", "dicke", "cluster"],
)
def test_family_bounds_bracket_certifiability(name, params, N, p, quick_opts):
    family = get_family(name, params)
    bounds = family_bounds(family, N, p)
    result = certifiability_exact(
        family.state(N), p, quick_opts, candidates=family.candidates(N),
        lower_bounds=bounds["lower"], upper_bounds=bounds["upper"],
    )
    assert result.bounds_consistent
    assert all(bound <= result.value + 1e-6 for bound in bounds["lower"].values())
    assert all(result.value <= bound + 1e-6 for bound in bounds["upper"].values())


def test_certifiability_flags_inconsistent_bounds(quick_opts):
    result = certifiability_exact(ghz(2), 0.9, quick_opts, candidates=[ghz(2, -1)], lower_bounds={"bogus": 0.99})
    assert not result.bounds_consistent


def test_certifiability_respects_cap(rng):
    psi = StateVector.from_amplitudes(rng.normal(size=2 ** 9))
    with pytest.raises(CapExceededError):
        certifiability_exact(psi, 0.9)


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.7, 0.9])
def test_graph_state_certifiability_exceeds_ground_state_bound(p, quick_opts):
    g = GraphSpec.named("line", 4)
    result = certifiability_exact(graph_state(g), p, quick_opts)
    assert result.value >= ground_state_bound(graph_hamiltonian(g), p) - 1e-9


@pytest.mark.slow
def test_local_unitary_invariance(rng):
    opts = OptimizerOptions(restarts=8, max_evaluations=16_000, seed=11)
    psi = product_zero(2)
    rotated = apply_local_unitary(psi, random_local_unitaries(2, rng))
    a = certifiability_exact(psi, 0.8, opts).value
    b = certifiability_exact(rotated, 0.8, opts).value
    assert abs(a - b) <= 5e-3


@pytest.mark.slow
def test_certifiability_grows_with_p():
    opts = OptimizerOptions(restarts=8, max_evaluations=16_000, seed=2)
    values = [certifiability_exact(product_zero(2), p, opts).value for p in (0.2, 0.4, 0.6, 0.8, 1.0)]
    assert all(b >= a - 5e-3 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("N", [2, 4, 6])
def test_collective_witness_on_product_state(N, random_states, rng):
    p = 0.9
    A = jz(N).to_observable().scaled(2.0 / N)
    assert witness_lower_bound(dicke(N, 0), dicke(N, 1), A, p) == pytest.approx(p / N, abs=1e-12)
    u = rng.normal(size=2 ** N - 1) + 1j * rng.normal(size=2 ** N - 1)
    phi = StateVector.from_amplitudes(orthonormal_complement_matrix(dicke(N, 0)) @ u)
    assert witness_lower_bound(dicke(N, 0), phi, A, p) >= p / N - 1e-12


def test_witness_adjoint_identity(random_states):
    psi, phi = random_states(3, 2)
    A = jz(3).to_observable().rescaled()
    moved = witness_lower_bound(psi, phi, A, 0.6, adjoint=True)
    direct = witness_lower_bound(psi, phi, A, 0.6, adjoint=False)
    assert moved == pytest.approx(direct, abs=1e-12)
    assert moved <= pairwise_noisy_distance(psi, phi, 0.6) + 1e-12


def test_witness_known_values():
    identity = Observable.from_matrix(np.eye(4))
    assert witness_lower_bound(ghz(2), ghz(2, -1), identity, 0.8) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ArgumentError):
        witness_lower_bound(ghz(2), ghz(2, -1), identity.scaled(2.0), 0.8)


@pytest.mark.parametrize("N", [4, 6])
def test_counterexample_witness_gap_is_size_independent(N):
    p = 0.9
    psi, phi1, _, _, _, witness = counterexample_states(N)
    bound = witness_lower_bound(psi, phi1, witness.rescaled(), p)
    assert bound == pytest.approx(p ** 2 / 2, abs=1e-12)


def test_ground_state_bound():
    h = graph_hamiltonian(GraphSpec.named("line", 4))
    # spectral radius 4, gap 2, locality 3
    assert ground_state_bound(h, 0.9) == pytest.approx(0.9 ** 3 * 0.5 / 2)
    assert ground_state_bound(h, 1.0) == pytest.approx(0.25)
    with pytest.raises(ArgumentError):
        ground_state_bound(neg_jz_squared(4), 0.9)


def test_projector_lower_bound():
    assert projector_lower_bound(ghz(2), 0.8) == pytest.approx(0.8 ** 2 / 2)
    assert projector_lower_bound(product_zero(3), 0.8) == pytest.approx(0.8 ** 3 / 2)


def test_macro_upper_bound():
    assert macro_upper_bound(5, 5, 0.9) == pytest.approx(0.9 ** 5)
    assert macro_upper_bound(4, 2, 0.9) == pytest.approx(0.9801)
    assert macro_upper_bound(6, 3, 1.0) == pytest.approx(1.0)
    with pytest.raises(ArgumentError):
        macro_upper_bound(4, 5, 0.9)
    assert macro_upper_bound_groups([1, 1, 1], 0.7) == pytest.approx(0.7 ** 3)
    assert macro_upper_bound_groups([2, 2], 0.9) == pytest.approx(0.9801)
    with pytest.raises(ArgumentError):
        macro_upper_bound_groups([], 0.9)


def test_epsilon_macro_bound():
    q = 1 - 0.1 ** 2
    assert epsilon_macro_bound(2, q, 0.0) == pytest.approx(macro_upper_bound(4, 2, 0.9))
    assert epsilon_macro_bound(10, 0.9, 0.1) == pytest.approx(0.91 ** 10)
    values = [epsilon_macro_bound(6, 0.8, eps) for eps in (0.0, 0.1, 0.2, 0.4)]
    assert values == sorted(values)
    with pytest.raises(ArgumentError):
        epsilon_macro_bound(6, 0.8, 0.5)
    with pytest.raises(ArgumentError):
        epsilon_macro_bound(6, 1.2, 0.1)


def test_mixture_family_check():
    p = 0.95
    psi, phi = ghz(4), ghz(4, -1)
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    values = mixture_family_check(psi, phi, p, grid)
    assert values[-1] == pytest.approx(0.0, abs=1e-12)
    assert values[0] == pytest.approx(pairwise_noisy_distance(psi, phi, p), abs=1e-12)
    assert values[2] <= p ** 4 + 1e-12
    assert all(v <= values[0] + 1e-10 for v in values)
    with pytest.raises(ArgumentError):
        mixture_family_check(psi, psi, p, grid)


def test_off_diagonal_group_trace():
    zeros, ones = basis(4, 0), basis(4, 15)
    for q in range(4):
        assert off_diagonal_group_trace(zeros, ones, [q]) == pytest.approx(0.0, abs=1e-12)
    assert off_diagonal_group_trace(w_state(4), w_state(4), [1]) == pytest.approx(1.0)
    assert off_diagonal_group_trace(w_state(4), inverted_w_state(4), [0]) > 0.1
    with pytest.raises(ArgumentError):
        off_diagonal_group_trace(zeros, ones, [])


def test_off_diagonal_noisy_norm():
    assert off_diagonal_noisy_norm(basis(3, 0), basis(3, 7), 0.8) == pytest.approx(0.8 ** 3)


@pytest.mark.parametrize(
    "value, delta, eps, expected",
    [(0.5, 0.1, 0.1, True), (0.15, 0.1, 0.1, False), (0.05, 0.1, 0.01, False)],
)
def test_epsilon_ball_certifiable(value, delta, eps, expected):
    result = CertificationResult(value, ghz(2, -1), 0.9)
    assert epsilon_ball_certifiable(result, delta, eps) is expected
    assert epsilon_ball_certifiable(value, delta, eps) is expected


def test_check_sandwich():
    assert check_sandwich(0.5, {"low": 0.4}, {"high": 0.6})
    assert check_sandwich(0.5, {"low": 0.5 + 1e-8}, {})
    assert not check_sandwich(0.5, {"low": 0.6}, {})
    assert not check_sandwich(0.5, {}, {"high": 0.4})
