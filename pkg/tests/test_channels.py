import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from certilab.utils.channels import (
    KrausSet,
    NoiseModel,
    apply_noise_model,
    apply_to_operator,
    choi_matrix,
    correction_channel,
    correction_map,
    correction_map_kraus,
    correction_map_operator,
    depolarize_all,
    depolarize_qubit,
    depolarizing_channel,
    factorized_noise,
    group_depolarize,
    group_depolarize_operator,
    is_completely_positive,
    kraus_channel,
    transpose_map,
    verify_correction_map,
)
from certilab.utils.errors import ArgumentError, CapExceededError
from certilab.utils.hamiltonians import jz
from certilab.utils.hilbert import (
    PAULI,
    DensityMatrix,
    apply_local_unitary,
    pauli_string_matrix,
    random_local_unitaries,
    trace_distance,
    trace_norm,
)
from certilab.utils.states import ghz, product_zero


def test_depolarize_qubit_limits(random_rhos):
    rho = random_rhos(1)[0]
    assert_allclose(depolarize_qubit(rho, 0, 1.0).matrix, rho.matrix, atol=1e-12)
    assert_allclose(depolarize_qubit(rho, 0, 0.0).matrix, np.eye(2) / 2, atol=1e-12)
    with pytest.raises(ArgumentError):
        depolarize_qubit(rho, 1, 0.5)
    with pytest.raises(ArgumentError):
        depolarize_qubit(rho, 0, 1.5)


def test_depolarize_all_limits(random_rhos):
    rho = random_rhos(3)[0]
    assert_allclose(depolarize_all(rho, 0.0).matrix, np.eye(8) / 8, atol=1e-12)
    assert_allclose(depolarize_all(rho, 1.0).matrix, rho.matrix, atol=1e-12)


def test_depolarize_all_is_order_independent(random_rhos):
    rho = random_rhos(3)[0]
    forward = rho
    for q in range(3):
        forward = depolarize_qubit(forward, q, 0.7)
    backward = rho
    for q in reversed(range(3)):
        backward = depolarize_qubit(backward, q, 0.7)
    assert_allclose(forward.matrix, backward.matrix, atol=1e-12)
    assert_allclose(forward.matrix, depolarize_all(rho, 0.7).matrix, atol=1e-12)


@pytest.mark.parametrize("word", ["X", "ZZ", "XIY", "YZXI", "IIII"])
def test_pauli_transfer(word):
    p = 0.8
    weight = sum(c != "I" for c in word)
    sigma = pauli_string_matrix(word)
    assert_allclose(apply_to_operator(sigma, p), p ** weight * sigma, atol=1e-12)


def test_apply_to_operator_known_values():
    p = 0.6
    ket_bra = np.array([[0, 1], [0, 0]], dtype=complex)
    assert_allclose(apply_to_operator(ket_bra, p), p * ket_bra, atol=1e-12)
    N = 4
    block = ket_bra
    for _ in range(N - 1):
        block = np.kron(block, ket_bra)
    assert trace_norm(apply_to_operator(block, p)) == pytest.approx(p ** N, abs=1e-12)
    assert_allclose(apply_to_operator(np.eye(8), p), np.eye(8), atol=1e-12)
    assert_allclose(apply_to_operator(jz(3).matrix, p), p * jz(3).matrix, atol=1e-12)
    with pytest.raises(ArgumentError):
        apply_to_operator(np.ones((2, 4)), p)


def test_channels_preserve_trace_and_contract(random_rhos):
    a, b = random_rhos(3, 2)
    for out_a, out_b in [
        (depolarize_all(a, 0.4), depolarize_all(b, 0.4)),
        (group_depolarize(a, [0, 2], 0.3), group_depolarize(b, [0, 2], 0.3)),
    ]:
        assert np.trace(out_a.matrix).real == pytest.approx(1.0, abs=1e-10)
        assert trace_distance(out_a, out_b) <= trace_distance(a, b) + 1e-10


def test_noise_commutes_with_local_unitaries(random_states, rng):
    psi = random_states(3)[0]
    us = random_local_unitaries(3, rng)
    rotated = apply_local_unitary(psi, us)
    full_u = np.kron(np.kron(us[0], us[1]), us[2])
    lhs = apply_to_operator(rotated.projector(), 0.75)
    rhs = full_u @ apply_to_operator(psi.projector(), 0.75) @ full_u.conj().T
    assert_allclose(lhs, rhs, atol=1e-12)


def test_group_depolarize_known_values(random_rhos):
    rho = random_rhos(2)[0]
    assert_allclose(group_depolarize(rho, [1], 0.35).matrix, depolarize_qubit(rho, 1, 0.35).matrix, atol=1e-12)
    assert_allclose(group_depolarize(rho, [0, 1], 1.0).matrix, rho.matrix, atol=1e-12)
    with pytest.raises(ArgumentError):
        group_depolarize(rho, [], 0.5)


def test_group_depolarize_keeps_ghz_coherence():
    N, q = 3, 0.45
    zero = product_zero(N).amplitudes
    one = np.zeros(2 ** N)
    one[-1] = 1
    block = np.outer(zero, one)
    assert_allclose(group_depolarize_operator(block, [0], q), q * block, atol=1e-12)


@pytest.mark.parametrize("p", [0.2, 0.7, 1.0])
def test_correction_map_on_one_qubit_is_identity(p, random_rhos):
    rho = random_rhos(1)[0]
    assert_allclose(correction_map(rho, p).matrix, rho.matrix, atol=1e-12)


def test_correction_map_rejects_zero_p(random_rhos):
    with pytest.raises(ArgumentError):
        correction_map(random_rhos(1)[0], 0.0)
    with pytest.raises(ArgumentError):
        correction_map_kraus(2, 0.0)


@pytest.mark.parametrize("m", [2, 3])
def test_correction_after_group_noise_is_full_noise(m, random_rhos):
    p = 0.65
    q = 1 - (1 - p) ** m
    rho = random_rhos(m)[0]
    composed = correction_map_operator(group_depolarize_operator(rho, list(range(m)), q), p)
    assert_allclose(composed, depolarize_all(rho, p).matrix, atol=1e-10)
    assert np.trace(composed).real == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("m, p", itertools.product([1, 2, 3], [0.3, 0.9]))
def test_correction_map_kraus_matches_direct_form(m, p, random_rhos):
    kraus = correction_map_kraus(m, p)
    assert_allclose(kraus.completeness(), np.eye(2 ** m), atol=1e-10)
    for rho in random_rhos(m, 100):
        assert_allclose(kraus.apply(rho), correction_map_operator(rho, p), atol=1e-10)


def test_correction_map_kraus_single_qubit():
    kraus = correction_map_kraus(1, 0.4)
    assert len(kraus.operators) == 1
    assert_allclose(kraus.operators[0], np.eye(2), atol=1e-12)


def test_kraus_set_rejects_incomplete_set():
    with pytest.raises(ArgumentError):
        KrausSet((0.5 * np.eye(2),))


def test_choi_matrix_positivity():
    assert is_completely_positive(depolarizing_channel(0.5), 1)
    for p in (0.3, 0.9):
        assert is_completely_positive(kraus_channel(correction_map_kraus(2, p)), 2)
        assert is_completely_positive(correction_channel(p), 2)
    assert not is_completely_positive(transpose_map, 1)
    with pytest.raises(CapExceededError):
        choi_matrix(transpose_map, 5)


@pytest.mark.parametrize("n, m", [(4, 1), (4, 2), (6, 2), (6, 3)])
def test_factorized_noise_reproduces_depolarizing(n, m, random_rhos):
    p = 0.55
    rho = random_rhos(n)[0]
    groups = [tuple(range(s, s + m)) for s in range(0, n, m)]
    assert_allclose(factorized_noise(rho, p, groups), depolarize_all(rho, p).matrix, atol=1e-10)
    model = NoiseModel(p, groups)
    assert_allclose(apply_noise_model(rho, model).matrix, depolarize_all(rho, p).matrix, atol=1e-10)


def test_noise_model_validation():
    with pytest.raises(ArgumentError):
        NoiseModel(1.2)
    with pytest.raises(ArgumentError):
        NoiseModel(0.5, ((0, 1), (1, 2)))
    with pytest.raises(ArgumentError):
        NoiseModel(0.5, ((0,), (2,))).check_covers(3)
    assert NoiseModel.from_gamma_t(1.0, 0.0).p == pytest.approx(1.0)
    assert NoiseModel(0.5).group_retention((0, 1, 2)) == pytest.approx(1 - 0.5 ** 3)


def test_single_qubit_noise_on_ghz_pair():
    p = 0.9
    rho = apply_to_operator(ghz(2).projector() - ghz(2, -1).projector(), p)
    assert 0.5 * trace_norm(rho) == pytest.approx(p ** 2, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2])
def test_verify_correction_map(m, rng):
    check = verify_correction_map(m, 0.7, rng, samples=5)
    assert check.passed
    assert check.choi_min_eigenvalue is not None
    assert check.to_dict()["n_kraus"] == len(correction_map_kraus(m, 0.7).operators)


def test_density_inputs_stay_valid(random_rhos):
    out = depolarize_all(random_rhos(2)[0], 0.3)
    assert isinstance(out, DensityMatrix)
    assert np.min(np.linalg.eigvalsh(out.matrix)) >= -1e-10
    assert_allclose(PAULI["I"], np.eye(2))
