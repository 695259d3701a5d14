import numpy as np
import pytest

from certilab.utils.errors import ArgumentError
from certilab.utils.families import get_family
from certilab.utils.optimizer import OptimizerOptions
from certilab.utils.scaling import (
    SweepRecord,
    classify_decay,
    fit_decay_models,
    records_from_values,
    scaling_sweep,
)

NS = list(range(2, 9))


def test_sweep_record_range():
    with pytest.raises(ArgumentError):
        SweepRecord("ghz", 3, 0.9, "distance", 1.5, "pairwise")
    row = SweepRecord("ghz", 3, 0.9, "distance", 0.729, "pairwise").to_row()
    assert list(row) == ["family", "N", "p", "quantity", "value", "kind"]


def test_ghz_pairwise_sweep_is_exactly_geometric():
    records = scaling_sweep(get_family("ghz"), NS, 0.9)
    assert [r.N for r in records] == NS
    for r in records:
        assert r.value == pytest.approx(0.9 ** r.N, abs=1e-10)
        assert (r.quantity, r.kind) == ("distance", "pairwise")
    result = classify_decay(records)
    assert result.label == "exponential"
    assert result.rate == pytest.approx(np.log(0.9), abs=0.01)


def test_sweep_without_noise_is_flat():
    records = scaling_sweep(get_family("ghz"), NS, 1.0)
    assert all(r.value == pytest.approx(1.0) for r in records)
    assert classify_decay(records).label == "polynomial"


def test_bound_sweep_uses_closed_form():
    records = scaling_sweep(get_family("ghz"), [2, 3, 4], 0.8, "bound")
    assert [r.value for r in records] == pytest.approx([0.8 ** 2, 0.8 ** 3, 0.8 ** 4])


def test_purity_and_fidelity_sweeps():
    family = get_family("ghz")
    purity = scaling_sweep(family, [2, 3], 1.0, "purity")
    assert [r.value for r in purity] == pytest.approx([1.0, 1.0])
    fidelity = scaling_sweep(family, [2, 3], 0.5, "fidelity")
    assert all(0.0 < r.value < 1.0 for r in fidelity)
    assert fidelity[0].quantity == "fidelity"


def test_exact_sweep_on_product_states(quick_opts):
    p = 0.9
    records = scaling_sweep(get_family("product"), [2, 3, 4], p, "exact", quick_opts)
    for r in records:
        assert r.value >= p / r.N - 1e-7
        assert r.quantity == "certifiability"


def test_parallel_sweep_matches_serial():
    family = get_family("dicke", {"k": 1})
    serial = scaling_sweep(family, [2, 3, 4, 5], 0.8, jobs=1)
    parallel = scaling_sweep(family, [2, 3, 4, 5], 0.8, jobs=4)
    assert serial == parallel


def test_sweep_rejects_bad_input():
    family = get_family("ghz")
    with pytest.raises(ArgumentError):
        scaling_sweep(family, NS, 0.9, "entropy")
    with pytest.raises(ArgumentError):
        scaling_sweep(family, NS, 1.2)
    with pytest.raises(ArgumentError):
        scaling_sweep(get_family("logical-ghz", {"m": 2}), [2, 3], 0.9)


def test_classify_synthetic_data():
    exponential = classify_decay(records_from_values("synthetic", NS, [0.9 ** N for N in NS], 0.9))
    assert exponential.label == "exponential"
    assert exponential.rate == pytest.approx(np.log(0.9), abs=1e-6)
    polynomial = classify_decay(records_from_values("synthetic", NS, [0.9 / N for N in NS], 0.9))
    assert polynomial.label == "polynomial"
    assert polynomial.rate == pytest.approx(-1.0, abs=1e-6)


def test_classify_is_order_independent():
    values = [0.7 ** N for N in NS]
    records = records_from_values("synthetic", NS, values, 0.7)
    assert classify_decay(records[::-1]).rate == pytest.approx(classify_decay(records).rate)


def test_classify_requires_enough_distinct_records():
    with pytest.raises(ArgumentError):
        classify_decay(records_from_values("synthetic", [2, 3, 4], [0.5, 0.4, 0.3], 0.9))
    with pytest.raises(ArgumentError):
        classify_decay(records_from_values("synthetic", [2, 3, 3, 4], [0.5, 0.4, 0.4, 0.3], 0.9))
    with pytest.raises(ArgumentError):
        classify_decay(records_from_values("synthetic", NS, [0.5] * len(NS), 0.9), margin=0.5)


def test_zero_values_are_clamped():
    values = [0.5, 0.25, 0.125, 0.0]
    _, _, clamped = fit_decay_models(records_from_values("synthetic", [2, 3, 4, 5], values, 0.9))
    assert clamped
    assert classify_decay(records_from_values("synthetic", [2, 3, 4, 5], values, 0.9)).clamped


def test_flat_non_monotone_series_is_polynomial():
    # exact certifiability of line-graph cluster states at p = 0.9, N = 2..6
    values = [0.81, 0.729, 0.729, 0.729, 0.758433]
    result = classify_decay(records_from_values("cluster", [2, 3, 4, 5, 6], values, 0.9, "exact"))
    assert result.label == "polynomial"
    assert -result.exponential.slope <= 2.0 * result.exponential.slope_stderr


def test_slow_clean_exponential_stays_exponential():
    result = classify_decay(records_from_values("synthetic", NS, [0.99 ** N for N in NS], 0.99))
    assert result.label == "exponential"
    assert -result.exponential.slope > 2.0 * result.exponential.slope_stderr
    assert result.rate == pytest.approx(np.log(0.99), abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.7, 0.9])
def test_product_state_exact_sweep_is_polynomial(p):
    records = scaling_sweep(get_family("product"), [2, 3, 4, 5, 6], p, "exact", OptimizerOptions(seed=1))
    assert all(r.value >= p / r.N - 1e-7 for r in records)
    assert classify_decay(records).label == "polynomial"


@pytest.mark.slow
def test_cluster_state_exact_sweep_is_polynomial():
    records = scaling_sweep(get_family("cluster"), [2, 3, 4, 5, 6], 0.9, "exact", OptimizerOptions(seed=1))
    assert classify_decay(records).label == "polynomial"
