"""Chain diagnostics: ESJD, effective sample size, KS projections."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomc.diagnostics import (
    DegenerateChainError,
    DimensionMismatchError,
    EmptyChainError,
    acceptance_rate,
    build_report,
    compute_esjd,
    compute_ess,
    ks_ergodicity,
    ks_two_sample,
)
from geomc.sampler import ChainRecord


def make_record(accept_prob, sq_jump, accepted=True):
    return ChainRecord(
        accepted=accepted,
        accept_prob=accept_prob,
        log_abs_jacobian=0.0,
        current_energy=0.0,
        proposal_energy=0.0,
        sq_jump_distance=sq_jump,
        wall_clock_nanos=1_000_000,
        fixed_point_iters=0,
        diverged=False,
    )


def test_esjd_hand_value():
    records = [make_record(1.0, 4.0), make_record(0.5, 2.0)]
    # (1.0 * 4.0 + 0.5 * 2.0) / 2
    assert compute_esjd(records) == pytest.approx(2.5)


def test_esjd_counts_rejected_proposals():
    records = [make_record(0.25, 8.0, accepted=False)]
    assert compute_esjd(records) == pytest.approx(2.0)
    assert acceptance_rate(records) == 0.0


def test_empty_records_raise():
    with pytest.raises(EmptyChainError):
        compute_esjd([])
    with pytest.raises(EmptyChainError):
        acceptance_rate([])
    with pytest.raises(EmptyChainError):
        build_report([], np.zeros((0, 1)))


def test_ess_iid_near_nominal():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(20_000)
    assert compute_ess(x) == pytest.approx(20_000, rel=0.1)


def test_ess_ar1_matches_theory():
    # AR(1) with phi = 0.5 has ESS = N (1 - phi) / (1 + phi) = N / 3
    rng = np.random.default_rng(1)
    n = 200_000
    phi = 0.5
    noise = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = noise[0]
    for t in range(1, n):
        x[t] = phi * x[t - 1] + noise[t]
    assert compute_ess(x) == pytest.approx(n / 3.0, rel=0.1)


def test_ess_constant_chain_raises():
    with pytest.raises(DegenerateChainError):
        compute_ess(np.ones(100))


def test_ks_identical_samples_is_zero():
    x = np.random.default_rng(2).standard_normal(500)
    assert ks_two_sample(x, x) == 0.0


def test_ks_disjoint_samples_is_one():
    assert ks_two_sample([1.0, 2.0, 3.0], [10.0, 11.0]) == 1.0


def test_ks_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal(rng.integers(5, 40))
        b = 0.3 + rng.standard_normal(rng.integers(5, 40))
        grid = np.concatenate([a, b])
        brute = max(
            abs(np.mean(a <= t) - np.mean(b <= t)) for t in grid
        )
        assert ks_two_sample(a, b) == pytest.approx(brute, abs=1e-14)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_ks_symmetry_and_range(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(rng.integers(2, 50))
    b = rng.standard_normal(rng.integers(2, 50))
    stat = ks_two_sample(a, b)
    assert 0.0 <= stat <= 1.0
    assert stat == pytest.approx(ks_two_sample(b, a), abs=1e-15)


def test_ks_shifted_gaussians_known_separation():
    # sup_t |Phi(t) - Phi(t - 1)| = Phi(0.5) - Phi(-0.5) = 0.3829
    rng = np.random.default_rng(4)
    a = rng.standard_normal(100_000)
    b = 1.0 + rng.standard_normal(100_000)
    assert ks_two_sample(a, b) == pytest.approx(0.3829, abs=0.01)


def test_ks_ergodicity_null_small():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((50_000, 2))
    b = rng.standard_normal((50_000, 2))
    stats = ks_ergodicity(a, b, rng=np.random.default_rng(6))
    assert stats.shape == (100,)
    assert stats.mean() < 0.01


def test_ks_ergodicity_seeded_directions_are_deterministic():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((2_000, 3))
    b = rng.standard_normal((2_000, 3))
    first = ks_ergodicity(a, b, 25, np.random.default_rng(11))
    second = ks_ergodicity(a, b, 25, np.random.default_rng(11))
    np.testing.assert_array_equal(first, second)


def test_ks_ergodicity_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        ks_ergodicity(np.zeros((10, 2)), np.zeros((10, 3)))


def test_build_report_aggregates():
    rng = np.random.default_rng(8)
    samples = rng.standard_normal((5_000, 2))
    records = [make_record(0.9, 1.0) for _ in range(5_000)]
    reference = rng.standard_normal((5_000, 2))
    report = build_report(records, samples, reference, seed=3)
    assert report.esjd == pytest.approx(0.9)
    assert report.acceptance_rate == 1.0
    assert report.min_ess <= report.mean_ess
    # 5000 transitions at 1 ms each
    assert report.ess_per_second_mean == pytest.approx(report.mean_ess / 5.0)
    assert report.ks_stats.shape == (100,)
    assert report.ks_mean == pytest.approx(float(report.ks_stats.mean()))


def test_build_report_without_reference():
    samples = np.random.default_rng(9).standard_normal((500, 1))
    records = [make_record(1.0, 1.0) for _ in range(500)]
    report = build_report(records, samples)
    assert report.ks_stats is None
    assert report.ks_mean is None
