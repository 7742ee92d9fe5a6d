import math

import pytest

import betheperm as bp

J3 = [[1.0, 1.0, 1.0]] * 3


def test_estimate_against_exact():
    m = bp.random_matrix(6, 0.0, 50.0, 12)
    result = bp.estimate_permanent(m)
    exact = bp.ryser_permanent(m)
    assert result.converged
    assert result.iterations >= 1
    assert result.log_estimate == pytest.approx(-result.f_bethe)
    assert result.log_estimate < exact.log_magnitude
    assert exact.log_magnitude - result.log_estimate < 3.0


def test_constant_matrix_closed_form():
    result = bp.estimate_permanent(J3)
    assert result.log_estimate == pytest.approx(math.log(64.0 / 27.0), abs=1e-9)


def test_exact_oracles_agree():
    m = bp.random_matrix(5, 0.0, 50.0, 3)
    a = bp.ryser_permanent(m)
    b = bp.brute_force_permanent(m)
    assert a.sign == b.sign == 1
    assert a.log_magnitude == pytest.approx(b.log_magnitude, abs=1e-10)


def test_belief_matrix_is_doubly_stochastic():
    beliefs = bp.belief_matrix(bp.random_matrix(7, 0.0, 50.0, 4))
    for row in beliefs:
        assert sum(row) == pytest.approx(1.0, abs=1e-12)
    for j in range(7):
        assert sum(row[j] for row in beliefs) == pytest.approx(1.0, abs=1e-6)


def test_config_fields_roundtrip():
    config = bp.BPConfig()
    assert config.epsilon == 0.5
    assert config.tolerance == 1e-10
    assert config.max_iterations == 10000
    assert config.init == bp.MessageInit.uniform
    assert config.zero_policy == bp.ZeroEntryPolicy.clamp
    config.epsilon = 0.9
    config.init = bp.MessageInit.random
    config.init_seed = 7
    result = bp.estimate_permanent(bp.random_matrix(5, 0.0, 50.0, 5), config)
    assert result.converged


def test_sampler_is_deterministic():
    m = bp.random_matrix(5, 0.0, 50.0, 6)
    a = bp.sample_permanent(m, samples=2000, seed=9)
    b = bp.sample_permanent(m, samples=2000, seed=9)
    c = bp.sample_permanent(m, samples=2000, seed=10)
    assert a.log_estimate == b.log_estimate
    assert a.samples_used == 2000
    assert a.log_estimate != c.log_estimate
    truth = bp.ryser_permanent(m).log_magnitude
    assert abs(a.log_estimate - truth) < 1.0


def test_singleton_kernel_matches_rbf():
    a = [[0.1, 0.4, 0.9]]
    b = [[0.3, 0.2, 0.5]]
    d2 = sum((x - y) ** 2 for x, y in zip(a[0], b[0]))
    expected = -d2 / (2.0 * 0.5**2)
    assert bp.permanent_kernel(a, b, 0.5) == pytest.approx(expected, abs=1e-12)
    k = bp.rbf_subkernel_matrix(a, b, 0.5)
    assert k[0][0] == pytest.approx(math.exp(expected), abs=1e-14)


def test_gram_report():
    sets = [[[0.1 * (i + j), 0.2 * j] for j in range(3)] for i in range(4)]
    report = bp.gram_psd_check(sets, 0.5)
    assert report.m == 4
    assert len(report.gram) == 16
    for i in range(4):
        for j in range(4):
            assert report.gram[i * 4 + j] == report.gram[j * 4 + i]
    assert math.isfinite(report.min_eigenvalue)
    assert isinstance(report.psd, bool)
    assert report.jitter_used >= 0.0


def test_sinkhorn():
    scaled = bp.sinkhorn_scale(bp.random_matrix(4, 1.0, 9.0, 8), 1e-10, 10000)
    for row in scaled:
        assert sum(row) == pytest.approx(1.0, abs=1e-8)
    for j in range(4):
        assert sum(row[j] for row in scaled) == pytest.approx(1.0, abs=1e-8)


def test_kendall():
    assert bp.kendall_distance([0, 1, 2], [0, 1, 2]) == 0.0
    assert bp.kendall_distance([0, 1, 2], [2, 1, 0]) == 1.0
    assert bp.kendall_distance([0, 1, 2], [0, 2, 1]) == pytest.approx(1.0 / 3.0)


def test_errors_map_to_value_error():
    with pytest.raises(ValueError):
        bp.estimate_permanent([[1.0, 2.0], [3.0]])
    with pytest.raises(ValueError):
        bp.estimate_permanent([[1.0, -2.0], [3.0, 4.0]])
    config = bp.BPConfig()
    config.zero_policy = bp.ZeroEntryPolicy.reject
    with pytest.raises(ValueError):
        bp.estimate_permanent([[0.0, 2.0], [3.0, 4.0]], config)
    with pytest.raises(ValueError):
        bp.brute_force_permanent([[1.0] * 13] * 13)
    assert issubclass(bp.DomainError, ValueError)
    assert issubclass(bp.ShapeError, ValueError)
    assert issubclass(bp.SizeError, ValueError)
    assert issubclass(bp.NumericError, ArithmeticError)
