import numpy as np
import pytest

import ltr


def test_best_rank1_fixture():
    t = np.array([[0.1, 0.2], [0.3, 0.4]])
    q, lam, factors = ltr.best_rank1(t)
    np.testing.assert_allclose(q, [[0.12, 0.18], [0.28, 0.42]], atol=1e-12)
    assert lam == pytest.approx(1.0)
    np.testing.assert_allclose(factors[0], [0.3, 0.7])
    assert ltr.kl_divergence(t, q) == pytest.approx(0.004021743230482457, rel=1e-12)


def test_coordinates_round_trip():
    rng = np.random.default_rng(0)
    p = rng.uniform(0.05, 1.0, size=(3, 2, 4))
    p /= p.sum()
    np.testing.assert_allclose(ltr.from_theta(ltr.theta(p)), p, atol=1e-12)
    np.testing.assert_allclose(ltr.from_eta(ltr.eta(p)), p, atol=1e-12)
    np.testing.assert_allclose(ltr.eta(np.array([[0.1, 0.2], [0.3, 0.4]])), [[1.0, 0.6], [0.7, 0.4]])


def test_reduce_meets_rank_and_certifies():
    rng = np.random.default_rng(1)
    t = rng.uniform(0.05, 1.0, size=(6, 5, 4))
    q, spec = ltr.reduce(t, ranks=[2, 3, 1], seed=7)
    assert q.shape == t.shape
    assert all(r <= k for r, k in zip(ltr.tucker_rank(q), [2, 3, 1]))
    assert [len(c) for c in spec] == [2, 3, 1]
    cert = ltr.certify(t, q, spec)
    assert cert["pass"]
    q2, _ = ltr.reduce(t, indices=spec, mode_order=[3, 1, 2])
    np.testing.assert_allclose(q2, q, atol=1e-12)


def test_mode_expansion_ordering():
    t = np.arange(1.0, 9.0).reshape(2, 2, 2)
    np.testing.assert_array_equal(ltr.mode_k_expansion(t, 1), [[1, 3, 2, 4], [5, 7, 6, 8]])


def test_ntd_trace_is_monotone():
    rng = np.random.default_rng(2)
    t = rng.uniform(size=(5, 4, 3))
    core, factors, trace = ltr.ntd_fit(t, [2, 2, 2], objective="kl", max_iters=30)
    assert core.shape == (2, 2, 2)
    assert [f.shape for f in factors] == [(5, 2), (4, 2), (3, 2)]
    assert all(b <= a + 1e-10 for a, b in zip(trace, trace[1:]))


def test_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        ltr.reduce(np.ones((3, 3)), ranks=[4, 1])
    with pytest.raises(ValueError):
        ltr.theta(np.array([[0.0, 0.5], [0.25, 0.25]]))
    assert ltr.worst_case_cost([30, 30, 30], [10, 10, 10]) == 27000000
