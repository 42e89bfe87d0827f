import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senet.errors import ConfigError, DataError
from senet.linalg import project_residual
from senet.shrinkage import (
    ShrinkageConfig,
    apply_filter,
    build_class_filter,
    class_spectrum,
    tikhonov_gain,
)


def test_gain_values():
    assert tikhonov_gain(0.0, 5.0) == 1.0
    assert tikhonov_gain(2.0, 2.0) == 0.5
    assert tikhonov_gain(7.0, 0.0) == 1.0


def test_gain_null_branch_uses_threshold():
    assert tikhonov_gain(1e-12, 3.0, rank_threshold=1e-10) == 1.0
    assert tikhonov_gain(-1e-13, 3.0, rank_threshold=1e-10) == 1.0
    assert tikhonov_gain(1.0, 3.0, rank_threshold=1e-10) == 0.25


def test_gain_rejects_negative_lambda():
    with pytest.raises(ConfigError):
        tikhonov_gain(1.0, -1.0)
    with pytest.raises(ConfigError):
        ShrinkageConfig(-0.5)
    with pytest.raises(ConfigError):
        ShrinkageConfig(1.0, rank_epsilon_rel=0.0)


def test_gain_monotone_on_grid():
    lams = np.logspace(-3, 6, 20)
    gammas = np.logspace(-2, 4, 20)
    for gamma in gammas:
        g = tikhonov_gain(gamma, lams)
        assert np.all(np.diff(g) < 0)
    for lam in lams:
        g = tikhonov_gain(gammas, lam)
        assert np.all(np.diff(g) > 0)


def test_single_support_gives_identity(rng):
    f = build_class_filter(rng.standard_normal((1, 6)), ShrinkageConfig(3.0))
    assert np.array_equal(f.filter_matrix, np.eye(6))
    assert np.all(f.gains == 1.0)


def test_identical_supports_give_identity(rng):
    x = np.tile(rng.standard_normal(4), (3, 1))
    f = build_class_filter(x, ShrinkageConfig(100.0))
    assert np.array_equal(f.filter_matrix, np.eye(4))


def test_lambda_zero_is_identity(rng):
    for k in (2, 5, 30):
        f = build_class_filter(rng.standard_normal((k, 8)), ShrinkageConfig(0.0))
        assert np.max(np.abs(f.filter_matrix - np.eye(8))) <= 1e-9


def test_large_lambda_approaches_null_space_projector(rng):
    x = rng.standard_normal((3, 5))
    f = build_class_filter(x, ShrinkageConfig(1e12))
    basis = f.eigen.eigenvectors[:, :2].T
    assert np.all(f.eigen.eigenvalues[2:] <= 1e-10 * f.eigen.eigenvalues[0])
    projector = np.stack([project_residual(e, basis) for e in np.eye(5)])
    assert np.max(np.abs(f.filter_matrix - projector)) <= 1e-6


def test_filter_invariants(rng):
    for _ in range(50):
        k, d = rng.integers(1, 8), rng.integers(2, 10)
        lam = 10 ** rng.uniform(-2, 5)
        f = build_class_filter(rng.standard_normal((k, d)) * rng.uniform(0.1, 10), ShrinkageConfig(lam))
        m = f.filter_matrix
        assert np.array_equal(m, m.T)
        assert np.all((f.gains > 0) & (f.gains <= 1))
        spectrum = np.linalg.eigvalsh(m)
        assert np.max(np.abs(np.sort(spectrum) - np.sort(f.gains))) <= 1e-9
        w = f.eigen.eigenvectors
        assert np.max(np.abs(m - w @ np.diag(f.gains) @ w.T)) <= 1e-9


def test_apply_filter_examples(rng):
    x = rng.standard_normal((4, 6))
    ident = build_class_filter(x, ShrinkageConfig(0.0))
    v = rng.standard_normal(6)
    np.testing.assert_allclose(apply_filter(ident, v), v, atol=1e-12)

    f = build_class_filter(x, ShrinkageConfig(2.5))
    w = f.eigen.eigenvectors
    for n in range(6):
        assert np.max(np.abs(apply_filter(f, w[:, n]) - f.gains[n] * w[:, n])) <= 1e-9
    dense = w @ np.diag(f.gains) @ w.T @ v
    assert np.max(np.abs(apply_filter(f, v) - dense)) <= 1e-10
    with pytest.raises(DataError):
        apply_filter(f, np.ones(5))


def test_contraction_on_span_identity_off_span(rng):
    x = rng.standard_normal((4, 7))
    f = build_class_filter(x, ShrinkageConfig(1.5))
    span = class_spectrum(x).span_basis()
    inside = rng.standard_normal(3) @ span
    assert np.linalg.norm(apply_filter(f, inside)) < np.linalg.norm(inside)
    outside = project_residual(rng.standard_normal(7), span)
    assert np.max(np.abs(apply_filter(f, outside) - outside)) <= 1e-8


def test_lambda_continuity(rng):
    x = rng.standard_normal((5, 6))
    for lam in (0.5, 3.0, 40.0):
        m0 = build_class_filter(x, ShrinkageConfig(lam)).filter_matrix
        for rel in (1e-3, 1e-5):
            m1 = build_class_filter(x, ShrinkageConfig(lam * (1 + rel))).filter_matrix
            assert np.max(np.abs(m1 - m0)) <= 1e-6 + rel


def test_translation_invariance(rng):
    x = rng.standard_normal((5, 6))
    t = 10 * rng.standard_normal(6)
    cfg = ShrinkageConfig(4.0)
    a = build_class_filter(x, cfg)
    b = build_class_filter(x + t, cfg)
    assert np.max(np.abs(a.filter_matrix - b.filter_matrix)) <= 1e-9
    np.testing.assert_allclose(b.mean, a.mean + t)


@settings(max_examples=200, deadline=None)
@given(
    gamma=st.floats(0.0, 1e8, allow_nan=False),
    lam=st.floats(0.0, 1e8, allow_nan=False),
    bump=st.floats(1e-3, 1e3),
)
def test_gain_bounded_and_monotone_property(gamma, lam, bump):
    g = float(tikhonov_gain(gamma, lam))
    assert 0.0 <= g <= 1.0
    assert float(tikhonov_gain(gamma, lam + bump)) <= g
