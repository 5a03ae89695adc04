import numpy as np
import pytest

from fedcsa.errors import DimensionMismatch, EmptyInput, SingularSystem
from fedcsa.regression import (
    Hyperparameter,
    LinearModel,
    fit_flattened_iw_ls,
    fit_ridge,
    predict,
    square_loss,
)

X3 = np.array([[1.0], [2.0], [3.0]])
Y3 = np.array([1.0, 2.0, 3.0])
ONES3 = np.ones(3)


def test_square_loss():
    assert square_loss(3, 3) == 0.0
    assert square_loss(2, 0) == 4.0
    assert square_loss(-1, 2) == 9.0


def test_hyperparameter_range():
    assert Hyperparameter(0.0).value == 0.0
    assert Hyperparameter(1).value == 1.0
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(ValueError):
            Hyperparameter(bad)


def test_ridge_exact_linear_data():
    m = fit_ridge(X3, Y3, ONES3, 0.0, fit_intercept=False)
    assert m.weights[0] == pytest.approx(1.0, abs=1e-9)
    assert m.intercept == 0.0


def test_ridge_shrinks_to_zero():
    m = fit_ridge(X3, Y3, ONES3, 1e6, fit_intercept=False)
    assert abs(m.weights[0]) < 1e-3


def test_ridge_hand_value_14_over_17():
    # (sum x^2 / n + theta)^-1 (sum x y / n) = (14/3 + 1)^-1 * 14/3
    m = fit_ridge(X3, Y3, ONES3, 1.0, fit_intercept=False)
    assert m.weights[0] == pytest.approx(14 / 17, abs=1e-9)


def test_ridge_singular_policies():
    x = np.array([[1.0, 1.0], [2.0, 2.0]])
    y = np.array([1.0, 2.0])
    with pytest.raises(SingularSystem):
        fit_ridge(x, y, np.ones(2), 0.0, fit_intercept=False)
    m = fit_ridge(x, y, np.ones(2), 0.0, fit_intercept=False, singular="minnorm")
    np.testing.assert_allclose(m.weights, [0.5, 0.5], atol=1e-9)


def test_ridge_input_validation():
    with pytest.raises(DimensionMismatch):
        fit_ridge(X3, Y3[:2], ONES3, 0.0)
    with pytest.raises(EmptyInput):
        fit_ridge(np.zeros((0, 1)), np.zeros(0), np.zeros(0), 0.0)
    with pytest.raises(ValueError):
        fit_ridge(X3, Y3, np.array([1.0, -1.0, 1.0]), 0.0)
    with pytest.raises(ValueError):
        fit_ridge(X3, Y3, np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        fit_ridge(X3, Y3, ONES3, -0.5)


def test_flattened_theta_zero_is_ols():
    ratios = np.array([9.0, 0.1, 3.3])
    a = fit_flattened_iw_ls(X3, Y3, ratios, 0.0, fit_intercept=False)
    b = fit_ridge(X3, Y3, ONES3, 0.0, fit_intercept=False)
    np.testing.assert_allclose(a.weights, b.weights, atol=1e-12)
    assert not a.degenerate_weights


def test_flattened_unit_ratios_are_inert():
    x = np.array([[0.0, 1.0], [1.0, 0.5], [2.0, -1.0], [3.0, 2.0]])
    y = np.array([0.5, 1.0, -0.5, 2.0])
    for theta in (0.3, 1.0):
        a = fit_flattened_iw_ls(x, y, np.ones(4), theta)
        b = fit_ridge(x, y, np.ones(4), 0.0)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-12)
        assert a.intercept == pytest.approx(b.intercept, abs=1e-12)


def test_flattened_hand_value():
    # second point has weight 0, so the fit passes through (1, 1)
    m = fit_flattened_iw_ls(
        np.array([[1.0], [2.0]]), np.array([1.0, 4.0]), [4.0, 0.0], 1.0,
        fit_intercept=False,
    )
    assert m.weights[0] == pytest.approx(1.0, abs=1e-9)
    assert not m.degenerate_weights


def test_flattened_degenerate_fallback():
    m = fit_flattened_iw_ls(X3, Y3, np.zeros(3), 1.0, fit_intercept=False)
    assert m.degenerate_weights
    ols = fit_ridge(X3, Y3, ONES3, 0.0, fit_intercept=False)
    np.testing.assert_allclose(m.weights, ols.weights, atol=1e-12)
    # 0 ** 0 counts as 1, so theta = 0 stays non-degenerate
    assert not fit_flattened_iw_ls(X3, Y3, np.zeros(3), 0.0).degenerate_weights


def test_predict_examples():
    assert predict(LinearModel([1.0], 0.0), [[2.0]]) == pytest.approx([2.0])
    assert predict(LinearModel([0.0], 5.0), [[7.0]]) == pytest.approx([5.0])
    assert predict(LinearModel([1.0, 2.0], 1.0), [[3.0, 4.0]]) == pytest.approx([12.0])
    with pytest.raises(DimensionMismatch):
        predict(LinearModel([1.0], 0.0), [[1.0, 2.0]])


def _random_problem(rng, n=30, d=4):
    x = rng.normal(size=(n, d))
    y = rng.normal(size=n)
    w = rng.uniform(0.1, 2.0, size=n)
    return x, y, w


def test_stationarity_residual():
    """The fitted coefficients satisfy the centered normal equations."""
    rng = np.random.default_rng(11)
    for trial in range(20):
        x, y, w = _random_problem(rng)
        theta = rng.uniform(0.0, 1.0)
        m = fit_ridge(x, y, w, theta)
        total = w.sum()
        xc = x - (w @ x) / total
        yc = y - (w @ y) / total
        gram = (xc * w[:, None]).T @ xc / total
        rhs = xc.T @ (w * yc) / total
        resid = np.linalg.norm((gram + theta * np.eye(x.shape[1])) @ m.weights - rhs)
        assert resid <= 1e-8 * (1.0 + np.linalg.norm(rhs))


def test_monotone_shrinkage():
    rng = np.random.default_rng(5)
    x, y, w = _random_problem(rng, n=50, d=3)
    norms = [
        np.linalg.norm(fit_ridge(x, y, w, t).weights)
        for t in np.linspace(0.0, 1.0, 11)
    ]
    diffs = np.diff(norms)
    assert np.all(diffs <= 1e-10)


def test_integer_weights_equal_replication():
    rng = np.random.default_rng(3)
    x, y, _ = _random_problem(rng, n=12, d=2)
    counts = rng.integers(1, 4, size=12)
    weighted = fit_ridge(x, y, counts.astype(float), 0.3)
    replicated = fit_ridge(
        np.repeat(x, counts, axis=0), np.repeat(y, counts), np.ones(counts.sum()), 0.3
    )
    np.testing.assert_allclose(weighted.weights, replicated.weights, atol=1e-8)
    assert weighted.intercept == pytest.approx(replicated.intercept, abs=1e-8)


def test_fit_predict_recovers_noiseless_linear():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(40, 5))
    truth = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
    y = x @ truth + 0.7
    m = fit_ridge(x, y, np.ones(40), 0.0)
    np.testing.assert_allclose(predict(m, x), y, atol=1e-8)
