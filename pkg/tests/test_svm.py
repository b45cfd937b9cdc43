import numpy as np
import pytest

import qsvmf as q
from oracles import random_spec


def _kkt_ok(model, K, tol=None):
    tol = model.tol if tol is None else tol
    g = K @ (model.alphas * model.labels)
    r = model.labels * (g + model.bias) - 1.0
    for i in range(len(r)):
        a = model.alphas[i]
        if a < 1e-8:
            if r[i] < -tol:
                return False
        elif a > model.C - 1e-8:
            if r[i] > tol:
                return False
        elif abs(r[i]) > tol:
            return False
    return True


def _blob(n_per_class=20, seed=42, gap=3.0):
    rng = np.random.default_rng(seed)
    Xp = rng.normal(0, 0.6, size=(n_per_class, 2)) + [gap, 0.0]
    Xn = rng.normal(0, 0.6, size=(n_per_class, 2)) + [-gap, 0.0]
    X = np.vstack([Xp, Xn])
    y = np.array([1] * n_per_class + [-1] * n_per_class)
    return X, y


def test_two_point_identity_kernel():
    model = q.smo_train(np.eye(2), np.array([1, -1]), C=10.0)
    assert np.allclose(model.alphas, [1.0, 1.0], atol=1e-6)
    assert abs(model.bias) < 1e-6
    assert model.converged


def test_separable_blob():
    X, y = _blob()
    K = X @ X.T
    model = q.smo_train(K, y, C=1.0)
    assert model.converged
    assert q.accuracy(q.predict(model, K), y) == 1.0
    assert abs(float((model.alphas * y).sum())) <= 1e-8
    assert _kkt_ok(model, K)


def test_single_class_trivial_model():
    for label in (1, -1):
        model = q.smo_train(np.eye(4), np.full(4, label))
        assert model.converged
        assert np.all(model.alphas == 0)
        assert model.bias == float(label)
        assert np.all(q.predict(model, np.zeros((3, 4))) == label)


def test_alpha_box_and_balance_on_random_psd_kernels():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        spec = random_spec(rng, 2)
        X = rng.uniform(0, np.pi, size=(24, 6))
        K = q.kernel_matrix(spec, X)
        y = np.where(rng.random(24) < 0.5, 1, -1)
        if len(set(y.tolist())) < 2:
            y[0] = -y[0]
        model = q.smo_train(K, y, C=1.0)
        assert np.all(model.alphas >= 0.0)
        assert np.all(model.alphas <= 1.0)
        assert abs(float((model.alphas * y).sum())) <= 1e-8
        if model.converged:
            assert _kkt_ok(model, K), seed


def test_duplicate_conflicting_rows_do_not_crash():
    # identical rows with opposite labels make the data unseparable and put
    # eta on its flat-direction path
    X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    y = np.array([1, -1, 1, -1])
    model = q.smo_train(X @ X.T, y, C=1.0, max_passes=50)
    assert np.all(model.alphas >= 0.0) and np.all(model.alphas <= 1.0)
    assert abs(float((model.alphas * y).sum())) <= 1e-8


def test_training_is_deterministic():
    X, y = _blob(seed=7)
    K = X @ X.T
    a = q.smo_train(K, y)
    b = q.smo_train(K, y)
    assert np.array_equal(a.alphas, b.alphas)
    assert a.bias == b.bias


def test_smo_input_validation():
    K = np.eye(3)
    y = np.array([1, -1, 1])
    with pytest.raises(ValueError, match="square"):
        q.smo_train(np.ones((2, 3)), y[:2])
    with pytest.raises(ValueError, match="length"):
        q.smo_train(K, y[:2])
    with pytest.raises(ValueError, match="\\+1 or -1"):
        q.smo_train(K, np.array([1, 0, 1]))
    with pytest.raises(ValueError, match="positive"):
        q.smo_train(K, y, C=0.0)
    bad = K.copy()
    bad[0, 1] = 0.5
    with pytest.raises(ValueError, match="symmetric"):
        q.smo_train(bad, y)


def test_decision_sign_convention():
    model = q.smo_train(np.eye(2), np.array([1, -1]), C=10.0)
    # zero cross-kernel rows give decision exactly b = 0 -> class +1
    assert np.all(q.predict(model, np.zeros((2, 2))) == 1)


def test_decision_values_shape_check():
    model = q.smo_train(np.eye(2), np.array([1, -1]))
    with pytest.raises(ValueError, match="columns"):
        q.decision_values(model, np.zeros((2, 3)))


def test_support_indices():
    X, y = _blob(seed=3)
    model = q.smo_train(X @ X.T, y)
    sup = model.support_indices
    assert np.all(model.alphas[sup] > 1e-8)
    assert len(sup) >= 2


def test_accuracy_helper():
    assert q.accuracy(np.array([1, -1, 1]), np.array([1, 1, 1])) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        q.accuracy(np.array([1]), np.array([1, 1]))


def test_kernel_svc_estimator():
    X, y = _blob(seed=9)
    K = X @ X.T
    clf = q.KernelSVC(C=1.0).fit(K, y)
    assert clf.score(K, y) == 1.0
    assert clf.decision_function(K).shape == (40,)
    assert clf.get_params() == {"C": 1.0, "tol": 1e-3, "max_passes": 200}
    with pytest.raises(ValueError, match="not fitted"):
        q.KernelSVC().predict(K)


def test_kernel_svc_clones():
    from sklearn.base import clone

    clf = q.KernelSVC(C=2.0, tol=1e-4)
    dup = clone(clf)
    assert dup.get_params() == clf.get_params()


def test_linear_kernel():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 3))
    B = rng.normal(size=(5, 3))
    K = q.classical_kernel(q.ClassicalKernel("linear"), A, B)
    assert np.allclose(K, A @ B.T)


def test_poly_kernel_frozen_entry():
    A = np.array([[1.0, 2.0]])
    B = np.array([[3.0, 1.0]])
    K = q.classical_kernel(q.ClassicalKernel("poly", gamma=0.5), A, B)
    # (0.5 * 5 + 1)^3 = 42.875
    assert np.isclose(K[0, 0], 42.875)


def test_rbf_kernel_frozen_entry():
    A = np.array([[0.0, 0.0]])
    B = np.array([[3.0, 4.0]])
    K = q.classical_kernel(q.ClassicalKernel("rbf", gamma=0.1), A, B)
    assert np.isclose(K[0, 0], np.exp(-2.5))
    assert np.allclose(np.diag(q.classical_kernel(q.ClassicalKernel("rbf", gamma=0.1), A)), 1.0)


def test_sigmoid_kernel_frozen_entry():
    A = np.array([[1.0, 1.0]])
    B = np.array([[0.5, 0.5]])
    K = q.classical_kernel(q.ClassicalKernel("sigmoid", gamma=1.0), A, B)
    assert np.isclose(K[0, 0], np.tanh(1.0))


def test_gamma_scale_rule():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(50, 4))
    g = q.gamma_scale(X)
    assert np.isclose(g, 1.0 / (4 * X.var()))
    with pytest.raises(ValueError, match="constant"):
        q.gamma_scale(np.ones((5, 2)))


def test_gamma_none_resolves_from_first_argument():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(10, 3))
    K_auto = q.classical_kernel(q.ClassicalKernel("rbf"), X)
    K_explicit = q.classical_kernel(q.ClassicalKernel("rbf", gamma=q.gamma_scale(X)), X)
    assert np.array_equal(K_auto, K_explicit)


def test_coef0_defaults():
    assert q.ClassicalKernel("poly").resolved_coef0() == 1.0
    assert q.ClassicalKernel("sigmoid").resolved_coef0() == 0.0
    assert q.ClassicalKernel("poly", coef0=2.5).resolved_coef0() == 2.5


def test_unknown_kernel_kind():
    with pytest.raises(ValueError, match="unknown kernel"):
        q.ClassicalKernel("cubic")
