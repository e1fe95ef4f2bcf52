import numpy as np
import numpy.testing as npt
import pytest
from mpmath import mp

from glasso_prune.errors import ShapeMismatchError
from glasso_prune.linalg import (
    as_matrix,
    as_vector,
    column_norms,
    matvec,
    row_norms,
    sigmoid,
    softmax,
    softmax_cross_entropy,
)


def test_matvec_identity():
    m = as_matrix(np.eye(3))
    v = as_vector([1.0, 2.0, 3.0])
    npt.assert_array_equal(matvec(m, v), [1.0, 2.0, 3.0])


def test_matvec_projection():
    m = as_matrix([[1.0, 0.0], [0.0, 0.0]])
    npt.assert_array_equal(matvec(m, as_vector([5.0, 7.0])), [5.0, 0.0])


def test_matvec_against_triple_loop():
    rng = np.random.default_rng(3)
    m = as_matrix(rng.standard_normal((4, 4)))
    v = as_vector(rng.standard_normal(4))
    expected = np.zeros(4)
    for i in range(4):
        for j in range(4):
            expected[i] += m[i, j] * v[j]
    npt.assert_allclose(matvec(m, v), expected, rtol=0, atol=1e-12)


def test_matvec_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        matvec(as_matrix(np.eye(3)), as_vector([1.0, 2.0]))


def test_matvec_linearity():
    rng = np.random.default_rng(11)
    for _ in range(10):
        m = as_matrix(rng.standard_normal((5, 7)))
        u = as_vector(rng.standard_normal(7))
        v = as_vector(rng.standard_normal(7))
        npt.assert_allclose(
            matvec(m, u + v), matvec(m, u) + matvec(m, v), atol=1e-10
        )


def test_sigmoid_symmetry_point():
    npt.assert_array_equal(sigmoid(as_vector([0.0])), [0.5])


def test_sigmoid_saturation_no_nan():
    out = sigmoid(as_vector([-1000.0, 1000.0]))
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(0.0, abs=1e-300)
    assert out[1] == pytest.approx(1.0, abs=1e-15)


def test_sigmoid_closed_form():
    npt.assert_allclose(sigmoid(as_vector([np.log(3.0)])), [0.75], atol=1e-15)


def test_sigmoid_open_interval():
    # strict bounds hold up to |x| ~ 36; beyond that float64 rounds to 1.0
    rng = np.random.default_rng(4)
    out = sigmoid(as_vector(rng.standard_normal(100) * 8))
    assert np.all(out > 0.0)
    assert np.all(out < 1.0)


def test_cross_entropy_uniform_logits():
    for k in (2, 5, 9):
        loss, grad = softmax_cross_entropy(as_vector(np.full(k, 1.7)), 0)
        assert loss == pytest.approx(np.log(k), abs=1e-12)
        npt.assert_allclose(grad, np.full(k, 1.0 / k) - np.eye(k)[0], atol=1e-12)


def test_cross_entropy_saturated_correct():
    loss, _ = softmax_cross_entropy(as_vector([1000.0, 0.0]), 0)
    assert loss == pytest.approx(0.0, abs=1e-12)


def test_cross_entropy_high_precision_oracle():
    # direct formula evaluated at 128-bit precision
    rng = np.random.default_rng(17)
    logits = rng.standard_normal(5) * 3
    target = 2
    loss, _ = softmax_cross_entropy(as_vector(logits), target)

    mp.prec = 128
    exps = [mp.e ** mp.mpf(float(x)) for x in logits]
    expected = -mp.log(exps[target] / mp.fsum(exps))
    assert abs(loss - float(expected)) < 1e-12


def test_cross_entropy_grad_sums_to_zero():
    rng = np.random.default_rng(8)
    for _ in range(5):
        _, grad = softmax_cross_entropy(as_vector(rng.standard_normal(6)), 3)
        assert abs(grad.sum()) < 1e-12


def test_cross_entropy_grad_finite_differences():
    rng = np.random.default_rng(21)
    logits = as_vector(rng.standard_normal(4))
    _, grad = softmax_cross_entropy(logits, 1)
    h = 1e-5
    for i in range(4):
        bumped = logits.copy()
        bumped[i] += h
        hi, _ = softmax_cross_entropy(bumped, 1)
        bumped[i] -= 2 * h
        lo, _ = softmax_cross_entropy(bumped, 1)
        numeric = (hi - lo) / (2 * h)
        assert grad[i] == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_cross_entropy_target_out_of_range():
    with pytest.raises(IndexError):
        softmax_cross_entropy(as_vector([0.0, 1.0]), 2)
    with pytest.raises(IndexError):
        softmax_cross_entropy(as_vector([0.0, 1.0]), -1)


def test_softmax_sums_to_one():
    rng = np.random.default_rng(2)
    probs = softmax(as_vector(rng.standard_normal(7) * 100))
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs >= 0.0)


def test_column_norms_known_values():
    npt.assert_array_equal(column_norms(as_matrix([[3.0, 0.0], [4.0, 0.0]])), [5.0, 0.0])
    npt.assert_array_equal(column_norms(as_matrix(np.eye(2))), [1.0, 1.0])


def test_column_norms_against_loop():
    rng = np.random.default_rng(5)
    m = as_matrix(rng.standard_normal((3, 4)))
    got = column_norms(m)
    assert got.shape == (4,)
    for j in range(4):
        acc = 0.0
        for i in range(3):
            acc += m[i, j] ** 2
        assert got[j] ** 2 == pytest.approx(acc, abs=1e-12)


def test_row_norms_known_values():
    npt.assert_array_equal(row_norms(as_matrix([[3.0, 4.0], [0.0, 0.0]])), [5.0, 0.0])
    npt.assert_array_equal(row_norms(as_matrix(np.eye(2))), [1.0, 1.0])


def test_row_norms_transpose_duality():
    rng = np.random.default_rng(6)
    for _ in range(5):
        m = as_matrix(rng.standard_normal((4, 6)))
        npt.assert_array_equal(row_norms(m), column_norms(as_matrix(m.T)))
