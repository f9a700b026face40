import numpy as np
import pytest

from app.autodiff import Rng, Tape, Tensor, backward, gradcheck, ops
from app.errors import NonFiniteError, ShapeError, TapeError


def test_add_broadcast_reduces_gradient_to_operand_shape():
    a = Tensor(np.ones((3, 4)), requires_grad=True)
    b = Tensor(np.arange(4.0), requires_grad=True)
    with Tape():
        loss = ops.sum_(ops.add(a, b))
        backward(loss)
    np.testing.assert_array_equal(a.grad, np.ones((3, 4)))
    np.testing.assert_array_equal(b.grad, np.full(4, 3.0))


def test_matmul_gradients():
    a_val = np.array([[1.0, 2.0], [3.0, 4.0]])
    b_val = np.array([[0.5], [-1.0]])
    a = Tensor(a_val, requires_grad=True)
    b = Tensor(b_val, requires_grad=True)
    with Tape():
        backward(ops.sum_(ops.matmul(a, b)))
    np.testing.assert_allclose(a.grad, np.ones((2, 1)) @ b_val.T)
    np.testing.assert_allclose(b.grad, a_val.T @ np.ones((2, 1)))


def test_shape_error_names_both_shapes():
    with pytest.raises(ShapeError, match=r"\(3, 4\).*\(5,\)"):
        ops.add(Tensor(np.ones((3, 4))), Tensor(np.ones(5)))


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))


def test_non_finite_input_raises():
    with pytest.raises(NonFiniteError):
        Tensor([1.0, np.nan])


def test_overflowing_op_raises_non_finite():
    big = Tensor([1e200])
    with pytest.raises(NonFiniteError, match="mul"):
        ops.mul(big, big)


def test_backward_on_detached_loss_raises():
    x = Tensor([1.0, 2.0], requires_grad=True)
    loss = ops.sum_(x)  # no tape active
    with pytest.raises(TapeError, match="detached"):
        backward(loss)


def test_backward_needs_scalar():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with Tape():
        out = ops.mul(x, 2.0)
        with pytest.raises(TapeError, match="scalar"):
            backward(out)


def test_gradients_accumulate_across_backward_calls():
    x = Tensor([1.0, -2.0], requires_grad=True)
    for _ in range(2):
        with Tape():
            backward(ops.sum_(ops.mul(x, x)))
    np.testing.assert_array_equal(x.grad, 2 * 2 * np.array([1.0, -2.0]))
    x.zero_grad()
    assert x.grad is None


def test_tensor_data_is_read_only():
    x = Tensor([1.0, 2.0])
    with pytest.raises(ValueError):
        x.data[0] = 5.0


def test_constant_inputs_record_nothing():
    with Tape() as tape:
        ops.add(Tensor([1.0]), Tensor([2.0]))
    assert len(tape) == 0


def test_relu_gradient_is_zero_on_negative_side():
    x = Tensor([-1.0, 0.5, 2.0], requires_grad=True)
    with Tape():
        backward(ops.sum_(ops.relu(x)))
    np.testing.assert_array_equal(x.grad, [0.0, 1.0, 1.0])


def test_softmax_cross_entropy_value():
    logits = np.array([[2.0, 0.0, -1.0], [0.1, 0.2, 0.3]])
    labels = np.array([0, 2])
    expected = -np.mean(
        [logits[i, labels[i]] - np.log(np.exp(logits[i]).sum()) for i in range(2)]
    )
    assert ops.softmax_cross_entropy(Tensor(logits), labels).item() == pytest.approx(expected, rel=1e-12)


def test_softmax_cross_entropy_rejects_bad_labels():
    with pytest.raises(ShapeError):
        ops.softmax_cross_entropy(Tensor(np.zeros((2, 3))), np.array([0, 3]))


def test_conv_and_pool_shapes():
    x = Tensor(np.ones((2, 1, 8, 8)))
    k = Tensor(np.ones((4, 1, 5, 5)))
    out = ops.conv2d(x, k)
    assert out.shape == (2, 4, 4, 4)
    np.testing.assert_array_equal(out.data, np.full((2, 4, 4, 4), 25.0))
    assert ops.maxpool2d(out, 2).shape == (2, 4, 2, 2)


def test_maxpool_picks_window_maximum():
    x = np.arange(16.0).reshape(1, 1, 4, 4)
    out = ops.maxpool2d(Tensor(x), 2)
    np.testing.assert_array_equal(out.data.reshape(2, 2), [[5.0, 7.0], [13.0, 15.0]])


def test_embed_lookup_accumulates_repeated_rows():
    table = Tensor(np.arange(6.0).reshape(3, 2), requires_grad=True)
    with Tape():
        backward(ops.sum_(ops.embed_lookup(table, np.array([[0, 2, 0]]))))
    np.testing.assert_array_equal(table.grad, [[2.0, 2.0], [0.0, 0.0], [1.0, 1.0]])


def test_dropout_is_identity_in_eval_mode():
    x = Tensor(np.ones((3, 3)))
    assert ops.dropout(x, 0.5, None, training=False) is x


def test_gradcheck_smooth_function():
    point = Rng(3).normal((4,))
    error = gradcheck(lambda t: ops.sum_(ops.mul(ops.tanh(t), t)), point)
    assert error < 1e-6


def test_gradcheck_rejects_non_positive_step():
    with pytest.raises(ValueError, match="step"):
        gradcheck(lambda t: ops.sum_(t), np.zeros(2), step=0.0)


def test_rng_is_reproducible_and_children_are_independent():
    a = Rng(7).normal((5,))
    b = Rng(7).normal((5,))
    np.testing.assert_array_equal(a, b)
    left = Rng(7).child("left").normal((5,))
    right = Rng(7).child("right").normal((5,))
    assert not np.array_equal(left, right)
    np.testing.assert_array_equal(left, Rng(7).child("left").normal((5,)))


def test_bernoulli_extremes_are_exact():
    rng = Rng(0)
    assert rng.bernoulli(0.0, (1000,)).sum() == 0.0
    assert rng.bernoulli(1.0, (1000,)).sum() == 1000.0
    with pytest.raises(ValueError):
        rng.bernoulli(1.5, (2,))
