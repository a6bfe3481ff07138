import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import graphsumm.autodiff as ad
from graphsumm.autodiff import Tape, Tensor, backward, finite_diff_check
from graphsumm.errors import ContractError, DataError, ShapeError


def test_tensor_rejects_rank_3():
    with pytest.raises(ShapeError):
        Tensor(np.zeros((2, 2, 2)))


def test_matmul_forward_and_grad():
    a = Tensor([[1.0, 2.0], [3.0, 4.0]], requires_grad=True)
    b = Tensor([[5.0], [6.0]], requires_grad=True)
    with Tape() as tape:
        tape.watch(a, b)
        out = ad.sum_all(ad.matmul(a, b))
        tape.backward(out)
    np.testing.assert_allclose(a.grad, [[5.0, 6.0], [5.0, 6.0]])
    np.testing.assert_allclose(b.grad, [[4.0], [6.0]])


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        ad.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


def test_spmm_matches_dense():
    rng = np.random.Generator(np.random.PCG64(0))
    dense = rng.normal(size=(4, 4)) * (rng.random((4, 4)) > 0.5)
    s = sp.csr_matrix(dense)
    x = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        out = ad.sum_all(ad.spmm(s, x))
        tape.backward(out)
    expected = dense.T @ np.ones((4, 3))
    np.testing.assert_allclose(x.grad, expected)


def test_add_row_broadcast_grad():
    a = Tensor(np.ones((3, 2)), requires_grad=True)
    b = Tensor(np.zeros((1, 2)), requires_grad=True)
    with Tape() as tape:
        tape.watch(a, b)
        tape.backward(ad.sum_all(ad.add(a, b)))
    np.testing.assert_allclose(b.grad, [[3.0, 3.0]])
    np.testing.assert_allclose(a.grad, np.ones((3, 2)))


def test_add_incompatible_shapes():
    with pytest.raises(ShapeError):
        ad.add(Tensor(np.zeros((3, 2))), Tensor(np.zeros((2, 2))))


def test_relu_grad_zero_at_negative():
    x = Tensor([[-1.0, 2.0]], requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        tape.backward(ad.sum_all(ad.relu(x)))
    np.testing.assert_allclose(x.grad, [[0.0, 1.0]])


def test_sigmoid_clamps_extremes():
    x = Tensor([[-500.0, 0.0, 500.0]])
    out = ad.sigmoid(x)
    assert np.all(np.isfinite(out.data))
    assert out.data[0, 0] == pytest.approx(1.0 / (1.0 + np.exp(30.0)))
    assert out.data[0, 1] == 0.5
    assert out.data[0, 2] == pytest.approx(1.0 / (1.0 + np.exp(-30.0)))


def test_log_rejects_nonpositive():
    with pytest.raises(DataError):
        ad.log(Tensor([[0.0]]))


def test_clip_grad_masks_boundary():
    x = Tensor([[0.5, 2.0, -3.0]], requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        tape.backward(ad.sum_all(ad.clip(x, 0.0, 1.0)))
    np.testing.assert_allclose(x.grad, [[1.0, 0.0, 0.0]])


def test_concat_cols_splits_grad():
    a = Tensor(np.ones((2, 2)), requires_grad=True)
    b = Tensor(np.ones((2, 3)), requires_grad=True)
    with Tape() as tape:
        tape.watch(a, b)
        out = ad.concat_cols([a, b])
        assert out.shape == (2, 5)
        tape.backward(ad.sum_all(ad.scale(out, 2.0)))
    np.testing.assert_allclose(a.grad, np.full((2, 2), 2.0))
    np.testing.assert_allclose(b.grad, np.full((2, 3), 2.0))


def test_mul_grad():
    a = Tensor([[2.0, 3.0]], requires_grad=True)
    b = Tensor([[5.0, 7.0]], requires_grad=True)
    with Tape() as tape:
        tape.watch(a, b)
        tape.backward(ad.sum_all(ad.mul(a, b)))
    np.testing.assert_allclose(a.grad, [[5.0, 7.0]])
    np.testing.assert_allclose(b.grad, [[2.0, 3.0]])


def test_no_tape_means_inference():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    out = ad.relu(x)
    assert out.tape is None
    with pytest.raises(ContractError):
        backward(out)


def test_tape_single_use():
    x = Tensor(np.ones((1, 1)), requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        out = ad.scale(x, 2.0)
        tape.backward(out)
        with pytest.raises(ContractError, match="reset"):
            tape.backward(out)
    tape.reset()
    assert not tape.consumed


def test_backward_requires_scalar():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        out = ad.scale(x, 1.0)
        with pytest.raises(ContractError, match="scalar"):
            tape.backward(out)


def test_watched_unused_leaf_gets_zero_grad():
    x = Tensor(np.ones((1, 1)), requires_grad=True)
    unused = Tensor(np.ones((2, 2)), requires_grad=True)
    with Tape() as tape:
        tape.watch(x, unused)
        tape.backward(ad.scale(x, 3.0))
    np.testing.assert_allclose(unused.grad, np.zeros((2, 2)))


def test_nested_tapes_are_independent():
    x = Tensor(np.full((1, 1), 2.0), requires_grad=True)
    with Tape() as outer:
        outer.watch(x)
        y = ad.scale(x, 3.0)
        with Tape() as inner:
            inner.watch(x)
            z = ad.scale(x, 5.0)
            inner.backward(z)
        inner_grad = x.grad.copy()
        x.zero_grad()
        outer.backward(y)
    np.testing.assert_allclose(inner_grad, [[5.0]])
    np.testing.assert_allclose(x.grad, [[3.0]])


def test_shared_subexpression_accumulates():
    x = Tensor([[1.0]], requires_grad=True)
    with Tape() as tape:
        tape.watch(x)
        y = ad.scale(x, 2.0)
        out = ad.add(y, y)  # d/dx = 4
        tape.backward(ad.sum_all(out))
    np.testing.assert_allclose(x.grad, [[4.0]])


def test_overflow_is_caught():
    big = Tensor(np.full((1, 1), 1e308))
    with pytest.raises(DataError, match="non-finite"):
        ad.mul(big, big)


def test_finite_diff_check_composite():
    rng = np.random.Generator(np.random.PCG64(4))
    w = Tensor(rng.normal(size=(3, 2)))
    x0 = Tensor(rng.normal(size=(2, 3)), requires_grad=True)

    def f(x):
        return ad.sum_all(ad.sigmoid(ad.matmul(x, w)))

    assert finite_diff_check(f, x0, eps=1e-5) < 1e-6


def test_finite_diff_check_eps_positive():
    with pytest.raises(ValueError):
        finite_diff_check(lambda x: ad.sum_all(x), Tensor(np.ones((1, 1))), eps=0.0)


def test_save_load_parameters_roundtrip(tmp_path):
    rng = np.random.Generator(np.random.PCG64(8))
    tensors = {
        "layer0.w": Tensor(rng.normal(size=(4, 3))),
        "head.b": Tensor(np.zeros((1, 1))),
    }
    prefix = str(tmp_path / "ckpt")
    ad.save_parameters(prefix, tensors, {"note": "fixture"})
    loaded, manifest = ad.load_parameters(prefix)
    assert manifest["note"] == "fixture"
    assert set(loaded) == set(tensors)
    for name in tensors:
        np.testing.assert_allclose(loaded[name].data, tensors[name].data, atol=1e-6)
        assert loaded[name].requires_grad


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-10, 10)))
def test_relu_is_idempotent(values):
    once = ad.relu(Tensor(values))
    twice = ad.relu(once)
    np.testing.assert_array_equal(once.data, twice.data)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matmul_grads_match_finite_differences(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    w = Tensor(rng.normal(size=(3, 2)))
    x0 = Tensor(rng.normal(size=(2, 3)), requires_grad=True)

    def f(x):
        return ad.sum_all(ad.matmul(x, w))

    assert finite_diff_check(f, x0, eps=1e-5) < 1e-7
