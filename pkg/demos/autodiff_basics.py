"""
Reverse-mode autodiff on the built-in tape
==========================================

graphsumm trains its models with a small reverse-mode engine instead of a
deep-learning framework.  This script records a toy computation on the
tape, reads gradients back, and checks them against central differences.
"""

import numpy as np

from graphsumm import bce_loss
from graphsumm.autodiff import Tape, Tensor, backward, finite_diff_check, matmul, sigmoid

# A two-parameter model: scores = sigmoid(x W), plus a BCE loss against
# fixed targets.  Ops only record themselves while a tape is active.
rng = np.random.default_rng(7)
x = Tensor(rng.normal(size=(4, 3)))
w = Tensor(rng.normal(size=(3, 1)), requires_grad=True)
targets = np.array([1.0, 0.0, 1.0, 0.0])

with Tape() as tape:
    tape.watch(w)
    loss = bce_loss(sigmoid(matmul(x, w)), targets)
print("loss:", loss.data.item())

# backward() walks the tape in reverse and accumulates into .grad.
backward(loss)
print("dL/dW:")
print(w.grad)

# The engine ships a checker that compares the analytic gradient with a
# central-difference estimate and reports the error as a norm ratio.
# Anything below ~1e-6 means the tape is exact up to truncation.
err = finite_diff_check(
    lambda t: bce_loss(sigmoid(matmul(x, t)), targets), w, eps=1e-5
)
print("finite-difference norm ratio:", err)
assert err < 1e-6

# pos_weight re-weights the positive class inside the loss; the gradient
# shifts accordingly (positives pull twice as hard here).
w.zero_grad()
with Tape() as tape:
    tape.watch(w)
    loss2 = bce_loss(sigmoid(matmul(x, w)), targets, pos_weight=2.0)
backward(loss2)
print("dL/dW with pos_weight=2:")
print(w.grad)

# A tape is single-shot: backpropagating twice is a contract error, which
# keeps stale gradients from leaking between training steps.
try:
    backward(loss2)
except Exception as exc:
    print("second backward ->", type(exc).__name__, "-", exc)
