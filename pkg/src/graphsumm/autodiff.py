"""Dense rank-2 tensors with reverse-mode differentiation.

Values are stored and accumulated in double precision. Ops record onto the
innermost active :class:`Tape`; with no active tape they run in inference
mode and nothing is recorded. A tape can be backpropagated once; training
uses one fresh tape per optimization step.

Checkpoint format: ``<prefix>.json`` manifest plus ``<prefix>.bin`` holding
one DEMB record per tensor, in manifest order.
"""
from __future__ import annotations

import json
import threading
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from . import demb
from .errors import ContractError, DataError, ShapeError

_SIGMOID_CLAMP = 30.0
_STATE = threading.local()


def _tape_stack() -> list:
    if not hasattr(_STATE, "stack"):
        _STATE.stack = []
    return _STATE.stack


def _active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """A rank <= 2 array of doubles, optionally tracked for gradients."""

    __slots__ = ("data", "requires_grad", "grad", "tape")

    def __init__(self, values, requires_grad: bool = False):
        data = np.asarray(values, dtype=np.float64)
        if data.ndim > 2:
            raise ShapeError(f"rank {data.ndim} tensor not supported (max 2)")
        self.data = data
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.tape: "Tape | None" = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


class _Record:
    __slots__ = ("out", "parents", "backward_fn")

    def __init__(self, out, parents, backward_fn):
        self.out = out
        self.parents = parents
        self.backward_fn = backward_fn


class Tape:
    """Ordered record of executed ops, consumed by one backward pass."""

    def __init__(self):
        self.records: list[_Record] = []
        self.watched: list[Tensor] = []
        self.consumed = False

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc):
        stack = _tape_stack()
        assert stack and stack[-1] is self
        stack.pop()
        return False

    def watch(self, *tensors: Tensor) -> None:
        """Register leaves that must end up with a grad, even if unused."""
        self.watched.extend(tensors)

    def reset(self) -> None:
        self.records.clear()
        self.watched.clear()
        self.consumed = False

    def backward(self, loss: Tensor) -> None:
        if self.consumed:
            raise ContractError("tape already backpropagated; reset() before reuse")
        if loss.data.size != 1:
            raise ContractError(f"loss must be scalar, got shape {loss.shape}")
        self.consumed = True
        loss.grad = np.ones_like(loss.data)
        for rec in reversed(self.records):
            g = rec.out.grad
            if g is None:
                continue
            for parent, pgrad in zip(rec.parents, rec.backward_fn(g)):
                if parent.requires_grad:
                    parent.accumulate_grad(pgrad)
        for leaf in self.watched:
            if leaf.requires_grad and leaf.grad is None:
                leaf.grad = np.zeros_like(leaf.data)


def backward(loss: Tensor) -> None:
    """Populate grads of every watched leaf reachable from ``loss``."""
    if loss.tape is None:
        raise ContractError("loss was not recorded on a tape")
    loss.tape.backward(loss)


def _check_finite(data: np.ndarray, op: str) -> None:
    if not np.isfinite(data).all():
        raise DataError(f"{op} produced a non-finite value")


def _record(op: str, out_data: np.ndarray, parents: Sequence[Tensor], backward_fn) -> Tensor:
    _check_finite(out_data, op)
    tape = _active_tape()
    track = tape is not None and any(p.requires_grad for p in parents)
    out = Tensor(out_data, requires_grad=track)
    if track:
        out.tape = tape
        tape.records.append(_Record(out, tuple(parents), backward_fn))
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError("matmul requires rank-2 operands")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dims differ: {a.shape} x {b.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a.data @ b.data

    def bwd(g):
        return g @ b.data.T, a.data.T @ g

    return _record("matmul", out, (a, b), bwd)


def spmm(s: sp.spmatrix, x: Tensor) -> Tensor:
    """Constant sparse matrix times dense tensor; gradient flows through x."""
    if x.data.ndim != 2:
        raise ShapeError("spmm requires a rank-2 dense operand")
    if s.shape[1] != x.shape[0]:
        raise ShapeError(f"spmm inner dims differ: {s.shape} x {x.shape}")
    st = s.T.tocsr()
    out = np.asarray(s @ x.data)

    def bwd(g):
        return (np.asarray(st @ g),)

    return _record("spmm", out, (x,), bwd)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum; a (1, n) operand broadcasts over rows."""
    if a.shape == b.shape:
        pass
    elif b.data.ndim == 2 and b.shape[0] == 1 and a.data.ndim == 2 and a.shape[1] == b.shape[1]:
        pass
    else:
        raise ShapeError(f"add shapes incompatible: {a.shape} + {b.shape}")
    out = a.data + b.data

    def bwd(g):
        gb = g if b.shape == g.shape else g.sum(axis=0, keepdims=True)
        return g, gb

    return _record("add", out, (a, b), bwd)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    out = a.data * c

    def bwd(g):
        return (g * c,)

    return _record("scale", out, (a,), bwd)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"mul shapes differ: {a.shape} vs {b.shape}")
    with np.errstate(over="ignore"):
        out = a.data * b.data

    def bwd(g):
        return g * b.data, g * a.data

    return _record("mul", out, (a, b), bwd)


def relu(x: Tensor) -> Tensor:
    out = np.maximum(x.data, 0.0)

    def bwd(g):
        return (g * (x.data > 0.0),)

    return _record("relu", out, (x,), bwd)


def sigmoid(x: Tensor) -> Tensor:
    """Logistic function; input clamped to +-30 before exponentiation."""
    z = np.clip(x.data, -_SIGMOID_CLAMP, _SIGMOID_CLAMP)
    out = 1.0 / (1.0 + np.exp(-z))

    def bwd(g):
        return (g * out * (1.0 - out),)

    return _record("sigmoid", out, (x,), bwd)


def log(x: Tensor) -> Tensor:
    if np.any(x.data <= 0.0):
        raise DataError("log requires strictly positive input")
    out = np.log(x.data)

    def bwd(g):
        return (g / x.data,)

    return _record("log", out, (x,), bwd)


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    """Clamp values into [lo, hi]; gradient is zero where clamping bites."""
    out = np.clip(x.data, lo, hi)
    inside = (x.data > lo) & (x.data < hi)

    def bwd(g):
        return (g * inside,)

    return _record("clip", out, (x,), bwd)


def sum_all(x: Tensor) -> Tensor:
    out = np.array([[x.data.sum()]])

    def bwd(g):
        return (np.full_like(x.data, float(g[0, 0])),)

    return _record("sum_all", out, (x,), bwd)


def concat_cols(ts: Sequence[Tensor]) -> Tensor:
    if not ts:
        raise ShapeError("concat_cols of an empty sequence")
    if any(t.data.ndim != 2 for t in ts):
        raise ShapeError("concat_cols requires rank-2 operands")
    rows = {t.shape[0] for t in ts}
    if len(rows) != 1:
        raise ShapeError(f"concat_cols row counts differ: {sorted(rows)}")
    out = np.concatenate([t.data for t in ts], axis=1)
    widths = [t.shape[1] for t in ts]
    splits = np.cumsum(widths)[:-1]

    def bwd(g):
        return tuple(np.split(g, splits, axis=1))

    return _record("concat_cols", out, tuple(ts), bwd)


def finite_diff_check(f: Callable[[Tensor], Tensor], x: Tensor, eps: float) -> float:
    """Relative error of backward grads vs central differences on ``x``.

    ``f`` must be a pure scalar-valued tensor function. Returns the norm
    ratio ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12);
    an elementwise ratio would drown in truncation noise wherever a single
    gradient component happens to sit near zero.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    probe = Tensor(x.data.copy(), requires_grad=True)
    with Tape() as tape:
        tape.watch(probe)
        y = f(probe)
    if y.data.size != 1:
        raise ContractError(f"f must be scalar-valued, got shape {y.shape}")
    backward(y)
    analytic = probe.grad.copy()

    numeric = np.zeros_like(probe.data)
    flat = probe.data.reshape(-1)
    num_flat = numeric.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = f(Tensor(probe.data)).data.item()
        flat[i] = orig - eps
        lo = f(Tensor(probe.data)).data.item()
        flat[i] = orig
        num_flat[i] = (hi - lo) / (2.0 * eps)

    denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


def save_parameters(prefix: str, tensors: dict[str, Tensor], manifest_extra: dict | None = None) -> None:
    """Write ``<prefix>.json`` + ``<prefix>.bin`` (one DEMB record per tensor)."""
    entries = []
    blob = bytearray()
    for name, t in tensors.items():
        data = t.data if t.data.ndim == 2 else t.data.reshape(1, -1)
        entries.append({"name": name, "rows": data.shape[0], "cols": data.shape[1]})
        blob.extend(demb.encode_matrix(data))
    manifest = dict(manifest_extra or {})
    manifest["tensors"] = entries
    with open(prefix + ".json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    with open(prefix + ".bin", "wb") as fh:
        fh.write(bytes(blob))


def load_parameters(prefix: str) -> tuple[dict[str, Tensor], dict]:
    """Inverse of :func:`save_parameters`; tensors come back requiring grad."""
    try:
        with open(prefix + ".json", encoding="utf-8") as fh:
            manifest = json.load(fh)
        with open(prefix + ".bin", "rb") as fh:
            buf = fh.read()
    except FileNotFoundError as exc:
        raise DataError(f"checkpoint not found: {exc.filename} "
                        f"(pass the prefix without .json/.bin)") from exc
    tensors: dict[str, Tensor] = {}
    offset = 0
    for entry in manifest["tensors"]:
        values, offset = demb.decode_matrix(buf, offset)
        if values.shape != (entry["rows"], entry["cols"]):
            raise DataError(
                f"checkpoint tensor {entry['name']!r}: blob shape {values.shape} "
                f"does not match manifest ({entry['rows']}, {entry['cols']})"
            )
        tensors[entry["name"]] = Tensor(values, requires_grad=True)
    return tensors, manifest
