"""Dense float tensors with reverse-mode differentiation.

Values live in numpy arrays (float32 by default, float64 when a caller
builds a shadow graph for gradient checking). Every differentiable
operation records a node holding its inputs and a backward rule; calling
:func:`backward` on a scalar walks the recorded nodes in reverse
topological order exactly once and accumulates gradients into every
tensor that requires them. Gradients keep accumulating across backward
calls until explicitly zeroed.

The engine is single threaded per graph and bit-deterministic: identical
inputs produce identical outputs, and all reductions use fixed orders.
"""

from __future__ import annotations

import math
from contextlib import contextmanager

import numpy as np
from scipy import special as _special

DEFAULT_DTYPE = np.float32

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ShapeError(ValueError):
    """Operand shapes violate an operation's contract."""

    module = "tensor"


class GraphError(RuntimeError):
    """Backward called on an unusable graph (non-scalar root, released tape)."""

    module = "tensor"


_grad_enabled = True
_check_finite = False


@contextmanager
def no_grad():
    """Disable graph recording inside the block (inference, data prep)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def set_check_finite(flag: bool) -> bool:
    """Toggle the debug finiteness assertion on op outputs. Returns the old value."""
    global _check_finite
    prev = _check_finite
    _check_finite = bool(flag)
    return prev


class TapeNode:
    """One executed operation: input references plus its backward rule."""

    __slots__ = ("inputs", "backward_fn", "consumed")

    def __init__(self, inputs, backward_fn):
        self.inputs = inputs
        self.backward_fn = backward_fn
        self.consumed = False


class Tensor:
    """N-dimensional float array, optionally tracked by the autodiff tape."""

    __slots__ = ("data", "requires_grad", "grad", "node")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        self.data = np.asarray(data, dtype=DEFAULT_DTYPE if dtype is None else dtype)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node = None

    @classmethod
    def _wrap(cls, arr: np.ndarray, requires_grad: bool = False) -> "Tensor":
        t = cls.__new__(cls)
        t.data = arr
        t.requires_grad = requires_grad
        t.grad = None
        t.node = None
        return t

    # -- introspection ----------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        """The underlying array. Treat as read-only; tensors are immutable."""
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() requires a one-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor._wrap(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype.name}, requires_grad={self.requires_grad})"

    # -- operator sugar ----------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(_coerce(other, self.data.dtype), self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(_coerce(other, self.data.dtype), self)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent):
        return pow_scalar(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return slice_(self, key)

    def reshape(self, shape):
        return reshape(self, shape)

    def permute(self, axes):
        return permute(self, axes)

    def sum(self, axes=None, keepdims=False):
        return sum_(self, axes, keepdims)

    def mean(self, axes=None, keepdims=False):
        return mean(self, axes, keepdims)


def _coerce(value, dtype) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor._wrap(np.asarray(value, dtype=dtype))


def _result(arr: np.ndarray, inputs: tuple, backward_fn) -> Tensor:
    """Wrap an op output, recording a tape node when gradients are live."""
    if _check_finite and not np.all(np.isfinite(arr)):
        raise ArithmeticError("operation produced non-finite values")
    track = _grad_enabled and any(t.requires_grad for t in inputs)
    out = Tensor._wrap(arr, requires_grad=track)
    if track:
        out.node = TapeNode(inputs, backward_fn)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient over axes that were expanded by broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _check_broadcast(a_shape, b_shape):
    for x, y in zip(reversed(a_shape), reversed(b_shape)):
        if x != y and x != 1 and y != 1:
            raise ShapeError(f"shapes {a_shape} and {b_shape} are not broadcastable")


# ---------------------------------------------------------------------------
# elementwise ops
# ---------------------------------------------------------------------------

def add(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = a.data + b.data

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _result(out, (a, b), bw)


def sub(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = a.data - b.data

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _result(out, (a, b), bw)


def mul(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = a.data * b.data
    ad, bd = a.data, b.data

    def bw(g):
        return _unbroadcast(g * bd, a.shape), _unbroadcast(g * ad, b.shape)

    return _result(out, (a, b), bw)


def div(a: Tensor, b) -> Tensor:
    # Division by zero follows IEEE semantics; the debug finiteness check
    # is what trips on it, not a special case here.
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = a.data / b.data
    ad, bd = a.data, b.data

    def bw(g):
        ga = g / bd
        return _unbroadcast(ga, a.shape), _unbroadcast(-ga * ad / bd, b.shape)

    return _result(out, (a, b), bw)


def maximum(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = np.maximum(a.data, b.data)
    mask = a.data >= b.data  # ties route to the first operand

    def bw(g):
        return _unbroadcast(g * mask, a.shape), _unbroadcast(g * ~mask, b.shape)

    return _result(out, (a, b), bw)


def minimum(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    _check_broadcast(a.shape, b.shape)
    out = np.minimum(a.data, b.data)
    mask = a.data <= b.data

    def bw(g):
        return _unbroadcast(g * mask, a.shape), _unbroadcast(g * ~mask, b.shape)

    return _result(out, (a, b), bw)


def atan2(y: Tensor, x: Tensor) -> Tensor:
    _check_broadcast(y.shape, x.shape)
    out = np.arctan2(y.data, x.data)
    yd, xd = y.data, x.data

    def bw(g):
        denom = xd * xd + yd * yd
        # subgradient 0 at the origin (the angle is undefined there)
        denom = np.where(denom == 0.0, 1.0, denom)
        return _unbroadcast(g * xd / denom, y.shape), _unbroadcast(-g * yd / denom, x.shape)

    return _result(out, (y, x), bw)


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    # stable for large |x|: exp never sees a positive argument
    t = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))

    def bw(g):
        return (g * out * (1.0 - out),)

    return _result(out, (a,), bw)


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)

    def bw(g):
        return (g * out,)

    return _result(out, (a,), bw)


def log(a: Tensor) -> Tensor:
    out = np.log(a.data)
    ad = a.data

    def bw(g):
        return (g / ad,)

    return _result(out, (a,), bw)


def sqrt(a: Tensor) -> Tensor:
    out = np.sqrt(a.data)

    def bw(g):
        return (g * 0.5 / out,)

    return _result(out, (a,), bw)


def abs_(a: Tensor) -> Tensor:
    out = np.abs(a.data)
    sign = np.sign(a.data)

    def bw(g):
        return (g * sign,)

    return _result(out, (a,), bw)


def relu(a: Tensor) -> Tensor:
    out = np.maximum(a.data, 0.0)
    mask = a.data > 0

    def bw(g):
        return (g * mask,)

    return _result(out, (a,), bw)


def gelu(a: Tensor) -> Tensor:
    """Exact gaussian-error-linear unit, x * Phi(x)."""
    x = a.data
    cdf = 0.5 * (1.0 + _special.erf(x * _INV_SQRT2))
    out = x * cdf

    def bw(g):
        pdf = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
        return (g * (cdf + x * pdf),)

    return _result(out, (a,), bw)


def sin(a: Tensor) -> Tensor:
    out = np.sin(a.data)
    ad = a.data

    def bw(g):
        return (g * np.cos(ad),)

    return _result(out, (a,), bw)


def cos(a: Tensor) -> Tensor:
    out = np.cos(a.data)
    ad = a.data

    def bw(g):
        return (g * -np.sin(ad),)

    return _result(out, (a,), bw)


def floor(a: Tensor) -> Tensor:
    """Piecewise-constant floor; gradient is zero almost everywhere."""
    out = np.floor(a.data)

    def bw(g):
        return (np.zeros(a.shape, dtype=g.dtype),)

    return _result(out, (a,), bw)


def pow_scalar(a: Tensor, exponent: float) -> Tensor:
    p = float(exponent)
    out = a.data ** p
    ad = a.data

    def bw(g):
        return (g * p * ad ** (p - 1.0),)

    return _result(out, (a,), bw)


def clamp(a: Tensor, lo=None, hi=None) -> Tensor:
    out = np.clip(a.data, lo, hi)
    inside = np.ones(a.shape, dtype=bool)
    if lo is not None:
        inside &= a.data >= lo
    if hi is not None:
        inside &= a.data <= hi

    def bw(g):
        return (g * inside,)

    return _result(out, (a,), bw)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

def _norm_axes(axes, ndim):
    if axes is None:
        return tuple(range(ndim))
    if isinstance(axes, int):
        axes = (axes,)
    axes = tuple(ax % ndim if -ndim <= ax < ndim else _axis_err(ax, ndim) for ax in axes)
    if len(set(axes)) != len(axes):
        raise ShapeError(f"duplicate reduction axes {axes}")
    return axes


def _axis_err(ax, ndim):
    raise ShapeError(f"axis {ax} out of range for rank {ndim}")


def _check_nonempty(shape, axes):
    for ax in axes:
        if shape[ax] == 0:
            raise ShapeError("reduction over an empty axis")


def _expand_reduced(g, shape, axes, keepdims):
    if not keepdims:
        for ax in sorted(axes):
            g = np.expand_dims(g, ax)
    return np.broadcast_to(g, shape)


def sum_(a: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    axes = _norm_axes(axes, a.ndim)
    _check_nonempty(a.shape, axes)
    if not axes:
        return _identity(a)
    out = a.data.sum(axis=axes, keepdims=keepdims)
    shape = a.shape

    def bw(g):
        return (_expand_reduced(g, shape, axes, keepdims).astype(g.dtype, copy=True),)

    return _result(out, (a,), bw)


def mean(a: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    axes = _norm_axes(axes, a.ndim)
    _check_nonempty(a.shape, axes)
    if not axes:
        return _identity(a)
    count = 1
    for ax in axes:
        count *= a.shape[ax]
    out = a.data.sum(axis=axes, keepdims=keepdims) / count
    shape = a.shape

    def bw(g):
        return (_expand_reduced(g, shape, axes, keepdims) / count,)

    return _result(out, (a,), bw)


def max_reduce(a: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    axes = _norm_axes(axes, a.ndim)
    _check_nonempty(a.shape, axes)
    if not axes:
        return _identity(a)
    kept = a.data.max(axis=axes, keepdims=True)
    out = kept if keepdims else kept.reshape(
        tuple(n for i, n in enumerate(a.shape) if i not in axes))
    mask = a.data == kept
    ties = mask.sum(axis=axes, keepdims=True)
    shape = a.shape

    def bw(g):
        # ties share the gradient equally; tests stay away from exact ties
        full = _expand_reduced(g, shape, axes, keepdims)
        return (full * mask / ties,)

    return _result(out, (a,), bw)


def variance(a: Tensor, axes=None, keepdims: bool = False) -> Tensor:
    """Population variance (divide by the element count, not count-1)."""
    centered = sub(a, mean(a, axes, keepdims=True))
    return mean(mul(centered, centered), axes, keepdims)


def _identity(a: Tensor) -> Tensor:
    out = a.data

    def bw(g):
        return (g,)

    return _result(out, (a,), bw)


# ---------------------------------------------------------------------------
# matmul
# ---------------------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError("matmul requires rank >= 2 operands")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(
            f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
    _check_broadcast(a.shape[:-2], b.shape[:-2])
    out = np.matmul(a.data, b.data)
    ad, bd = a.data, b.data

    def bw(g):
        ga = np.matmul(g, bd.swapaxes(-1, -2))
        gb = np.matmul(ad.swapaxes(-1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _result(out, (a, b), bw)


# ---------------------------------------------------------------------------
# conv2d
# ---------------------------------------------------------------------------

def _pair(v):
    if isinstance(v, (tuple, list)):
        return int(v[0]), int(v[1])
    return int(v), int(v)


def conv2d(x: Tensor, w: Tensor, bias: Tensor | None = None,
           stride=1, padding=0, dilation=1, groups: int = 1) -> Tensor:
    """Cross-correlation over B x C x H x W inputs with zero padding.

    Weights are laid out C_out x (C_in/groups) x kh x kw. The backward pass
    accumulates per-kernel-tap slices (fixed order, bit-deterministic).
    """
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeError("conv2d expects 4-d input and weight")
    B, Cin, H, W = x.shape
    Cout, Cg, kh, kw = w.shape
    sh, sw = _pair(stride)
    ph, pw = _pair(padding)
    dh, dw = _pair(dilation)
    if Cin % groups or Cout % groups:
        raise ShapeError(
            f"channels ({Cin} in, {Cout} out) not divisible by groups={groups}")
    if Cg != Cin // groups:
        raise ShapeError(
            f"weight expects {Cg * groups} input channels, input has {Cin}")
    ekh = dh * (kh - 1) + 1
    ekw = dw * (kw - 1) + 1
    if ekh > H + 2 * ph or ekw > W + 2 * pw:
        raise ShapeError("kernel larger than the padded input")
    oh = (H + 2 * ph - ekh) // sh + 1
    ow = (W + 2 * pw - ekw) // sw + 1
    og = Cout // groups
    L = oh * ow

    pointwise = (kh == 1 and kw == 1 and sh == sw == 1 and ph == pw == 0)
    if pointwise:
        xp = x.data
        cols = x.data.reshape(B, Cin, 1, L)
    else:
        xp = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw))) if (ph or pw) else x.data
        cols = np.empty((B, Cin, kh * kw, L), dtype=x.data.dtype)
        for ki in range(kh):
            for kj in range(kw):
                patch = xp[:, :, ki * dh: ki * dh + sh * (oh - 1) + 1: sh,
                           kj * dw: kj * dw + sw * (ow - 1) + 1: sw]
                cols[:, :, ki * kw + kj, :] = patch.reshape(B, Cin, L)
    colsg = cols.reshape(B, groups, Cg * kh * kw, L)
    w2 = w.data.reshape(groups, og, Cg * kh * kw)
    out = np.matmul(w2[None], colsg).reshape(B, Cout, oh, ow)
    if bias is not None:
        out = out + bias.data.reshape(1, Cout, 1, 1)

    hp, wp = xp.shape[2], xp.shape[3]
    inputs = (x, w) if bias is None else (x, w, bias)

    def bw(g):
        go = g.reshape(B, groups, og, L)
        gw = np.matmul(go, colsg.swapaxes(-1, -2)).sum(axis=0)
        gw = gw.reshape(Cout, Cg, kh, kw)
        dcols = np.matmul(w2[None].swapaxes(-1, -2), go)
        if pointwise:
            gx = dcols.reshape(B, Cin, H, W)
        else:
            dcols = dcols.reshape(B, Cin, kh * kw, L)
            gxp = np.zeros((B, Cin, hp, wp), dtype=g.dtype)
            for ki in range(kh):
                for kj in range(kw):
                    gxp[:, :, ki * dh: ki * dh + sh * (oh - 1) + 1: sh,
                        kj * dw: kj * dw + sw * (ow - 1) + 1: sw] += \
                        dcols[:, :, ki * kw + kj, :].reshape(B, Cin, oh, ow)
            gx = gxp[:, :, ph: ph + H, pw: pw + W] if (ph or pw) else gxp
        if bias is None:
            return gx, gw
        return gx, gw, g.sum(axis=(0, 2, 3))

    return _result(out, inputs, bw)


# ---------------------------------------------------------------------------
# structural ops
# ---------------------------------------------------------------------------

def reshape(a: Tensor, shape) -> Tensor:
    shape = tuple(shape)
    out = a.data.reshape(shape)
    orig = a.shape

    def bw(g):
        return (g.reshape(orig),)

    return _result(out, (a,), bw)


def permute(a: Tensor, axes) -> Tensor:
    axes = tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeError(f"invalid permutation {axes} for rank {a.ndim}")
    out = a.data.transpose(axes)
    inverse = tuple(np.argsort(axes))

    def bw(g):
        return (g.transpose(inverse),)

    return _result(out, (a,), bw)


def concat(tensors, axis: int) -> Tensor:
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat of no tensors")
    ndim = tensors[0].ndim
    axis = axis % ndim
    base = list(tensors[0].shape)
    for t in tensors[1:]:
        if t.ndim != ndim:
            raise ShapeError("concat rank mismatch")
        other = list(t.shape)
        if [n for i, n in enumerate(other) if i != axis] != \
                [n for i, n in enumerate(base) if i != axis]:
            raise ShapeError("concat shapes ragged outside the join axis")
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        pieces = []
        for i in range(len(sizes)):
            sl = [slice(None)] * ndim
            sl[axis] = slice(int(offsets[i]), int(offsets[i + 1]))
            pieces.append(g[tuple(sl)])
        return tuple(pieces)

    return _result(out, tuple(tensors), bw)


def slice_(a: Tensor, key) -> Tensor:
    """Basic slicing (slices and ints); gradients scatter back into place."""
    out = a.data[key]
    shape = a.shape

    def bw(g):
        gx = np.zeros(shape, dtype=g.dtype)
        gx[key] = g
        return (gx,)

    return _result(out, (a,), bw)


def pad_zero(a: Tensor, pads) -> Tensor:
    """Zero-pad with per-axis (before, after) widths."""
    pads = tuple((int(lo), int(hi)) for lo, hi in pads)
    if len(pads) != a.ndim:
        raise ShapeError(f"pad spec has {len(pads)} axes, tensor has {a.ndim}")
    out = np.pad(a.data, pads)
    key = tuple(slice(lo, lo + n) for (lo, _), n in zip(pads, a.shape))

    def bw(g):
        return (g[key],)

    return _result(out, (a,), bw)


def upsample_nearest2x(a: Tensor) -> Tensor:
    if a.ndim != 4:
        raise ShapeError("upsample expects a 4-d tensor")
    out = a.data.repeat(2, axis=2).repeat(2, axis=3)
    B, C, H, W = a.shape

    def bw(g):
        return (g.reshape(B, C, H, 2, W, 2).sum(axis=(3, 5)),)

    return _result(out, (a,), bw)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    axis = axis % a.ndim
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def bw(g):
        inner = (g * out).sum(axis=axis, keepdims=True)
        return ((g - inner) * out,)

    return _result(out, (a,), bw)


# ---------------------------------------------------------------------------
# backward
# ---------------------------------------------------------------------------

def backward(loss: Tensor) -> None:
    """Reverse-mode sweep from a one-element tensor.

    Gradients accumulate into ``.grad`` of every requires_grad tensor the
    loss depends on. The visited subgraph is released afterwards; a second
    backward through the same nodes raises GraphError.
    """
    if loss.data.size != 1:
        raise GraphError(f"backward requires a scalar, got shape {loss.shape}")
    if loss.node is None:
        if not loss.requires_grad:
            raise GraphError("loss does not require grad")
        # a true leaf: its gradient with respect to itself is one
        seed = np.ones_like(loss.data)
        loss.grad = seed if loss.grad is None else loss.grad + seed
        return

    # iterative topological order over op-produced tensors
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        t, expanded = stack.pop()
        if expanded:
            order.append(t)
            continue
        if id(t) in seen or t.node is None:
            continue
        if t.node.consumed:
            raise GraphError("graph already released by a previous backward call")
        seen.add(id(t))
        stack.append((t, True))
        for inp in t.node.inputs:
            if inp.node is not None and id(inp) not in seen:
                stack.append((inp, False))

    pending: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for t in reversed(order):
        g = pending.pop(id(t), None)
        if g is None:
            continue
        if t.requires_grad:
            t.grad = g if t.grad is None else t.grad + g
        node = t.node
        grads = node.backward_fn(g)
        for inp, gi in zip(node.inputs, grads):
            if gi is None or not inp.requires_grad:
                continue
            if inp.node is None:
                # leaf: accumulate directly (grad buffers are never
                # mutated in place, so sharing is safe)
                inp.grad = gi if inp.grad is None else inp.grad + gi
            else:
                key = id(inp)
                if key in pending:
                    pending[key] = pending[key] + gi
                else:
                    pending[key] = gi
        # release the node but keep a marker so a second sweep errors
        node.consumed = True
        node.inputs = ()
        node.backward_fn = None


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def zeros(shape, dtype=None, requires_grad: bool = False) -> Tensor:
    return Tensor._wrap(np.zeros(shape, dtype=DEFAULT_DTYPE if dtype is None else dtype),
                        requires_grad=requires_grad)


def ones(shape, dtype=None, requires_grad: bool = False) -> Tensor:
    return Tensor._wrap(np.ones(shape, dtype=DEFAULT_DTYPE if dtype is None else dtype),
                        requires_grad=requires_grad)


def full(shape, value, dtype=None, requires_grad: bool = False) -> Tensor:
    return Tensor._wrap(np.full(shape, value, dtype=DEFAULT_DTYPE if dtype is None else dtype),
                        requires_grad=requires_grad)
