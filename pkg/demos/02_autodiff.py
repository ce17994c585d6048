"""Tour of the tensor engine: build a small graph, run the backward
sweep, and compare analytic gradients against central finite
differences computed in double precision.

Run: python demos/02_autodiff.py
"""

import numpy as np

import hvilight.tensor as T
from hvilight.tensor import Tensor

rng = np.random.default_rng(1)

print("== a scalar chain ==")
x = Tensor([2.0], requires_grad=True, dtype=np.float64)
y = T.mul(T.sigmoid(T.mul(x, x)), 3.0)   # y = 3 * sigmoid(x^2)
T.backward(T.sum_(y))
s = 1 / (1 + np.exp(-4.0))
print("y =", y.item(), " dy/dx =", x.grad[0],
      " closed form =", 3 * s * (1 - s) * 4.0)

print("\n== gradients accumulate until zeroed ==")
w = Tensor([1.0, 2.0], requires_grad=True, dtype=np.float64)
T.backward(T.sum_(w))
T.backward(T.sum_(T.mul(w, 2.0)))
print("after two backwards, grad =", w.grad, "(1 + 2 per element)")
w.zero_grad()

print("\n== convolution with a finite-difference check ==")
img = Tensor(rng.uniform(-1, 1, (1, 2, 6, 6)), requires_grad=True, dtype=np.float64)
ker = Tensor(rng.uniform(-1, 1, (3, 2, 3, 3)), requires_grad=True, dtype=np.float64)


def loss_fn():
    out = T.conv2d(img, ker, stride=1, padding=1)
    return T.mean(T.mul(T.gelu(out), out))


loss = loss_fn()
T.backward(loss)

eps = 1e-4
worst = 0.0
flat, grad = ker.data.reshape(-1), ker.grad.reshape(-1)
for idx in range(0, flat.size, 7):
    keep = flat[idx]
    flat[idx] = keep + eps
    up = loss_fn().item()
    flat[idx] = keep - eps
    down = loss_fn().item()
    flat[idx] = keep
    numeric = (up - down) / (2 * eps)
    worst = max(worst, abs(numeric - grad[idx]) / max(abs(numeric), 1e-6))
print("loss =", loss.item())
print("worst relative gradient error over sampled kernel weights:", worst)

print("\n== the tape releases after one sweep ==")
z = T.variance(T.mul(img, img))
T.backward(z)
try:
    T.backward(z)
except T.GraphError as err:
    print("second backward correctly raises:", err)
