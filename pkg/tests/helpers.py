"""Shared test oracles: central finite differences, straight-line block
transcriptions, and small input builders.

The finite-difference oracle runs the computation in float64 (callers
build float64 leaves so the whole graph re-executes in double precision)
and compares sampled coordinates of the analytic gradient against
central differences, reporting the worst elementwise relative error with
denominator max(|analytic|, |numeric|, 1e-6).
"""

from __future__ import annotations

import numpy as np

import hvilight.tensor as T
from hvilight.tensor import Tensor

FD_EPS = 1e-3
FD_TOL = 1e-4


def leaf(rng, shape, lo=-2.0, hi=2.0, dtype=np.float64, requires_grad=True):
    return Tensor(rng.uniform(lo, hi, shape), requires_grad=requires_grad, dtype=dtype)


def fd_worst_rel_err(f, tensors, eps=FD_EPS, max_coords_per_tensor=25, rng=None):
    """Worst relative error of analytic vs central-difference gradients.

    f rebuilds the scalar loss from the current tensor data on every
    call; tensors are perturbed in place and restored.
    """
    rng = rng or np.random.default_rng(0)
    for t in tensors:
        t.grad = None
    loss = f()
    T.backward(loss)
    worst = 0.0
    for t in tensors:
        if t.grad is None:
            raise AssertionError("tensor received no gradient")
        flat = t.data.reshape(-1)
        gflat = np.asarray(t.grad).reshape(-1)
        n = flat.size
        idxs = range(n) if n <= max_coords_per_tensor else sorted(
            rng.choice(n, size=max_coords_per_tensor, replace=False))
        for i in idxs:
            orig = flat[i]
            flat[i] = orig + eps
            up = f().item()
            flat[i] = orig - eps
            down = f().item()
            flat[i] = orig
            numeric = (up - down) / (2.0 * eps)
            analytic = float(gflat[i])
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, rel)
    return worst


def float64_params(net):
    """Shadow mode: re-run the graph in float64 by widening every parameter."""
    for t in net.params.tensors():
        t.data = t.data.astype(np.float64)
    return list(net.params.tensors())


def rgb_away_from_ties(rng, shape, margin=2e-3, lo=0.05, hi=0.95):
    """Random RGB whose channel orderings stay clear of max/min ties."""
    while True:
        x = rng.uniform(lo, hi, shape)
        r, g, b = x[:, 0], x[:, 1], x[:, 2]
        gaps = np.stack([np.abs(r - g), np.abs(g - b), np.abs(r - b)])
        if gaps.min() > margin:
            return x


def _np_sigmoid(x):
    t = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def _wrap(a):
    return Tensor._wrap(np.asarray(a))


def fusion_oracle(blk, primary: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Unoptimized transcription of the fusion arithmetic: primitives are
    called one equation at a time and composed in plain numpy."""
    base = primary + other
    ca = blk.channel_gate(_wrap(base)).data
    w_c = _np_sigmoid(blk.pixel_gate_c(_wrap(ca * base + base), _wrap(base)).data)
    sa = blk.spatial_gate(_wrap(base)).data
    w_s = _np_sigmoid(blk.pixel_gate_s(_wrap(sa * base + base), _wrap(base)).data)
    phi = float(blk.mix_channel.data[0])
    omega = float(blk.mix_spatial.data[0])
    w = phi * w_c + omega * w_s
    return base + w * other + (1.0 - w) * primary


def enhance_oracle(blk, self_stream: np.ndarray, fused: np.ndarray) -> np.ndarray:
    """Unoptimized transcription of the enhancement core arithmetic."""
    z = blk.cross(_wrap(self_stream), _wrap(fused)).data
    alpha = float(blk.attn_scale.data[0])
    beta = float(blk.fused_scale.data[0])
    lam = float(blk.ffn_scale.data[0])
    mu = float(blk.skip_scale.data[0])
    ffn_out = blk.ffn(_wrap(alpha * z + beta * fused)).data
    z_hat = lam * ffn_out + mu * z
    base = self_stream + z_hat
    return blk.multi_branch(_wrap(base)).data + base


def loss_oracle(pred_planes, gt_planes):
    """Pure-numpy recomputation of the full objective from plane arrays.

    pred_planes/gt_planes: (h, v, i) float64 arrays, B x 1 x H x W.
    """
    ph, pv, pi = (np.asarray(p, dtype=np.float64) for p in pred_planes)
    gh, gv, gi = (np.asarray(p, dtype=np.float64) for p in gt_planes)

    def mse(a, b):
        return float(((a - b) ** 2).mean())

    l_i, l_h, l_v = mse(pi, gi), mse(ph, gh), mse(pv, gv)
    err = np.abs(pi - gi)
    m = err.mean()
    w_h = 1.0 + float(m)
    w_v = 1.0 + float(np.sqrt(((err - m) ** 2).mean()))
    l_ihv = w_h * l_h + w_v * l_v
    pm = (ph * pv).mean(axis=(1, 2, 3))
    gm = (gh * gv).mean(axis=(1, 2, 3))
    l_hv = float(((pm - gm) ** 2).mean())
    return {
        "l_i": l_i, "l_h": l_h, "l_v": l_v,
        "w_h": w_h, "w_v": w_v, "l_ihv": l_ihv, "l_hv": l_hv,
        "total": l_i + l_ihv + l_hv,
    }


def ssim_oracle(x: np.ndarray, y: np.ndarray, win: np.ndarray) -> float:
    """Direct windowed SSIM over one luma pair, explicit loops."""
    c1, c2 = 0.01 ** 2, 0.03 ** 2
    size = win.shape[0]
    h, w = x.shape
    vals = []
    for r in range(h - size + 1):
        for c in range(w - size + 1):
            wx = x[r:r + size, c:c + size]
            wy = y[r:r + size, c:c + size]
            mx = (win * wx).sum()
            my = (win * wy).sum()
            vx = (win * wx * wx).sum() - mx * mx
            vy = (win * wy * wy).sum() - my * my
            cxy = (win * wx * wy).sum() - mx * my
            lum = (2 * mx * my + c1) / (mx * mx + my * my + c1)
            con = (2 * cxy + c2) / (vx + vy + c2)
            vals.append(lum * con)
    return float(np.mean(vals))
