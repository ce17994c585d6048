"""Adam with cosine-annealed learning rate, and the desk-scale train loop."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .hvi import rgb_to_hvi
from .loss import LossConfig, total_loss
from .metrics import psnr
from .nn import ParamRegistry
from .tensor import Tensor


class OptimError(ValueError):
    module = "optim"


@dataclass(frozen=True)
class TrainConfig:
    total_steps: int
    lr_max: float = 1e-4
    lr_min: float = 1e-7
    batch_size: int = 4
    patch_size: int = 32
    seed: int = 0
    loss: LossConfig = field(default_factory=LossConfig)
    holdout: int | None = None
    psnr_every: int = 50

    def __post_init__(self):
        if not (0 < self.lr_min <= self.lr_max):
            raise OptimError(
                f"need 0 < lr_min <= lr_max, got {self.lr_min}, {self.lr_max}")
        if self.patch_size % 4:
            raise OptimError(f"patch_size={self.patch_size} must be a multiple of 4")
        if self.total_steps < 1:
            raise OptimError("total_steps must be >= 1")


def cosine_lr(step: int, cfg: TrainConfig) -> float:
    """lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total)) / 2."""
    if not 0 <= step <= cfg.total_steps:
        raise OptimError(f"step {step} outside [0, {cfg.total_steps}]")
    frac = step / cfg.total_steps
    return cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) * (1.0 + math.cos(math.pi * frac))


class AdamState:
    """First/second moment buffers plus the shared step counter."""

    def __init__(self, params: ParamRegistry, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m = {name: np.zeros_like(t.data) for name, t in params.items()}
        self.v = {name: np.zeros_like(t.data) for name, t in params.items()}


def adam_step(params: ParamRegistry, state: AdamState, lr: float) -> None:
    """One bias-corrected update; gradients are left for the caller to zero."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, t in params.items():
        if t.grad is None:
            raise OptimError(f"parameter {name!r} has no gradient")
        g = t.grad
        m = state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        v = state.v[name] = b2 * state.v[name] + (1.0 - b2) * (g * g)
        update = (m / c1) / (np.sqrt(v / c2) + state.eps)
        t.data -= (lr * update).astype(t.data.dtype)


def _crop(arr: np.ndarray, y0: int, x0: int, size: int) -> np.ndarray:
    return arr[:, :, y0:y0 + size, x0:x0 + size]


def train(net, pairs: list[tuple[Tensor, Tensor]], cfg: TrainConfig,
          log_path: str | None = None) -> list[dict]:
    """Patch-based training over (low, ground-truth) image pairs.

    Identical aligned crops are sampled from each pair, and the sampling
    stream is a pure function of (pair order, seed), so two runs with the
    same seed produce bit-identical parameters. Returns one log row per
    step; the holdout pair (if configured) is excluded from sampling and
    scored by PSNR every ``psnr_every`` steps.
    """
    if not pairs:
        raise OptimError("empty training set")
    p = cfg.patch_size
    for low, gt in pairs:
        if low.shape != gt.shape:
            raise OptimError(
                f"pair shapes differ: {low.shape} vs {gt.shape}")
        if low.shape[2] < p or low.shape[3] < p:
            raise OptimError(
                f"image {low.shape[2]}x{low.shape[3]} smaller than patch {p}")
    pool = [i for i in range(len(pairs)) if i != cfg.holdout]
    if not pool:
        raise OptimError("holdout leaves no training pairs")

    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    state = AdamState(net.params)
    hvi_cfg = net.cfg.hvi
    log: list[dict] = []

    for step in range(cfg.total_steps):
        lows, gts = [], []
        for _ in range(cfg.batch_size):
            k = pool[rng.integers(0, len(pool))]
            low, gt = pairs[k]
            _, _, h, w = low.shape
            y0 = int(rng.integers(0, h - p + 1))
            x0 = int(rng.integers(0, w - p + 1))
            lows.append(_crop(low.data, y0, x0, p))
            gts.append(_crop(gt.data, y0, x0, p))
        low_b = Tensor._wrap(np.concatenate(lows, axis=0))
        gt_b = Tensor._wrap(np.concatenate(gts, axis=0))

        rgb_out, hvi_out = net.forward(low_b)
        with T.no_grad():
            gt_hvi = rgb_to_hvi(gt_b, hvi_cfg)
        breakdown = total_loss(hvi_out, gt_hvi, cfg.loss,
                               pred_rgb=rgb_out, gt_rgb=gt_b)
        net.params.zero_grad()
        T.backward(breakdown.graph)
        lr = cosine_lr(step, cfg)
        adam_step(net.params, state, lr)

        row = {
            "step": step, "lr": lr,
            "l_i": breakdown.l_i, "l_h": breakdown.l_h, "l_v": breakdown.l_v,
            "w_h": breakdown.w_h, "w_v": breakdown.w_v,
            "l_ihv": breakdown.l_ihv, "l_hv": breakdown.l_hv,
            "total": breakdown.total,
            "psnr_holdout": "",
        }
        if cfg.holdout is not None and (
                step % cfg.psnr_every == 0 or step == cfg.total_steps - 1):
            low, gt = pairs[cfg.holdout]
            with T.no_grad():
                out, _ = net.forward(low)
            row["psnr_holdout"] = float(psnr(out, gt)[0])
        log.append(row)

    if log_path is not None:
        write_training_log(log, log_path)
    return log


LOG_COLUMNS = ["step", "lr", "l_i", "l_h", "l_v", "w_h", "w_v",
               "l_ihv", "l_hv", "total", "psnr_holdout"]


def write_training_log(log: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LOG_COLUMNS)
        writer.writeheader()
        for row in log:
            writer.writerow(row)
