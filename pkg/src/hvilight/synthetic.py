"""Deterministic synthetic paired corpus: colorful smooth ground truths
plus gamma-darkened degraded copies. Shared by tests and demo scripts."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataio import save_image, write_manifest
from .tensor import Tensor


def _bilinear_resize(grid: np.ndarray, size: int) -> np.ndarray:
    """Resize a C x gh x gw control grid to C x size x size."""
    c, gh, gw = grid.shape
    ys = np.linspace(0.0, gh - 1.0, size)
    xs = np.linspace(0.0, gw - 1.0, size)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, gh - 1)
    x1 = np.minimum(x0 + 1, gw - 1)
    fy = (ys - y0)[None, :, None]
    fx = (xs - x0)[None, None, :]
    tl = grid[:, y0][:, :, x0]
    tr = grid[:, y0][:, :, x1]
    bl = grid[:, y1][:, :, x0]
    br = grid[:, y1][:, :, x1]
    top = tl * (1 - fx) + tr * fx
    bot = bl * (1 - fx) + br * fx
    return top * (1 - fy) + bot * fy


def make_pair(rng: np.random.Generator, size: int = 64,
              gamma: float = 2.2) -> tuple[Tensor, Tensor]:
    """(low, ground truth), both 1 x 3 x size x size float32 in [0, 1]."""
    grid = rng.uniform(0.08, 0.95, size=(3, 5, 5))
    gt = _bilinear_resize(grid, size)
    gt = np.clip(gt, 0.0, 1.0).astype(np.float32)
    low = (gt.astype(np.float64) ** gamma).astype(np.float32)
    return (Tensor._wrap(low[None].copy()), Tensor._wrap(gt[None].copy()))


def make_synthetic_pairs(count: int = 16, size: int = 64, seed: int = 0,
                         gamma: float = 2.2) -> list[tuple[Tensor, Tensor]]:
    rng = np.random.default_rng(np.random.PCG64(seed))
    return [make_pair(rng, size=size, gamma=gamma) for _ in range(count)]


def write_synthetic_corpus(directory, count: int = 16, size: int = 64,
                           seed: int = 0, gamma: float = 2.2) -> Path:
    """Write PNG pairs plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, (low, gt) in enumerate(make_synthetic_pairs(count, size, seed, gamma)):
        low_name = f"low_{i:03d}.png"
        gt_name = f"gt_{i:03d}.png"
        save_image(low, directory / low_name)
        save_image(gt, directory / gt_name)
        rows.append((low_name, gt_name))
    manifest = directory / "manifest.csv"
    write_manifest(rows, manifest)
    return manifest
