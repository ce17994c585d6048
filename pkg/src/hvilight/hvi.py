"""Bidirectional RGB <-> HVI color transform.

HVI decouples a luminance plane I from a 2-d chrominance plane (H, V).
Luminance is the HSV value max(R, G, B); chrominance is the HSV
saturation/hue point mapped to Cartesian coordinates and scaled by a
luminance-dependent density term, so color points compress toward the
origin in dark regions and the space stays one-to-one with RGB (no
pure-black plane):

    I = max(R, G, B)
    H = C_k(I) * s * cos(theta)
    V = C_k(I) * s * sin(theta)

with s, theta the HSV saturation and hue angle, and

    C_k(i) = (sin(pi * i / 2) + eps) ** (1 / k)

which is strictly increasing on [0, 1], ~0 at black and ~1 at full
luminance. The exponent k shifts how quickly the chroma disk opens up
with luminance. Both directions are differentiable away from the
max/atan2 branch points, so the transform may sit inside a network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .tensor import Tensor


class ColorError(ValueError):
    module = "hvi"


@dataclass(frozen=True)
class HviConfig:
    """density_k controls chroma-disk opening; epsilon guards black."""

    density_k: float = 1.0
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.density_k <= 0:
            raise ColorError(f"density_k must be positive, got {self.density_k}")
        if self.epsilon <= 0:
            raise ColorError(f"epsilon must be positive, got {self.epsilon}")


class HviImage:
    """Three B x 1 x H x W planes: chrominance (h, v) and luminance i.

    Invariants: i in [0, 1], h^2 + v^2 <= C_k(i)^2 (up to float noise),
    and grayscale inputs produce exactly zero chroma.
    """

    __slots__ = ("h", "v", "i")

    def __init__(self, h: Tensor, v: Tensor, i: Tensor):
        if not (h.shape == v.shape == i.shape):
            raise ColorError(
                f"plane shapes differ: {h.shape}, {v.shape}, {i.shape}")
        if len(h.shape) != 4 or h.shape[1] != 1:
            raise ColorError(f"planes must be B x 1 x H x W, got {h.shape}")
        self.h = h
        self.v = v
        self.i = i

    @property
    def shape(self) -> tuple:
        return self.h.shape


def c_k(i: Tensor, cfg: HviConfig) -> Tensor:
    """Luminance-dependent chroma density scale, strictly increasing on [0, 1]."""
    vals = i.data
    if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
        raise ColorError("c_k input outside [0, 1]")
    base = T.add(T.sin(T.mul(i, math.pi / 2.0)), cfg.epsilon)
    if cfg.density_k == 1.0:
        return base
    return T.pow_scalar(base, 1.0 / cfg.density_k)


def _split_rgb(rgb: Tensor):
    if len(rgb.shape) != 4 or rgb.shape[1] != 3:
        raise ColorError(f"expected B x 3 x H x W, got {rgb.shape}")
    return rgb[:, 0:1], rgb[:, 1:2], rgb[:, 2:3]


def rgb_to_hvi(rgb: Tensor, cfg: HviConfig = HviConfig()) -> HviImage:
    """Forward transform for images with values in [0, 1].

    Hue uses the standard hexagonal HSV definition, realized with
    constant selection masks (the max-channel choice), so gradients flow
    through the value arithmetic and the transform is differentiable
    away from channel ties. Hue at zero saturation is defined as 0.
    """
    if np.isnan(rgb.data).any():
        raise ColorError("NaN in RGB input")
    r, g, b = _split_rgb(rgb)
    mx = T.maximum(T.maximum(r, g), b)
    mn = T.minimum(T.minimum(r, g), b)
    d = T.sub(mx, mn)

    rd, gd, bd = r.data, g.data, b.data
    dtype = rgb.data.dtype
    is_r = (rd >= gd) & (rd >= bd)
    is_g = (gd > rd) & (gd >= bd)
    is_b = ~(is_r | is_g)
    chroma_zero = (d.data == 0.0).astype(dtype)
    value_zero = (mx.data == 0.0).astype(dtype)

    # safe denominators; the guarded positions are masked to zero below
    d_safe = T.add(d, Tensor._wrap(chroma_zero))
    mx_safe = T.add(mx, Tensor._wrap(value_zero))

    t_r = T.div(T.sub(g, b), d_safe)
    t_r = T.sub(t_r, T.mul(T.floor(T.mul(t_r, 1.0 / 6.0)), 6.0))  # wraps negatives into [0, 6)
    t_g = T.add(T.div(T.sub(b, r), d_safe), 2.0)
    t_b = T.add(T.div(T.sub(r, g), d_safe), 4.0)
    h6 = T.add(T.add(T.mul(t_r, Tensor._wrap(is_r.astype(dtype))),
                     T.mul(t_g, Tensor._wrap(is_g.astype(dtype)))),
               T.mul(t_b, Tensor._wrap(is_b.astype(dtype))))
    theta = T.mul(T.mul(h6, math.pi / 3.0), Tensor._wrap(1.0 - chroma_zero))

    sat = T.mul(T.div(d, mx_safe), Tensor._wrap(1.0 - value_zero))
    scale = T.mul(c_k(mx, cfg), sat)
    return HviImage(T.mul(scale, T.cos(theta)),
                    T.mul(scale, T.sin(theta)),
                    mx)


def hvi_to_rgb(hvi: HviImage, cfg: HviConfig = HviConfig()) -> Tensor:
    """Inverse transform, tolerant of out-of-gamut network outputs.

    Saturation recovery divides by max(C_k(i), eps) and clamps to [0, 1],
    and the final RGB is clamped to [0, 1]; nothing is rejected.
    """
    i = T.clamp(hvi.i, 0.0, 1.0)
    # the 1e-30 floor keeps the gradient finite at zero chroma; it shifts
    # the radius by at most 1e-15
    radius = T.sqrt(T.add(T.add(T.mul(hvi.h, hvi.h), T.mul(hvi.v, hvi.v)), 1e-30))
    denom = T.maximum(c_k(i, cfg), T.full((1,), cfg.epsilon, dtype=i.data.dtype))
    sat = T.clamp(T.div(radius, denom), 0.0, 1.0)

    hue6 = T.mul(T.atan2(hvi.v, hvi.h), 3.0 / math.pi)  # (-3, 3]
    hue6 = T.sub(hue6, T.mul(T.floor(T.mul(hue6, 1.0 / 6.0)), 6.0))  # [0, 6)

    channels = []
    for n in (5.0, 3.0, 1.0):  # R, G, B offsets of the standard inverse
        k6 = T.add(hue6, n)
        k6 = T.sub(k6, T.mul(T.floor(T.mul(k6, 1.0 / 6.0)), 6.0))
        wedge = T.clamp(T.minimum(k6, T.sub(T.full((1,), 4.0, dtype=i.data.dtype), k6)), 0.0, 1.0)
        channels.append(T.sub(i, T.mul(T.mul(i, sat), wedge)))
    return T.clamp(T.concat(channels, axis=1), 0.0, 1.0)
