"""Attention operators and the feed-forward block used by the stream blocks.

Channel and spatial gates follow the usual squeeze/gate recipes; the
pixel gate is a two-input pointwise block returning logits so callers
decide where the squashing happens. Cross attention runs over channel
tokens (per head, channels attend to channels with spatial rows as the
descriptors), so its cost is linear in H*W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .nn import Conv2d, ParamRegistry
from .tensor import Tensor


class AttentionError(ValueError):
    module = "attention"


@dataclass(frozen=True)
class AttentionConfig:
    channels: int
    heads: int = 4
    ffn_expand: float = 2.0
    reduction: int = 4

    def __post_init__(self):
        if self.channels % self.heads:
            raise AttentionError(
                f"channels={self.channels} not divisible by heads={self.heads}")
        if self.channels // self.reduction < 1:
            raise AttentionError(
                f"reduction={self.reduction} leaves no bottleneck channels")


class ChannelGate:
    """Global-average pool -> bottleneck MLP -> sigmoid, one gate per channel."""

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator):
        c, r = cfg.channels, cfg.reduction
        self.squeeze = Conv2d(reg, name + ".squeeze", c, c // r, 1, rng=rng)
        self.expand = Conv2d(reg, name + ".expand", c // r, c, 1, rng=rng)
        self.channels = c

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.channels:
            raise AttentionError(
                f"expected {self.channels} channels, got {x.shape[1]}")
        pooled = T.mean(x, (2, 3), keepdims=True)
        return T.sigmoid(self.expand(T.relu(self.squeeze(pooled))))

    def flops(self, h: int, w: int) -> int:
        # both 1x1 convs act on the pooled 1x1 map
        return 2 * self.channels * self.squeeze.cout


class SpatialGate:
    """Channel mean/max maps -> 7x7 conv -> sigmoid, one gate per pixel."""

    KERNEL = 7

    def __init__(self, reg: ParamRegistry, name: str, rng: np.random.Generator):
        self.conv = Conv2d(reg, name + ".conv", 2, 1, self.KERNEL,
                           padding=self.KERNEL // 2, rng=rng)

    def __call__(self, x: Tensor) -> Tensor:
        avg = T.mean(x, 1, keepdims=True)
        mx = T.max_reduce(x, 1, keepdims=True)
        return T.sigmoid(self.conv(T.concat([avg, mx], axis=1)))

    def flops(self, h: int, w: int) -> int:
        return self.conv.flops(h, w)


class PixelGate:
    """Two-input pointwise attention; returns logits, caller applies sigmoid."""

    def __init__(self, reg: ParamRegistry, name: str, channels: int,
                 rng: np.random.Generator):
        self.mix = Conv2d(reg, name + ".mix", 2 * channels, channels, 1, rng=rng)
        self.out = Conv2d(reg, name + ".out", channels, channels, 1, rng=rng)
        self.channels = channels

    def __call__(self, a: Tensor, b: Tensor) -> Tensor:
        if a.shape != b.shape:
            raise AttentionError(f"pixel gate inputs differ: {a.shape} vs {b.shape}")
        return self.out(T.relu(self.mix(T.concat([a, b], axis=1))))

    def flops(self, h: int, w: int) -> int:
        return self.mix.flops(h, w) + self.out.flops(h, w)


class CrossAttention:
    """Channel-token cross attention: queries from one stream, keys/values
    from the other.

    Per head, each channel's spatial row is L2-normalized, scores are
    (Q K^T) / sqrt(d) with d the per-head channel count, and softmax runs
    over key channels. Projections are bias-free 1x1 convs; the output
    projection is zero-initialized so the surrounding residual starts as
    identity.
    """

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator):
        c = cfg.channels
        self.heads = cfg.heads
        self.q_proj = Conv2d(reg, name + ".q", c, c, 1, bias=False, rng=rng)
        self.k_proj = Conv2d(reg, name + ".k", c, c, 1, bias=False, rng=rng)
        self.v_proj = Conv2d(reg, name + ".v", c, c, 1, bias=False, rng=rng)
        self.out_proj = Conv2d(reg, name + ".out", c, c, 1, bias=False, zero_init=True)
        self.channels = c

    def __call__(self, q_feat: Tensor, kv_feat: Tensor) -> Tensor:
        if q_feat.shape != kv_feat.shape:
            raise AttentionError(
                f"stream shapes differ: {q_feat.shape} vs {kv_feat.shape}")
        b, c, h, w = q_feat.shape
        if c != self.channels:
            raise AttentionError(f"expected {self.channels} channels, got {c}")
        q = self._tokens(self.q_proj(q_feat))
        k = self._tokens(self.k_proj(kv_feat))
        v = self._tokens(self.v_proj(kv_feat))
        out = attention_core(q, k, v)
        return self.out_proj(T.reshape(out, (b, c, h, w)))

    def _tokens(self, x: Tensor) -> Tensor:
        b, c, h, w = x.shape
        return T.reshape(x, (b, self.heads, c // self.heads, h * w))

    def flops(self, h: int, w: int) -> int:
        c = self.channels
        proj = 4 * c * c * h * w
        ch = c // self.heads
        scores = 2 * self.heads * ch * ch * (h * w)
        return proj + scores


def attention_core(q: Tensor, k: Tensor, v: Tensor) -> Tensor:
    """softmax(norm(Q) norm(K)^T / sqrt(d)) V over B x heads x d x L tokens."""
    d = q.shape[-2]
    qn = _l2_rows(q)
    kn = _l2_rows(k)
    scores = T.mul(T.matmul(qn, T.permute(kn, (0, 1, 3, 2))), 1.0 / math.sqrt(d))
    return T.matmul(T.softmax(scores, axis=-1), v)


def _l2_rows(x: Tensor) -> Tensor:
    norm = T.sqrt(T.add(T.sum_(T.mul(x, x), -1, keepdims=True), 1e-12))
    return T.div(x, norm)


class FeedForward:
    """Pointwise expand -> gelu -> project back."""

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator, zero_out: bool = False):
        c = cfg.channels
        hidden = math.ceil(cfg.ffn_expand * c)
        self.expand = Conv2d(reg, name + ".expand", c, hidden, 1, rng=rng)
        self.project = Conv2d(reg, name + ".project", hidden, c, 1,
                              zero_init=zero_out, rng=None if zero_out else rng)

    def __call__(self, x: Tensor) -> Tensor:
        return self.project(T.gelu(self.expand(x)))

    def flops(self, h: int, w: int) -> int:
        return self.expand.flops(h, w) + self.project.flops(h, w)
