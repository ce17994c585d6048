"""Dual-stream interaction blocks.

One block couples the luminance and chrominance feature streams three
ways: an attention-guided fusion stage before the core, a cross-attention
enhancement core with learned dynamic weighting and a multi-branch conv
tail, and a second fusion stage after the core. Both streams get their
own parameter sets; the wiring is symmetric.

Every final projection is zero-initialized, so a freshly built block is
an identity-plus-residual map and the surrounding network starts stable.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .attention import (AttentionConfig, ChannelGate, CrossAttention,
                        FeedForward, PixelGate, SpatialGate)
from .nn import Conv2d, ParamRegistry, scalar_param
from .tensor import Tensor


class BlockError(ValueError):
    module = "blocks"


class AttentionFusion:
    """Blend two streams under channel/spatial/pixel attention gating.

    The base sum of both streams is gated twice (channel-attention path
    and spatial-attention path, each refined by its own pixel gate), the
    two gate maps are mixed by learned scalars, and the result steers a
    convex-style blend that is added on top of the base sum:

        base = primary + other
        w_c  = sigmoid(pixel_gate_c(channel_gate(base) * base + base, base))
        w_s  = sigmoid(pixel_gate_s(spatial_gate(base) * base + base, base))
        w    = mix_channel * w_c + mix_spatial * w_s
        out  = base + w * other + (1 - w) * primary

    With primary == other the output is exactly 3x the input for any w.
    """

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator):
        self.channel_gate = ChannelGate(reg, name + ".cgate", cfg, rng)
        self.spatial_gate = SpatialGate(reg, name + ".sgate", rng)
        self.pixel_gate_c = PixelGate(reg, name + ".pgate_c", cfg.channels, rng)
        self.pixel_gate_s = PixelGate(reg, name + ".pgate_s", cfg.channels, rng)
        self.mix_channel = scalar_param(reg, name + ".mix_channel", 0.5)
        self.mix_spatial = scalar_param(reg, name + ".mix_spatial", 0.5)

    def __call__(self, primary: Tensor, other: Tensor) -> Tensor:
        if primary.shape != other.shape:
            raise BlockError(f"stream shapes differ: {primary.shape} vs {other.shape}")
        base = T.add(primary, other)
        w = self.gate(base)
        return T.add(base, T.add(T.mul(w, other),
                                 T.mul(T.sub(T.full((1,), 1.0, dtype=w.dtype), w), primary)))

    def gate(self, base: Tensor) -> Tensor:
        gated_c = T.add(T.mul(self.channel_gate(base), base), base)
        w_c = T.sigmoid(self.pixel_gate_c(gated_c, base))
        gated_s = T.add(T.mul(self.spatial_gate(base), base), base)
        w_s = T.sigmoid(self.pixel_gate_s(gated_s, base))
        return T.add(T.mul(self.mix_channel, w_c), T.mul(self.mix_spatial, w_s))

    def flops(self, h: int, w: int) -> int:
        return (self.channel_gate.flops(h, w) + self.spatial_gate.flops(h, w)
                + self.pixel_gate_c.flops(h, w) + self.pixel_gate_s.flops(h, w))


class MultiBranchConv:
    """Parallel 1x1 / 3x3 / dilated-3x3 / (1x3 then 3x1) branches, fused.

    Each branch maps C to C//4 channels; the concatenation is fused back
    to C by a zero-initialized 1x1 conv, so the block starts as zero.
    """

    def __init__(self, reg: ParamRegistry, name: str, channels: int,
                 rng: np.random.Generator):
        if channels < 4:
            raise BlockError(f"multi-branch conv needs >= 4 channels, got {channels}")
        cb = channels // 4
        self.point = Conv2d(reg, name + ".point", channels, cb, 1, rng=rng)
        self.local = Conv2d(reg, name + ".local", channels, cb, 3, padding=1, rng=rng)
        self.dilated = Conv2d(reg, name + ".dilated", channels, cb, 3,
                              padding=2, dilation=2, rng=rng)
        self.row = Conv2d(reg, name + ".row", channels, cb, (1, 3),
                          padding=(0, 1), rng=rng)
        self.col = Conv2d(reg, name + ".col", cb, cb, (3, 1),
                          padding=(1, 0), rng=rng)
        self.fuse = Conv2d(reg, name + ".fuse", 4 * cb, channels, 1, zero_init=True)
        self.channels = channels

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.channels:
            raise BlockError(f"expected {self.channels} channels, got {x.shape[1]}")
        branches = [self.point(x), self.local(x), self.dilated(x),
                    self.col(self.row(x))]
        return self.fuse(T.concat(branches, axis=1))

    def flops(self, h: int, w: int) -> int:
        return (self.point.flops(h, w) + self.local.flops(h, w)
                + self.dilated.flops(h, w) + self.row.flops(h, w)
                + self.col.flops(h, w) + self.fuse.flops(h, w))


class CrossEnhance:
    """Cross-attention enhancement core with dynamic weighting.

        z    = cross_attention(self_stream, fused_stream)
        z'   = ffn_scale * FFN(attn_scale * z + fused_scale * fused) + skip_scale * z
        out  = multi_branch(self_stream + z') + (self_stream + z')

    Scalars start at (attn 1, fused 0, ffn 1, skip 1) so the core begins
    as plain residual cross attention.
    """

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator):
        self.cross = CrossAttention(reg, name + ".cross", cfg, rng)
        self.ffn = FeedForward(reg, name + ".ffn", cfg, rng, zero_out=True)
        self.attn_scale = scalar_param(reg, name + ".attn_scale", 1.0)
        self.fused_scale = scalar_param(reg, name + ".fused_scale", 0.0)
        self.ffn_scale = scalar_param(reg, name + ".ffn_scale", 1.0)
        self.skip_scale = scalar_param(reg, name + ".skip_scale", 1.0)
        self.multi_branch = MultiBranchConv(reg, name + ".mb", cfg.channels, rng)

    def __call__(self, self_stream: Tensor, fused: Tensor) -> Tensor:
        z = self.cross(self_stream, fused)
        mixed = T.add(T.mul(self.attn_scale, z), T.mul(self.fused_scale, fused))
        z_hat = T.add(T.mul(self.ffn_scale, self.ffn(mixed)),
                      T.mul(self.skip_scale, z))
        base = T.add(self_stream, z_hat)
        return T.add(self.multi_branch(base), base)

    def flops(self, h: int, w: int) -> int:
        return (self.cross.flops(h, w) + self.ffn.flops(h, w)
                + self.multi_branch.flops(h, w))


class PlainCrossBlock:
    """Ablation core: standard residual cross attention plus residual FFN,
    no dynamic scalars, no multi-branch tail."""

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator):
        self.cross = CrossAttention(reg, name + ".cross", cfg, rng)
        self.ffn = FeedForward(reg, name + ".ffn", cfg, rng, zero_out=True)

    def __call__(self, self_stream: Tensor, fused: Tensor) -> Tensor:
        attended = T.add(self_stream, self.cross(self_stream, fused))
        return T.add(attended, self.ffn(attended))

    def flops(self, h: int, w: int) -> int:
        return self.cross.flops(h, w) + self.ffn.flops(h, w)


class DualStreamBlock:
    """The full interaction block applied symmetrically to both streams.

    Stage toggles implement the wiring ablations: without pre-fusion the
    core consumes the raw other stream; without post-fusion the core
    output is returned directly.
    """

    def __init__(self, reg: ParamRegistry, name: str, cfg: AttentionConfig,
                 rng: np.random.Generator, fuse_pre: bool = True,
                 fuse_post: bool = True, enhancement: str = "dynamic"):
        if enhancement not in ("dynamic", "plain"):
            raise BlockError(f"unknown enhancement kind {enhancement!r}")
        core = CrossEnhance if enhancement == "dynamic" else PlainCrossBlock
        self.fuse_pre_i = AttentionFusion(reg, name + ".pre_i", cfg, rng) if fuse_pre else None
        self.fuse_pre_hv = AttentionFusion(reg, name + ".pre_hv", cfg, rng) if fuse_pre else None
        self.core_i = core(reg, name + ".core_i", cfg, rng)
        self.core_hv = core(reg, name + ".core_hv", cfg, rng)
        self.fuse_post_i = AttentionFusion(reg, name + ".post_i", cfg, rng) if fuse_post else None
        self.fuse_post_hv = AttentionFusion(reg, name + ".post_hv", cfg, rng) if fuse_post else None

    def __call__(self, f_i: Tensor, f_hv: Tensor) -> tuple[Tensor, Tensor]:
        if f_i.shape != f_hv.shape:
            raise BlockError(f"stream shapes differ: {f_i.shape} vs {f_hv.shape}")
        # pre-fusion produces, per stream, the blended view of the OTHER stream
        fused_for_i = self.fuse_pre_i(f_hv, f_i) if self.fuse_pre_i else f_hv
        fused_for_hv = self.fuse_pre_hv(f_i, f_hv) if self.fuse_pre_hv else f_i
        z_i = self.core_i(f_i, fused_for_i)
        z_hv = self.core_hv(f_hv, fused_for_hv)
        out_i = self.fuse_post_i(z_i, z_hv) if self.fuse_post_i else z_i
        out_hv = self.fuse_post_hv(z_hv, z_i) if self.fuse_post_hv else z_hv
        return out_i, out_hv

    def flops(self, h: int, w: int) -> int:
        total = self.core_i.flops(h, w) + self.core_hv.flops(h, w)
        for stage in (self.fuse_pre_i, self.fuse_pre_hv,
                      self.fuse_post_i, self.fuse_post_hv):
            if stage is not None:
                total += stage.flops(h, w)
        return total
