"""Three-level dual-branch U-Net over the decoupled color planes.

The chrominance planes (2 channels) and the luminance plane (1 channel)
get separate embeddings and separate encoder/decoder paths; a dual-stream
interaction block couples the two paths at every level on the way down
and on the way up. Output heads are zero-initialized and predict plane
residuals, so an untrained network is the identity map.

Spatial sizes are arbitrary (>= 8): inputs are zero-padded to multiples
of 4 internally and cropped back on exit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .attention import AttentionConfig
from .blocks import DualStreamBlock
from .hvi import HviConfig, HviImage, hvi_to_rgb, rgb_to_hvi
from .nn import Conv2d, ParamRegistry
from .tensor import Tensor


class NetworkError(ValueError):
    module = "network"


@dataclass(frozen=True)
class NetworkConfig:
    base_channels: int = 16
    levels: int = 3
    density_k: float = 1.0
    epsilon: float = 1e-8
    blocks_per_level: int = 1
    heads: int = 4
    ffn_expand: float = 2.0
    reduction: int = 4
    fuse_pre: bool = True
    fuse_post: bool = True
    enhancement: str = "dynamic"

    def __post_init__(self):
        if self.levels != 3:
            raise NetworkError("this architecture is fixed at three levels")
        if self.base_channels % 4:
            raise NetworkError(
                f"base_channels={self.base_channels} must be divisible by 4")
        if self.base_channels % self.heads:
            raise NetworkError(
                f"base_channels={self.base_channels} not divisible by heads={self.heads}")
        if self.blocks_per_level < 1:
            raise NetworkError("blocks_per_level must be >= 1")

    @property
    def hvi(self) -> HviConfig:
        return HviConfig(density_k=self.density_k, epsilon=self.epsilon)


class Network:
    """Parameter registry plus the module tree that runs it."""

    def __init__(self, cfg: NetworkConfig, seed: int):
        self.cfg = cfg
        self.params = ParamRegistry()
        rng = np.random.default_rng(np.random.PCG64(seed))
        reg = self.params
        c1 = cfg.base_channels
        c2, c3 = 2 * c1, 4 * c1

        def attn_cfg(c):
            return AttentionConfig(channels=c, heads=cfg.heads,
                                   ffn_expand=cfg.ffn_expand,
                                   reduction=cfg.reduction)

        def stack(name, c):
            return [DualStreamBlock(reg, f"{name}.{i}", attn_cfg(c), rng,
                                    fuse_pre=cfg.fuse_pre,
                                    fuse_post=cfg.fuse_post,
                                    enhancement=cfg.enhancement)
                    for i in range(cfg.blocks_per_level)]

        self.embed_hv = Conv2d(reg, "embed_hv", 2, c1, 3, padding=1, rng=rng)
        self.embed_i = Conv2d(reg, "embed_i", 1, c1, 3, padding=1, rng=rng)
        self.enc1 = stack("enc1", c1)
        self.down1_i = Conv2d(reg, "down1_i", c1, c2, 3, stride=2, padding=1, rng=rng)
        self.down1_hv = Conv2d(reg, "down1_hv", c1, c2, 3, stride=2, padding=1, rng=rng)
        self.enc2 = stack("enc2", c2)
        self.down2_i = Conv2d(reg, "down2_i", c2, c3, 3, stride=2, padding=1, rng=rng)
        self.down2_hv = Conv2d(reg, "down2_hv", c2, c3, 3, stride=2, padding=1, rng=rng)
        self.mid = stack("mid", c3)
        self.up2_i = Conv2d(reg, "up2_i", c3, c2, 3, padding=1, rng=rng)
        self.up2_hv = Conv2d(reg, "up2_hv", c3, c2, 3, padding=1, rng=rng)
        self.dec2 = stack("dec2", c2)
        self.up1_i = Conv2d(reg, "up1_i", c2, c1, 3, padding=1, rng=rng)
        self.up1_hv = Conv2d(reg, "up1_hv", c2, c1, 3, padding=1, rng=rng)
        self.dec1 = stack("dec1", c1)
        self.head_hv = Conv2d(reg, "head_hv", c1, 2, 3, padding=1, zero_init=True)
        self.head_i = Conv2d(reg, "head_i", c1, 1, 3, padding=1, zero_init=True)

    def forward(self, rgb: Tensor) -> tuple[Tensor, HviImage]:
        b, c, h, w = rgb.shape
        if h < 8 or w < 8:
            raise NetworkError(f"input must be at least 8x8, got {h}x{w}")
        hvi_cfg = self.cfg.hvi
        hvi = rgb_to_hvi(rgb, hvi_cfg)

        pad_h = (-h) % 4
        pad_w = (-w) % 4
        pads = ((0, 0), (0, 0), (0, pad_h), (0, pad_w))

        def padded(p):
            return T.pad_zero(p, pads) if (pad_h or pad_w) else p

        h_in, v_in, i_in = padded(hvi.h), padded(hvi.v), padded(hvi.i)

        x_hv = self.embed_hv(T.concat([h_in, v_in], axis=1))
        x_i = self.embed_i(i_in)

        for blk in self.enc1:
            x_i, x_hv = blk(x_i, x_hv)
        skip1_i, skip1_hv = x_i, x_hv
        x_i, x_hv = self.down1_i(x_i), self.down1_hv(x_hv)
        for blk in self.enc2:
            x_i, x_hv = blk(x_i, x_hv)
        skip2_i, skip2_hv = x_i, x_hv
        x_i, x_hv = self.down2_i(x_i), self.down2_hv(x_hv)
        for blk in self.mid:
            x_i, x_hv = blk(x_i, x_hv)

        x_i = T.add(self.up2_i(T.upsample_nearest2x(x_i)), skip2_i)
        x_hv = T.add(self.up2_hv(T.upsample_nearest2x(x_hv)), skip2_hv)
        for blk in self.dec2:
            x_i, x_hv = blk(x_i, x_hv)
        x_i = T.add(self.up1_i(T.upsample_nearest2x(x_i)), skip1_i)
        x_hv = T.add(self.up1_hv(T.upsample_nearest2x(x_hv)), skip1_hv)
        for blk in self.dec1:
            x_i, x_hv = blk(x_i, x_hv)

        delta_hv = self.head_hv(x_hv)
        delta_i = self.head_i(x_i)
        h_out = T.add(h_in, delta_hv[:, 0:1])
        v_out = T.add(v_in, delta_hv[:, 1:2])
        i_out = T.add(i_in, delta_i)

        if pad_h or pad_w:
            crop = (slice(None), slice(None), slice(0, h), slice(0, w))
            h_out, v_out, i_out = h_out[crop], v_out[crop], i_out[crop]
        i_out = T.clamp(i_out, 0.0, 1.0)
        hvi_out = HviImage(h_out, v_out, i_out)
        return hvi_to_rgb(hvi_out, hvi_cfg), hvi_out

    def __call__(self, rgb: Tensor):
        return self.forward(rgb)

    def flops(self, h: int, w: int) -> int:
        """Analytic multiply-accumulate count for one h-by-w image.

        Counts every conv as out_h*out_w*c_out*(c_in/groups)*kh*kw and
        every attention call as its projection convs plus the two token
        matmuls (2*heads*d^2*L); elementwise work and the color transform
        are not counted.
        """
        ph, pw = h + (-h) % 4, w + (-w) % 4
        sizes = [(ph, pw), (ph // 2, pw // 2), (ph // 4, pw // 4)]
        total = self.embed_hv.flops(ph, pw) + self.embed_i.flops(ph, pw)
        for blk in self.enc1:
            total += blk.flops(*sizes[0])
        total += self.down1_i.flops(*sizes[0]) + self.down1_hv.flops(*sizes[0])
        for blk in self.enc2:
            total += blk.flops(*sizes[1])
        total += self.down2_i.flops(*sizes[1]) + self.down2_hv.flops(*sizes[1])
        for blk in self.mid:
            total += blk.flops(*sizes[2])
        total += self.up2_i.flops(*sizes[1]) + self.up2_hv.flops(*sizes[1])
        for blk in self.dec2:
            total += blk.flops(*sizes[1])
        total += self.up1_i.flops(*sizes[0]) + self.up1_hv.flops(*sizes[0])
        for blk in self.dec1:
            total += blk.flops(*sizes[0])
        total += self.head_hv.flops(ph, pw) + self.head_i.flops(ph, pw)
        return total


def build(cfg: NetworkConfig, seed: int) -> Network:
    """Deterministically initialized network; same seed, same bytes."""
    return Network(cfg, seed)


def count_flops(cfg: NetworkConfig, h: int, w: int) -> int:
    return build(cfg, seed=0).flops(h, w)
