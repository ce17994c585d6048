"""Dual-branch low-light image enhancement library.

A desk-scale, fully testable stack: a from-scratch reverse-mode tensor
engine, a bidirectional RGB <-> HVI color transform, attention-based
dual-stream interaction blocks, a three-level dual-branch U-Net, a
statistics-aware training loss, Adam with cosine annealing, PSNR/SSIM
metrics with chroma-covariance corpus analysis, and file formats for
images, manifests and checkpoints.
"""

__version__ = "0.1.0"

from . import tensor
from .hvi import HviConfig, HviImage, c_k, hvi_to_rgb, rgb_to_hvi
from .loss import LossBreakdown, LossConfig, total_loss
from .network import NetworkConfig, build, count_flops
from .nn import ParamRegistry

__all__ = [
    "tensor",
    "HviConfig",
    "HviImage",
    "c_k",
    "rgb_to_hvi",
    "hvi_to_rgb",
    "LossBreakdown",
    "LossConfig",
    "total_loss",
    "NetworkConfig",
    "build",
    "count_flops",
    "ParamRegistry",
]
