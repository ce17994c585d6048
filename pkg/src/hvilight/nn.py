"""Learnable-parameter registry and small conv building blocks."""

from __future__ import annotations

import math

import numpy as np

from . import tensor as T
from .tensor import Tensor


class RegistryError(ValueError):
    module = "nn"


class ParamRegistry:
    """Named, ordered collection of learnable tensors.

    Iteration order is insertion order and is what checkpoints serialize,
    so construction order must be deterministic.
    """

    def __init__(self):
        self._params: dict[str, Tensor] = {}

    def add(self, name: str, value: np.ndarray) -> Tensor:
        if name in self._params:
            raise RegistryError(f"duplicate parameter name {name!r}")
        t = Tensor(value, requires_grad=True)
        self._params[name] = t
        return t

    def __len__(self) -> int:
        return len(self._params)

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def names(self) -> list[str]:
        return list(self._params)

    def items(self):
        return self._params.items()

    def tensors(self):
        return self._params.values()

    def zero_grad(self) -> None:
        for t in self._params.values():
            t.grad = None

    def total_parameters(self) -> int:
        return sum(t.size for t in self._params.values())


def kaiming_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(np.float32)


class Conv2d:
    """Conv layer owning its weights inside a registry.

    zero_init marks output projections that must start the block as an
    identity-plus-nothing residual.
    """

    def __init__(self, reg: ParamRegistry, name: str, cin: int, cout: int,
                 kernel, stride=1, padding=0, dilation=1, groups: int = 1,
                 bias: bool = True, zero_init: bool = False,
                 rng: np.random.Generator | None = None):
        kh, kw = (kernel, kernel) if isinstance(kernel, int) else kernel
        self.stride = stride
        self.padding = padding
        self.dilation = dilation
        self.groups = groups
        self.cin, self.cout, self.kh, self.kw = cin, cout, kh, kw
        fan_in = (cin // groups) * kh * kw
        if zero_init:
            w = np.zeros((cout, cin // groups, kh, kw), dtype=np.float32)
        else:
            if rng is None:
                raise RegistryError(f"{name}: rng required for random init")
            w = kaiming_uniform(rng, (cout, cin // groups, kh, kw), fan_in)
        self.weight = reg.add(name + ".weight", w)
        self.bias = reg.add(name + ".bias", np.zeros(cout, dtype=np.float32)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        return T.conv2d(x, self.weight, self.bias, stride=self.stride,
                        padding=self.padding, dilation=self.dilation,
                        groups=self.groups)

    def flops(self, h: int, w: int) -> int:
        """Multiply-accumulate count at an h-by-w input."""
        sh, sw = (self.stride, self.stride) if isinstance(self.stride, int) else self.stride
        ph, pw = (self.padding, self.padding) if isinstance(self.padding, int) else self.padding
        dh, dw = (self.dilation, self.dilation) if isinstance(self.dilation, int) else self.dilation
        oh = (h + 2 * ph - dh * (self.kh - 1) - 1) // sh + 1
        ow = (w + 2 * pw - dw * (self.kw - 1) - 1) // sw + 1
        return oh * ow * self.cout * (self.cin // self.groups) * self.kh * self.kw

    def out_size(self, h: int, w: int) -> tuple[int, int]:
        sh, sw = (self.stride, self.stride) if isinstance(self.stride, int) else self.stride
        ph, pw = (self.padding, self.padding) if isinstance(self.padding, int) else self.padding
        dh, dw = (self.dilation, self.dilation) if isinstance(self.dilation, int) else self.dilation
        return ((h + 2 * ph - dh * (self.kh - 1) - 1) // sh + 1,
                (w + 2 * pw - dw * (self.kw - 1) - 1) // sw + 1)


def scalar_param(reg: ParamRegistry, name: str, init: float) -> Tensor:
    """A shape-(1,) learnable scalar (broadcasts against feature maps)."""
    return reg.add(name, np.full((1,), init, dtype=np.float32))
