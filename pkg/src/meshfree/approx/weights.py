"""Pointwise weight functions for weighted least squares.

Called on stencil offsets already shifted to the center and scaled, so a
radial profile with O(1) shape parameter behaves the same on every
stencil.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError


class ConstantWeight:
    def __call__(self, offsets):
        return np.ones(np.atleast_2d(offsets).shape[0])

    def __repr__(self):
        return "ConstantWeight()"


class GaussianWeight:
    """w(x) = exp(-(|x| / sigma)^2)."""

    def __init__(self, sigma: float):
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ConfigError("weight shape parameter must be positive")

    def __call__(self, offsets):
        offsets = np.atleast_2d(offsets)
        r2 = np.sum(offsets * offsets, axis=1)
        return np.exp(-r2 / self.sigma**2)

    def __repr__(self):
        return f"GaussianWeight({self.sigma})"
