"""Target nodal spacing as a function of position.

A spacing function maps an ``(M, d)`` array of positions to an ``(M,)``
array of positive target spacings.  Plain floats are accepted anywhere a
spacing is expected and are wrapped into :class:`ConstantSpacing`.
"""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError


class ConstantSpacing:
    def __init__(self, value: float):
        self.value = float(value)
        if not self.value > 0:
            raise GeometryError(f"spacing must be positive, got {value}")

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.full(points.shape[0], self.value)

    def __repr__(self):
        return f"ConstantSpacing({self.value})"


class LinearSpacing:
    """Affine spacing ``h(p) = base + gradient . p``.

    The caller is responsible for keeping ``h`` positive over the shape;
    a non-positive value at any queried point raises ``GeometryError``.
    """

    def __init__(self, base: float, gradient):
        self.base = float(base)
        self.gradient = np.asarray(gradient, dtype=float)

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        h = self.base + points @ self.gradient
        if np.any(h <= 0):
            raise GeometryError("spacing function is non-positive inside the domain")
        return h

    def __repr__(self):
        return f"LinearSpacing({self.base}, {self.gradient.tolist()})"


def as_spacing(h):
    """Coerce a float or callable into a spacing function."""
    if callable(h):
        return h
    return ConstantSpacing(h)
