"""Approximation bases: monomials and radial basis functions.

RBFs expose three radial callbacks, each vectorized over ``r >= 0``:

* ``value(r)``       the function itself,
* ``d1_over_r(r)``   phi'(r) / r, finite at r = 0 for smooth kernels,
* ``d2(r)``          phi''(r).

These three are enough to build any first or second order derivative of
``phi(|x - c|)`` through the chain rule.  Polyharmonic kernels with too
low an exponent have divergent derivatives at the origin; evaluating one
there raises ``NumericalError`` instead of returning garbage.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from ..errors import ConfigError, NumericalError


def graded_lex_exponents(dim: int, degree: int):
    """All exponent tuples with total degree <= degree, graded-lex order.

    Within one total degree, earlier axes carry higher exponents first:
    in 2D degree 2 the order is 1, x, y, x^2, xy, y^2.
    """
    expos = [e for e in product(range(degree + 1), repeat=dim) if sum(e) <= degree]
    expos.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return expos


class MonomialBasis:
    """Finite monomial basis over ``dim`` variables.

    Either a full basis of all monomials up to ``degree``, or an explicit
    exponent list through :meth:`from_exponents`.
    """

    def __init__(self, dim: int, degree: int):
        if degree < 0:
            raise ConfigError("monomial degree must be non-negative")
        self.dim = int(dim)
        self.degree = int(degree)
        self.exponents = graded_lex_exponents(self.dim, self.degree)

    @classmethod
    def from_exponents(cls, dim: int, exponents):
        self = cls.__new__(cls)
        self.dim = int(dim)
        self.exponents = [tuple(int(x) for x in e) for e in exponents]
        if not self.exponents:
            raise ConfigError("empty monomial basis")
        for e in self.exponents:
            if len(e) != dim or any(x < 0 for x in e):
                raise ConfigError(f"bad exponent tuple {e} for dimension {dim}")
        self.degree = max(sum(e) for e in self.exponents)
        return self

    @property
    def size(self) -> int:
        return len(self.exponents)

    def eval(self, points):
        """Basis matrix B with B[i, j] = b_j(points[i])."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        cols = [np.prod(points ** np.asarray(e), axis=1) for e in self.exponents]
        return np.stack(cols, axis=1)

    def apply(self, op, points):
        """Matrix of (L b_j)(points), one column per basis function."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        cols = []
        for e in self.exponents:
            acc = np.zeros(points.shape[0])
            for c, elem in op.terms():
                acc += c * elem.apply_monomial(e, points)
            cols.append(acc)
        return np.stack(cols, axis=1)

    def __repr__(self):
        return f"MonomialBasis(dim={self.dim}, size={self.size})"


def monomial_count(degree: int, dim: int) -> int:
    """Number of monomials of total degree <= degree in ``dim`` variables."""
    return math.comb(degree + dim, dim)


class Gaussian:
    """phi(r) = exp(-(r / sigma)^2)."""

    def __init__(self, sigma: float):
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ConfigError("gaussian shape parameter must be positive")

    def value(self, r):
        s2 = self.sigma * self.sigma
        return np.exp(-np.asarray(r) ** 2 / s2)

    def d1_over_r(self, r):
        s2 = self.sigma * self.sigma
        return -2.0 / s2 * self.value(r)

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        s2 = self.sigma * self.sigma
        return (4.0 * r * r / (s2 * s2) - 2.0 / s2) * self.value(r)

    def __repr__(self):
        return f"Gaussian({self.sigma})"


class Multiquadric:
    """phi(r) = sqrt(1 + (r / sigma)^2)."""

    def __init__(self, sigma: float):
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ConfigError("multiquadric shape parameter must be positive")

    def _f(self, r):
        u = np.asarray(r, dtype=float) / self.sigma
        return np.sqrt(1.0 + u * u)

    def value(self, r):
        return self._f(r)

    def d1_over_r(self, r):
        return 1.0 / (self.sigma**2 * self._f(r))

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        f = self._f(r)
        return 1.0 / (self.sigma**2 * f) - r * r / (self.sigma**4 * f**3)

    def __repr__(self):
        return f"Multiquadric({self.sigma})"


class InverseMultiquadric:
    """phi(r) = 1 / sqrt(1 + (r / sigma)^2)."""

    def __init__(self, sigma: float):
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ConfigError("inverse multiquadric shape parameter must be positive")

    def _g(self, r):
        u = np.asarray(r, dtype=float) / self.sigma
        return 1.0 / np.sqrt(1.0 + u * u)

    def value(self, r):
        return self._g(r)

    def d1_over_r(self, r):
        return -self._g(r) ** 3 / self.sigma**2

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        g = self._g(r)
        return -(g**3) / self.sigma**2 + 3.0 * r * r * g**5 / self.sigma**4

    def __repr__(self):
        return f"InverseMultiquadric({self.sigma})"


class Polyharmonic:
    """phi(r) = r^k for odd k, r^k log(r) for even k, with phi(0) = 0.

    Scale free, so it pairs naturally with monomial augmentation and
    nearest-neighbor scaling.  Derivatives at r = 0 exist only while the
    exponent exceeds the derivative order; anything else raises.
    """

    def __init__(self, exponent: int):
        self.exponent = int(exponent)
        if self.exponent < 1:
            raise ConfigError("polyharmonic exponent must be a positive integer")
        self.even = self.exponent % 2 == 0

    def _check_origin(self, r):
        r = np.asarray(r, dtype=float)
        if self.exponent <= 2 and np.any(r == 0):
            raise NumericalError(
                f"derivatives of polyharmonic r^{self.exponent} are singular "
                "at the stencil center; use an exponent of 3 or more"
            )
        return r

    def value(self, r):
        r = np.asarray(r, dtype=float)
        k = self.exponent
        if not self.even:
            return r**k
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r**k * np.log(np.where(r > 0, r, 1.0)), 0.0)
        return out

    def d1_over_r(self, r):
        k = self.exponent
        r = self._check_origin(r)
        if not self.even:
            with np.errstate(divide="ignore"):
                return k * r ** (k - 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(r > 0, r, 1.0)
            out = np.where(r > 0, safe ** (k - 2) * (k * np.log(safe) + 1.0), 0.0)
        return out

    def d2(self, r):
        k = self.exponent
        r = self._check_origin(r)
        if not self.even:
            with np.errstate(divide="ignore"):
                return k * (k - 1.0) * r ** (k - 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(r > 0, r, 1.0)
            out = np.where(
                r > 0,
                safe ** (k - 2) * ((k * k - k) * np.log(safe) + 2.0 * k - 1.0),
                0.0,
            )
        return out

    def __repr__(self):
        return f"Polyharmonic({self.exponent})"
