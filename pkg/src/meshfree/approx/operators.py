"""Linear differential operators acting at a point.

Operators describe what gets approximated: they can evaluate themselves
on monomials and on radial basis functions, which is everything the
weight engines need.  ``op.terms()`` flattens sums and scalar multiples
into ``(coefficient, elementary)`` pairs; each elementary operator knows
its derivative ``order`` so engines can undo coordinate scaling term by
term.

Operator algebra: ``2 * Laplacian() + FirstDerivative(0)`` builds an
``OperatorSum``.  Custom operators subclass :class:`Operator` and
implement ``order``, ``apply_monomial`` and ``apply_rbf``.
"""

from __future__ import annotations

import numpy as np


class Operator:
    """Base class for elementary operators."""

    order: int = 0

    def terms(self):
        return [(1.0, self)]

    def apply_monomial(self, expo, points):
        """Evaluate (L x^expo) at the given points, vectorized (M,)->()."""
        raise NotImplementedError

    def apply_rbf(self, rbf, diff):
        """Evaluate (L phi(|x - c|)) at points x where ``diff = x - c``.

        ``diff`` is an (M, d) array; returns (M,).
        """
        raise NotImplementedError

    def __mul__(self, c):
        return ScaledOperator(float(c), self)

    __rmul__ = __mul__

    def __neg__(self):
        return ScaledOperator(-1.0, self)

    def __add__(self, other):
        return OperatorSum([self, other])

    def __sub__(self, other):
        return OperatorSum([self, ScaledOperator(-1.0, other)])


def _mono_eval(expo, points):
    out = np.ones(points.shape[0])
    for a, e in enumerate(expo):
        if e:
            out = out * points[:, a] ** e
    return out


def _mono_d1(expo, axis, points):
    e = expo[axis]
    if e == 0:
        return np.zeros(points.shape[0])
    new = list(expo)
    new[axis] = e - 1
    return e * _mono_eval(new, points)


def _mono_d2(expo, a, b, points):
    e = expo[a]
    if e == 0:
        return np.zeros(points.shape[0])
    new = list(expo)
    new[a] = e - 1
    return e * _mono_d1(new, b, points)


class Identity(Operator):
    order = 0

    def apply_monomial(self, expo, points):
        return _mono_eval(expo, points)

    def apply_rbf(self, rbf, diff):
        r = np.linalg.norm(diff, axis=1)
        return rbf.value(r)

    def __repr__(self):
        return "Identity()"


class FirstDerivative(Operator):
    order = 1

    def __init__(self, axis: int):
        self.axis = int(axis)

    def apply_monomial(self, expo, points):
        return _mono_d1(expo, self.axis, points)

    def apply_rbf(self, rbf, diff):
        # the product phi'(r)/r * diff tends to 0 with diff for every
        # kernel whose gradient vanishes at the center, so skip r == 0
        r = np.linalg.norm(diff, axis=1)
        out = np.zeros(r.shape[0])
        nz = r > 0
        out[nz] = rbf.d1_over_r(r[nz]) * diff[nz, self.axis]
        return out

    def __repr__(self):
        return f"FirstDerivative({self.axis})"


class SecondDerivative(Operator):
    """Mixed or repeated second derivative d^2/(dx_a dx_b)."""

    order = 2

    def __init__(self, a: int, b: int):
        self.a, self.b = int(min(a, b)), int(max(a, b))

    def apply_monomial(self, expo, points):
        return _mono_d2(expo, self.a, self.b, points)

    def apply_rbf(self, rbf, diff):
        r = np.linalg.norm(diff, axis=1)
        d2 = rbf.d2(r)
        d1r = rbf.d1_over_r(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            ee = np.where(r > 0, diff[:, self.a] * diff[:, self.b] / np.where(r > 0, r * r, 1.0), 0.0)
        out = d2 * ee + d1r * (float(self.a == self.b) - ee)
        return out

    def __repr__(self):
        return f"SecondDerivative({self.a}, {self.b})"


class Laplacian(Operator):
    order = 2

    def apply_monomial(self, expo, points):
        acc = np.zeros(points.shape[0])
        for a in range(len(expo)):
            acc += _mono_d2(expo, a, a, points)
        return acc

    def apply_rbf(self, rbf, diff):
        d = diff.shape[1]
        r = np.linalg.norm(diff, axis=1)
        return rbf.d2(r) + (d - 1) * rbf.d1_over_r(r)

    def __repr__(self):
        return "Laplacian()"


class Directional(Operator):
    """First derivative along a fixed vector: (v . grad)."""

    order = 1

    def __init__(self, vector):
        self.vector = np.atleast_1d(np.asarray(vector, dtype=float))

    def apply_monomial(self, expo, points):
        acc = np.zeros(points.shape[0])
        for a, v in enumerate(self.vector):
            if v:
                acc += v * _mono_d1(expo, a, points)
        return acc

    def apply_rbf(self, rbf, diff):
        r = np.linalg.norm(diff, axis=1)
        out = np.zeros(r.shape[0])
        nz = r > 0
        out[nz] = rbf.d1_over_r(r[nz]) * (diff[nz] @ self.vector)
        return out

    def __repr__(self):
        return f"Directional({self.vector.tolist()})"


class ScaledOperator(Operator):
    def __init__(self, coeff: float, inner: Operator):
        self.coeff = float(coeff)
        self.inner = inner

    @property
    def order(self):
        return self.inner.order

    def terms(self):
        return [(self.coeff * c, op) for c, op in self.inner.terms()]

    def apply_monomial(self, expo, points):
        return self.coeff * self.inner.apply_monomial(expo, points)

    def apply_rbf(self, rbf, diff):
        return self.coeff * self.inner.apply_rbf(rbf, diff)

    def __mul__(self, c):
        return ScaledOperator(self.coeff * float(c), self.inner)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{self.coeff} * {self.inner!r}"


class OperatorSum(Operator):
    def __init__(self, parts):
        flat = []
        for p in parts:
            if isinstance(p, OperatorSum):
                flat.extend(p.parts)
            else:
                flat.append(p)
        self.parts = flat

    @property
    def order(self):
        return max(p.order for p in self.parts)

    def terms(self):
        out = []
        for p in self.parts:
            out.extend(p.terms())
        return out

    def apply_monomial(self, expo, points):
        acc = self.parts[0].apply_monomial(expo, points)
        for p in self.parts[1:]:
            acc = acc + p.apply_monomial(expo, points)
        return acc

    def apply_rbf(self, rbf, diff):
        acc = self.parts[0].apply_rbf(rbf, diff)
        for p in self.parts[1:]:
            acc = acc + p.apply_rbf(rbf, diff)
        return acc

    def __repr__(self):
        return " + ".join(repr(p) for p in self.parts)
