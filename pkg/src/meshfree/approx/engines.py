"""Stencil weight engines.

An engine turns (stencil points, center, operator) into a weight vector
``w`` such that ``(L u)(center) ~= w . u[stencil]``.  Two routes:

* :class:`WeightedLeastSquares` fits a monomial model through weighted
  least squares and differentiates the model.  With as many basis
  functions as nodes it reduces to collocation.

* :class:`RbfFd` collocates a radial basis expansion augmented with
  monomials, enforcing polynomial exactness exactly through Lagrange
  multipliers.

Both engines shift the stencil to its center and rescale it before
forming any matrix, then undo the scaling on the weights through the
chain rule, one elementary operator term at a time.  ``scale`` picks the
characteristic length: ``"nearest"`` (distance to the closest other
node), ``"support"`` (distance to the farthest), or ``"none"``.

The dense local systems are solved by ``solver``: ``"qr"`` (rank
revealing, minimum-norm for underdetermined fits, the robust default),
``"lu"`` (square systems only, fastest), or ``"svd"`` (explicit
truncation of singular values below 1e-13 of the largest).
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from ..errors import ConfigError, NumericalError
from .basis import MonomialBasis, monomial_count
from .weights import ConstantWeight

SVD_RELATIVE_CUTOFF = 1e-13


def _scale_factor(points, center, mode):
    if mode == "none":
        return 1.0
    dists = np.linalg.norm(points - center, axis=1)
    if mode == "nearest":
        positive = dists[dists > 0]
        if positive.size == 0:
            raise NumericalError("all stencil nodes coincide with the center")
        return float(np.min(positive))
    if mode == "support":
        s = float(np.max(dists))
        if s == 0:
            raise NumericalError("all stencil nodes coincide with the center")
        return s
    raise ConfigError(f"unknown scale rule {mode!r}; use none, nearest or support")


def _solve_dense(matrix, rhs, solver):
    """Solve matrix @ y = rhs by the requested dense route."""
    if solver == "lu":
        if matrix.shape[0] != matrix.shape[1]:
            raise NumericalError(
                f"lu needs a square local system, got {matrix.shape}; use qr or svd"
            )
        # plain partial-pivot factorization, no singularity test: severely
        # ill-conditioned bases (flat Gaussians) must still yield weights,
        # reproducing their characteristic error floors; callers check
        # finiteness of the result instead
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu_piv = scipy.linalg.lu_factor(matrix, check_finite=False)
            with np.errstate(all="ignore"):
                return scipy.linalg.lu_solve(lu_piv, rhs, check_finite=False)
    if solver == "qr":
        sol, _, _, _ = scipy.linalg.lstsq(matrix, rhs, lapack_driver="gelsy")
        return sol
    if solver == "svd":
        u, s, vt = np.linalg.svd(matrix, full_matrices=False)
        cutoff = SVD_RELATIVE_CUTOFF * (s[0] if s.size else 0.0)
        inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
        return vt.T @ (inv * (u.T @ rhs))
    raise ConfigError(f"unknown dense solver {solver!r}; use lu, qr or svd")


def _combined_rhs(apply_term, op, scale):
    """Sum operator terms with per-term chain-rule factors scale^-order."""
    acc = None
    for coeff, elem in op.terms():
        part = coeff * scale ** (-elem.order) * apply_term(elem)
        acc = part if acc is None else acc + part
    return acc


class WeightedLeastSquares:
    """Weighted least squares fit over a monomial basis.

    ``basis`` is a :class:`MonomialBasis` (or an int degree, expanded to
    the full basis once the dimension is known at first use).
    """

    def __init__(self, basis, weight=None, scale="nearest", solver="qr"):
        self.basis = basis
        self.weight = weight if weight is not None else ConstantWeight()
        self.scale = scale
        self.solver = solver

    def _resolve_basis(self, dim):
        if isinstance(self.basis, int):
            self.basis = MonomialBasis(dim, self.basis)
        if self.basis.dim != dim:
            raise ConfigError(
                f"basis dimension {self.basis.dim} does not match points ({dim})"
            )
        return self.basis

    def weights(self, points, center, op):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        center = np.asarray(center, dtype=float)
        n, dim = points.shape
        basis = self._resolve_basis(dim)

        s = _scale_factor(points, center, self.scale)
        local = (points - center) / s
        b_mat = basis.eval(local)
        w_diag = np.asarray(self.weight(local), dtype=float)
        if np.any(w_diag <= 0):
            raise NumericalError("weight function must be positive on the stencil")

        rhs = _combined_rhs(
            lambda elem: basis.apply(elem, np.zeros((1, dim)))[0], op, s
        )
        y = _solve_dense((w_diag[:, None] * b_mat).T, rhs, self.solver)
        w = w_diag * y
        if not np.all(np.isfinite(w)):
            raise NumericalError(
                "least squares fit produced non-finite weights "
                "(singular local system); use the qr or svd solver"
            )
        return w

    def __repr__(self):
        return (
            f"WeightedLeastSquares({self.basis!r}, weight={self.weight!r}, "
            f"scale={self.scale!r}, solver={self.solver!r})"
        )


class RbfFd:
    """RBF collocation with optional monomial augmentation.

    ``degree`` is the highest augmented polynomial degree; -1 disables
    augmentation.  Requires at least as many stencil nodes as monomials.
    """

    def __init__(self, rbf, degree: int = 2, scale="nearest", solver="qr"):
        self.rbf = rbf
        self.degree = int(degree)
        self.scale = scale
        self.solver = solver

    def weights(self, points, center, op):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        center = np.asarray(center, dtype=float)
        n, dim = points.shape

        n_aug = monomial_count(self.degree, dim) if self.degree >= 0 else 0
        if n_aug > n:
            raise NumericalError(
                f"augmentation of degree {self.degree} needs at least {n_aug} "
                f"stencil nodes, got {n}"
            )

        s = _scale_factor(points, center, self.scale)
        local = (points - center) / s

        pair_diff = local[:, None, :] - local[None, :, :]
        a_mat = self.rbf.value(np.linalg.norm(pair_diff, axis=2))

        # (L phi(|x - p_j|)) at the center, which is the origin locally
        rhs_top = _combined_rhs(lambda elem: elem.apply_rbf(self.rbf, -local), op, s)

        if n_aug:
            basis = MonomialBasis(dim, self.degree)
            q_mat = basis.eval(local)
            sys_mat = np.zeros((n + n_aug, n + n_aug))
            sys_mat[:n, :n] = a_mat
            sys_mat[:n, n:] = q_mat
            sys_mat[n:, :n] = q_mat.T
            rhs_bot = _combined_rhs(
                lambda elem: basis.apply(elem, np.zeros((1, dim)))[0], op, s
            )
            rhs = np.concatenate([rhs_top, rhs_bot])
        else:
            sys_mat = a_mat
            rhs = rhs_top

        sol = _solve_dense(sys_mat, rhs, self.solver)
        w = sol[:n]
        if not np.all(np.isfinite(w)):
            raise NumericalError(
                "local collocation produced non-finite weights "
                "(degenerate stencil geometry?); try a larger stencil"
            )
        return w

    def __repr__(self):
        return (
            f"RbfFd({self.rbf!r}, degree={self.degree}, "
            f"scale={self.scale!r}, solver={self.solver!r})"
        )
