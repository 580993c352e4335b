"""Batched polyharmonic RBF weight computation.

The per-node local systems of augmented polyharmonic collocation are
independent, so the batch is embarrassingly parallel.  The numba kernel
solves one multi-right-hand-side system per node inside a parallel
loop; the numpy fallback does the same in vectorized chunks.  Both
consume identical inputs and produce weights for all requested operator
families in one pass over the nodes.

Family encoding shared by both backends: per family a ``kind`` code
(0 identity, 1 first derivative, 2 second derivative, 3 laplacian), two
axis fields, the derivative order, and the precomputed monomial
right-hand-side block evaluated at the origin.
"""

from __future__ import annotations

import numpy as np

from .config import HAS_NUMBA

KIND_IDENTITY = 0
KIND_D1 = 1
KIND_D2 = 2
KIND_LAPLACIAN = 3

SCALE_NONE = 0
SCALE_NEAREST = 1
SCALE_SUPPORT = 2


def _phs_parts(r, k, even):
    """Radial value, phi'(r)/r and phi''(r) for r^k kernels (k >= 3)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if not even:
            val = r**k
            d1r = k * r ** (k - 2.0)
            d2v = k * (k - 1.0) * r ** (k - 2.0)
        else:
            safe = np.where(r > 0, r, 1.0)
            lg = np.log(safe)
            val = np.where(r > 0, safe**k * lg, 0.0)
            d1r = np.where(r > 0, safe ** (k - 2) * (k * lg + 1.0), 0.0)
            d2v = np.where(r > 0, safe ** (k - 2) * ((k * k - k) * lg + 2.0 * k - 1.0), 0.0)
    return val, d1r, d2v


def _batch_numpy(pts, rows, stencils, k, even, expos, base_bot,
                 kinds, ax_a, ax_b, orders, scale_code, chunk=512):
    m, n = stencils.shape
    n_f = kinds.shape[0]
    l = expos.shape[0]
    d = pts.shape[1]
    out = np.empty((m, n_f, n))
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        c = hi - lo
        st = stencils[lo:hi]
        centers = pts[rows[lo:hi]]
        local = pts[st] - centers[:, None, :]

        dist = np.linalg.norm(local, axis=2)
        if scale_code == SCALE_NONE:
            s = np.ones(c)
        elif scale_code == SCALE_NEAREST:
            s = np.min(np.where(dist > 0, dist, np.inf), axis=1)
        else:
            s = np.max(dist, axis=1)
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            bad = int(rows[lo + int(np.argmin(np.isfinite(s) & (s > 0)))])
            raise _ScaleDegenerate(bad)
        local = local / s[:, None, None]

        pair = local[:, :, None, :] - local[:, None, :, :]
        r_pair = np.sqrt(np.einsum("cijd,cijd->cij", pair, pair))
        a_val, _, _ = _phs_parts(r_pair, k, even)

        size = n + l
        sys_mat = np.zeros((c, size, size))
        sys_mat[:, :n, :n] = a_val
        if l:
            q = np.ones((c, n, l))
            for j, e in enumerate(expos):
                for a in range(d):
                    if e[a]:
                        q[:, :, j] *= local[:, :, a] ** e[a]
            sys_mat[:, :n, n:] = q
            sys_mat[:, n:, :n] = np.transpose(q, (0, 2, 1))

        r0 = np.sqrt(np.einsum("cjd,cjd->cj", local, local))
        v0, d1r0, d2v0 = _phs_parts(r0, k, even)
        rhs = np.zeros((c, size, n_f))
        for f in range(n_f):
            kind = kinds[f]
            if kind == KIND_IDENTITY:
                top = v0
            elif kind == KIND_D1:
                top = d1r0 * (-local[:, :, ax_a[f]])
            elif kind == KIND_D2:
                with np.errstate(invalid="ignore", divide="ignore"):
                    ee = np.where(
                        r0 > 0,
                        local[:, :, ax_a[f]] * local[:, :, ax_b[f]]
                        / np.where(r0 > 0, r0 * r0, 1.0),
                        0.0,
                    )
                top = d2v0 * ee + d1r0 * ((1.0 if ax_a[f] == ax_b[f] else 0.0) - ee)
            else:
                top = d2v0 + (d - 1) * d1r0
            fac = s ** (-float(orders[f]))
            rhs[:, :n, f] = top * fac[:, None]
            if l:
                rhs[:, n:, f] = base_bot[f][None, :] * fac[:, None]

        try:
            sol = np.linalg.solve(sys_mat, rhs)
        except np.linalg.LinAlgError:
            # find the offender for a useful error message
            for j in range(c):
                try:
                    np.linalg.solve(sys_mat[j], rhs[j])
                except np.linalg.LinAlgError:
                    raise _SolveDegenerate(int(rows[lo + j])) from None
            raise
        out[lo:hi] = np.transpose(sol[:, :n, :], (0, 2, 1))
    return out, -1


class _ScaleDegenerate(Exception):
    def __init__(self, node):
        self.node = node


class _SolveDegenerate(Exception):
    def __init__(self, node):
        self.node = node


if HAS_NUMBA:
    from numba import njit, prange

    @njit(cache=True)
    def _solve_multi(a, b):
        """Row-pivoted elimination, solution left in ``b``; False if singular.

        Exception-free so the caller's parallel loop stays parallel.
        """
        nsz = a.shape[0]
        n_rhs = b.shape[1]
        for col in range(nsz):
            piv = col
            big = abs(a[col, col])
            for r in range(col + 1, nsz):
                v = abs(a[r, col])
                if v > big:
                    big = v
                    piv = r
            if big == 0.0 or not np.isfinite(big):
                return False
            if piv != col:
                for cc in range(col, nsz):
                    tmp = a[col, cc]
                    a[col, cc] = a[piv, cc]
                    a[piv, cc] = tmp
                for cc in range(n_rhs):
                    tmp = b[col, cc]
                    b[col, cc] = b[piv, cc]
                    b[piv, cc] = tmp
            inv = 1.0 / a[col, col]
            for r in range(col + 1, nsz):
                fac = a[r, col] * inv
                if fac != 0.0:
                    for cc in range(col + 1, nsz):
                        a[r, cc] -= fac * a[col, cc]
                    for cc in range(n_rhs):
                        b[r, cc] -= fac * b[col, cc]
        for col in range(nsz - 1, -1, -1):
            inv = 1.0 / a[col, col]
            for cc in range(n_rhs):
                acc = b[col, cc]
                for r in range(col + 1, nsz):
                    acc -= a[col, r] * b[r, cc]
                b[col, cc] = acc * inv
        return True

    @njit(parallel=True, cache=True)
    def _batch_numba(pts, rows, stencils, k, even, expos, base_bot,
                     kinds, ax_a, ax_b, orders, scale_code):
        m, n = stencils.shape
        n_f = kinds.shape[0]
        l = expos.shape[0]
        d = pts.shape[1]
        size = n + l
        out = np.empty((m, n_f, n))
        fail = np.zeros(m, dtype=np.int8)
        for idx in prange(m):
            status = 0
            center = pts[rows[idx]]
            local = np.empty((n, d))
            for j in range(n):
                for a in range(d):
                    local[j, a] = pts[stencils[idx, j], a] - center[a]

            s = 1.0
            if scale_code != 0:
                best = -1.0
                for j in range(n):
                    r2 = 0.0
                    for a in range(d):
                        r2 += local[j, a] * local[j, a]
                    r = np.sqrt(r2)
                    if scale_code == 1:
                        if r > 0.0 and (best < 0.0 or r < best):
                            best = r
                    else:
                        if r > best:
                            best = r
                if best <= 0.0:
                    status = 2
                else:
                    s = best

            if status == 0:
                for j in range(n):
                    for a in range(d):
                        local[j, a] /= s

                sys_mat = np.zeros((size, size))
                for i in range(n):
                    for j in range(n):
                        r2 = 0.0
                        for a in range(d):
                            diff = local[i, a] - local[j, a]
                            r2 += diff * diff
                        r = np.sqrt(r2)
                        if even:
                            sys_mat[i, j] = r**k * np.log(r) if r > 0.0 else 0.0
                        else:
                            sys_mat[i, j] = r ** float(k)
                for j in range(l):
                    for i in range(n):
                        q = 1.0
                        for a in range(d):
                            if expos[j, a]:
                                q *= local[i, a] ** expos[j, a]
                        sys_mat[i, n + j] = q
                        sys_mat[n + j, i] = q

                rhs = np.zeros((size, n_f))
                for j in range(n):
                    r2 = 0.0
                    for a in range(d):
                        r2 += local[j, a] * local[j, a]
                    r = np.sqrt(r2)
                    if r > 0.0:
                        if even:
                            lg = np.log(r)
                            val = r**k * lg
                            d1r = r ** (k - 2.0) * (k * lg + 1.0)
                            d2v = r ** (k - 2.0) * ((k * k - k) * lg + 2.0 * k - 1.0)
                        else:
                            val = r ** float(k)
                            d1r = k * r ** (k - 2.0)
                            d2v = k * (k - 1.0) * r ** (k - 2.0)
                    else:
                        val = 0.0
                        d1r = 0.0
                        d2v = 0.0
                    for f in range(n_f):
                        kind = kinds[f]
                        if kind == 0:
                            top = val
                        elif kind == 1:
                            top = d1r * (-local[j, ax_a[f]])
                        elif kind == 2:
                            if r > 0.0:
                                ee = local[j, ax_a[f]] * local[j, ax_b[f]] / r2
                            else:
                                ee = 0.0
                            delta = 1.0 if ax_a[f] == ax_b[f] else 0.0
                            top = d2v * ee + d1r * (delta - ee)
                        else:
                            top = d2v + (d - 1) * d1r
                        rhs[j, f] = top
                for f in range(n_f):
                    fac = s ** (-float(orders[f]))
                    for j in range(n):
                        rhs[j, f] *= fac
                    for j in range(l):
                        rhs[n + j, f] = base_bot[f, j] * fac

                if _solve_multi(sys_mat, rhs):
                    for f in range(n_f):
                        for j in range(n):
                            v = rhs[j, f]
                            if not np.isfinite(v):
                                status = 1
                            out[idx, f, j] = v
                else:
                    status = 1
            fail[idx] = status
        return out, fail


def batch_phs_weights(pts, rows, stencils, k, even, expos, base_bot,
                      kinds, ax_a, ax_b, orders, scale_code):
    """Run the active backend; returns (m, n_families, n) weights.

    Raises ``_SolveDegenerate`` / ``_ScaleDegenerate`` carrying the node
    index on failure so the caller can build a proper error.
    """
    if HAS_NUMBA:
        out, fail = _batch_numba(pts, rows, stencils, k, even, expos, base_bot,
                                 kinds, ax_a, ax_b, orders, scale_code)
        bad = np.flatnonzero(fail)
        if bad.size:
            node = int(rows[bad[0]])
            if fail[bad[0]] == 2:
                raise _ScaleDegenerate(node)
            raise _SolveDegenerate(node)
        return out
    out, _ = _batch_numpy(pts, rows, stencils, k, even, expos, base_bot,
                          kinds, ax_a, ax_b, orders, scale_code)
    return out
