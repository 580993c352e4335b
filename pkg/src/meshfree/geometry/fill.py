"""Interior node placement by candidate-queue expansion.

Every queued node spawns a ring of candidates at distance ``h(p)``;
candidates inside the shape and no closer than ``gamma * min(h_c, h_q)``
to any already-accepted node are appended and queued themselves.  The
queue starts with the nodes already present (typically the boundary
discretization), so interior spacing blends into the boundary spacing.

Nodes are processed strictly first-in first-out and candidates are
tested in generation order, which makes the result a pure function of
``(shape, h, seed)`` regardless of backend or thread count.

The distance-acceptance loop is the hot spot; it runs compiled when
numba is enabled and falls back to an equivalent python loop otherwise.
Both walk candidates in the same order and do arithmetic in the same
sequence, so they accept identical node sets.
"""

from __future__ import annotations

import numpy as np

from ..config import HAS_NUMBA
from ..errors import GeometryError
from .nodeset import NodeSet
from .shapes import Shape
from .spacing import as_spacing

# flattened integer cell keys: shift each coordinate by _KEY_OFF and pack
# base-_KEY_BASE, which is collision-free while |cell index| < 2**20
_KEY_BASE = np.int64(1) << 21
_KEY_OFF = np.int64(1) << 20

if HAS_NUMBA:
    import numba
    from numba import njit
    from numba.typed import Dict as NumbaDict

    @njit(cache=True)
    def _accept_batch_numba(pos, hv, count, nxt, head, cand, hc, gamma, cell, cap):
        """Sequential accept pass; returns (new_count, next_unprocessed)."""
        d = pos.shape[1]
        for c in range(cand.shape[0]):
            if count >= cap:
                return count, c
            limit_r = gamma * hc[c]
            reach = int(np.ceil(limit_r / cell))
            ok = True
            if d == 2:
                ix = np.int64(np.floor(cand[c, 0] / cell))
                iy = np.int64(np.floor(cand[c, 1] / cell))
                for ax in range(ix - reach, ix + reach + 1):
                    for ay in range(iy - reach, iy + reach + 1):
                        key = (ax + _KEY_OFF) * _KEY_BASE + (ay + _KEY_OFF)
                        j = head[key] if key in head else np.int64(-1)
                        while j >= 0:
                            dx = pos[j, 0] - cand[c, 0]
                            dy = pos[j, 1] - cand[c, 1]
                            dist2 = dx * dx + dy * dy
                            lim = gamma * min(hc[c], hv[j])
                            if dist2 < lim * lim:
                                ok = False
                                break
                            j = nxt[j]
                        if not ok:
                            break
                    if not ok:
                        break
                if ok:
                    pos[count, 0] = cand[c, 0]
                    pos[count, 1] = cand[c, 1]
                    hv[count] = hc[c]
                    key = (ix + _KEY_OFF) * _KEY_BASE + (iy + _KEY_OFF)
                    nxt[count] = head[key] if key in head else np.int64(-1)
                    head[key] = np.int64(count)
                    count += 1
            else:
                ix = np.int64(np.floor(cand[c, 0] / cell))
                iy = np.int64(np.floor(cand[c, 1] / cell)) if d > 1 else np.int64(0)
                iz = np.int64(np.floor(cand[c, 2] / cell)) if d > 2 else np.int64(0)
                for ax in range(ix - reach, ix + reach + 1):
                    for ay in range(iy - reach, iy + reach + 1):
                        for az in range(iz - reach, iz + reach + 1):
                            key = ((ax + _KEY_OFF) * _KEY_BASE + (ay + _KEY_OFF)) * _KEY_BASE + (az + _KEY_OFF)
                            j = head[key] if key in head else np.int64(-1)
                            while j >= 0:
                                dist2 = 0.0
                                for a in range(d):
                                    diff = pos[j, a] - cand[c, a]
                                    dist2 += diff * diff
                                lim = gamma * min(hc[c], hv[j])
                                if dist2 < lim * lim:
                                    ok = False
                                    break
                                j = nxt[j]
                            if not ok:
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if ok:
                    for a in range(d):
                        pos[count, a] = cand[c, a]
                    hv[count] = hc[c]
                    key = ((ix + _KEY_OFF) * _KEY_BASE + (iy + _KEY_OFF)) * _KEY_BASE + (iz + _KEY_OFF)
                    nxt[count] = head[key] if key in head else np.int64(-1)
                    head[key] = np.int64(count)
                    count += 1
        return count, cand.shape[0]

    def _make_grid():
        return NumbaDict.empty(key_type=numba.int64, value_type=numba.int64)

else:

    def _make_grid():
        return {}


def _cell_key(coords, d):
    if d == 2:
        return (coords[0] + _KEY_OFF) * _KEY_BASE + (coords[1] + _KEY_OFF)
    key = np.int64(0)
    cc = [coords[a] if a < d else np.int64(0) for a in range(3)]
    return ((cc[0] + _KEY_OFF) * _KEY_BASE + (cc[1] + _KEY_OFF)) * _KEY_BASE + (cc[2] + _KEY_OFF)


def _accept_batch_python(pos, hv, count, nxt, head, cand, hc, gamma, cell, cap):
    """Python twin of the compiled accept pass, same candidate order."""
    d = pos.shape[1]
    for c in range(cand.shape[0]):
        if count >= cap:
            return count, c
        limit_r = gamma * hc[c]
        reach = int(np.ceil(limit_r / cell))
        base = np.floor(cand[c] / cell).astype(np.int64)
        ok = True
        for off in np.ndindex(*([2 * reach + 1] * d)):
            coords = base + np.asarray(off, dtype=np.int64) - reach
            j = head.get(_cell_key(coords, d), -1)
            while j >= 0:
                dist2 = 0.0
                for a in range(d):
                    diff = pos[j, a] - cand[c, a]
                    dist2 += diff * diff
                lim = gamma * min(hc[c], hv[j])
                if dist2 < lim * lim:
                    ok = False
                    break
                j = nxt[j]
            if not ok:
                break
        if ok:
            pos[count] = cand[c]
            hv[count] = hc[c]
            key = _cell_key(base, d)
            nxt[count] = head.get(key, -1)
            head[key] = count
            count += 1
    return count, cand.shape[0]


def _insert_existing(pos, hv, count, nxt, head, cell):
    d = pos.shape[1]
    for i in range(count):
        coords = np.floor(pos[i, :d] / cell).astype(np.int64)
        key = _cell_key(coords, d)
        if HAS_NUMBA:
            key = np.int64(key)
        nxt[i] = head.get(key, -1)
        head[key] = i


def _estimate_h_range(shape, h, seeds):
    lo, hi = shape.bounding_box()
    d = lo.shape[0]
    axes = [np.linspace(lo[a], hi[a], 9) for a in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    probes = np.stack([m.ravel() for m in mesh], axis=1)
    inside = shape.contains(probes)
    pts = probes[inside]
    if seeds.shape[0]:
        pts = np.concatenate([pts, seeds], axis=0) if pts.shape[0] else seeds
    if pts.shape[0] == 0:
        pts = 0.5 * (lo + hi)[None, :]
    vals = h(pts)
    return float(np.min(vals)), float(np.max(vals))


def _candidate_directions(rng, m, k, d):
    """(m, k, d) unit vectors, uniform on the sphere."""
    if d == 1:
        return np.where(rng.random((m, k, 1)) < 0.5, -1.0, 1.0)
    if d == 2:
        theta = 2.0 * np.pi * rng.random((m, k))
        return np.stack([np.cos(theta), np.sin(theta)], axis=2)
    g = rng.standard_normal((m, k, d))
    norms = np.linalg.norm(g, axis=2, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms


def fill_interior(
    nodes: NodeSet,
    shape: Shape,
    h,
    seed: int = 0,
    *,
    interior_tag: int = 1,
    gamma: float = 0.75,
    n_candidates: int = 15,
    start=None,
    max_nodes: int = 4_000_000,
) -> NodeSet:
    """Fill the interior of ``shape`` with nodes spaced by ``h``.

    All nodes already in ``nodes`` act as queue seeds and as blockers for
    the minimum-distance test; fill after discretizing the boundary and
    before adding ghost nodes.  ``start`` supplies one or more interior
    seed points when ``nodes`` is empty.

    Returns a new NodeSet with accepted interior nodes appended, tagged
    ``interior_tag``.
    """
    h = as_spacing(h)
    d = shape.dim
    if len(nodes) and nodes.dim != d:
        raise GeometryError("node set and shape dimensions differ")
    if gamma <= 0 or gamma >= 1.5:
        raise GeometryError(f"gamma out of range: {gamma}")

    seeds = nodes.positions
    extra = 0
    if start is not None:
        start = np.atleast_2d(np.asarray(start, dtype=float))
        if not np.all(shape.interior_contains(start)):
            raise GeometryError("start points must lie strictly inside the shape")
        seeds = np.concatenate([seeds, start], axis=0) if seeds.size else start
        extra = start.shape[0]
    n_seed = seeds.shape[0]
    if n_seed == 0:
        raise GeometryError("fill needs seed nodes: a boundary discretization or start points")

    h_min, h_max = _estimate_h_range(shape, h, seeds)
    cell = gamma * h_max * 1.0001

    cap = n_seed + 1024
    lo, hi = shape.bounding_box()
    vol = float(np.prod(hi - lo))
    est = int(vol / max(h_min, 1e-300) ** d * 3.0) + n_seed + 1024
    cap = min(max(cap, est), max_nodes)

    pos = np.empty((cap, d))
    hv = np.empty(cap)
    nxt = np.full(cap, -1, dtype=np.int64)
    pos[:n_seed] = seeds
    hv[:n_seed] = h(seeds)
    head = _make_grid()
    count = n_seed
    _insert_existing(pos, hv, count, nxt, head, cell)

    accept = _accept_batch_numba if HAS_NUMBA else _accept_batch_python
    rng = np.random.default_rng(seed)
    proc = 0
    while proc < count:
        m = count - proc
        parents = pos[proc:count]
        radii = hv[proc:count]
        dirs = _candidate_directions(rng, m, n_candidates, d)
        cand = (parents[:, None, :] + radii[:, None, None] * dirs).reshape(-1, d)
        inside = shape.interior_contains(cand)
        cand = np.ascontiguousarray(cand[inside])
        proc = count
        if cand.shape[0] == 0:
            continue
        hc = np.ascontiguousarray(h(cand), dtype=float)
        done = 0
        while done < cand.shape[0]:
            count, step = accept(
                pos, hv, count, nxt, head, cand[done:], hc[done:], gamma, cell, cap
            )
            done += step
            if done < cand.shape[0]:
                if cap >= max_nodes:
                    raise GeometryError(
                        f"fill exceeded max_nodes={max_nodes}; spacing too small for the shape"
                    )
                new_cap = min(cap * 2, max_nodes)
                pos = np.concatenate([pos, np.empty((new_cap - cap, d))], axis=0)
                hv = np.concatenate([hv, np.empty(new_cap - cap)])
                nxt = np.concatenate([nxt, np.full(new_cap - cap, -1, dtype=np.int64)])
                cap = new_cap

    new_pts = pos[n_seed:count]
    if extra:
        new_pts = np.concatenate([seeds[n_seed - extra:], new_pts], axis=0)
    return nodes.append(new_pts, interior_tag) if new_pts.shape[0] else nodes
