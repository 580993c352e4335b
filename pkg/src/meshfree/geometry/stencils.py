"""Nearest-neighbor stencil selection.

Stencils are index lists into the node set.  For each target node the
``n`` closest nodes of the search pool are chosen; the node itself comes
first when it belongs to the pool, and remaining members are ordered by
increasing distance with exact-distance ties broken by ascending node
index, so the selection is reproducible across runs and platforms.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import StencilError
from .nodeset import NodeSet


def find_closest_stencils(nodes: NodeSet, n: int, for_which=None, search_among=None) -> NodeSet:
    """Attach n-nearest-neighbor stencils to the selected nodes.

    ``for_which`` selects the nodes that receive stencils, and
    ``search_among`` the pool stencil members are drawn from (selector
    syntax as in :class:`NodeSet`).  Returns a new NodeSet.
    """
    targets = nodes.select(for_which)
    pool = nodes.select(search_among)
    if n < 1:
        raise StencilError(f"stencil size must be at least 1, got {n}")
    if n > pool.shape[0]:
        raise StencilError(
            f"stencil size {n} exceeds search pool of {pool.shape[0]} nodes"
        )
    if targets.shape[0] == 0:
        return nodes

    pool_pts = nodes.positions[pool]
    tree = cKDTree(pool_pts)
    # query a few extra neighbors so equal-distance groups at the cut are
    # usually captured in full and can be resolved by index without a requery
    k = min(n + 8, pool.shape[0])
    _, loc = tree.query(nodes.positions[targets], k=k)
    if loc.ndim == 1:
        loc = loc[:, None]

    pos_t = nodes.positions[targets]
    cand = pool[loc]
    diff = nodes.positions[cand] - pos_t[:, None, :]
    d2 = np.einsum("tkd,tkd->tk", diff, diff)

    # sort each row by index first, then stably by distance: exact ties
    # end up ordered by ascending node index
    io = np.argsort(cand, axis=1)
    cand = np.take_along_axis(cand, io, axis=1)
    d2 = np.take_along_axis(d2, io, axis=1)
    so = np.argsort(d2, axis=1, kind="stable")
    cand = np.take_along_axis(cand, so, axis=1)
    d2 = np.take_along_axis(d2, so, axis=1)
    chosen = cand[:, :n].copy()

    if k > n:
        edge = d2[:, n - 1]
        straddle = np.abs(d2[:, -1] - edge) <= 1e-18 + 1e-12 * edge
    else:
        straddle = np.zeros(targets.shape[0], dtype=bool)

    for t_row in np.flatnonzero(straddle):
        # the tie group at the cut may extend past the window: gather the
        # complete group with a radius query and redo the exact ordering
        p = pos_t[t_row]
        r = np.sqrt(d2[t_row, n - 1]) * (1.0 + 1e-9) + 1e-300
        ball = pool[tree.query_ball_point(p, r)]
        bd2 = np.sum((nodes.positions[ball] - p) ** 2, axis=1)
        order = np.lexsort((ball, bd2))
        chosen[t_row] = ball[order[:n]]

    in_pool = np.zeros(len(nodes), dtype=bool)
    in_pool[pool] = True
    fix = np.flatnonzero(in_pool[targets] & (chosen[:, 0] != targets))
    for t_row in fix:
        t = targets[t_row]
        row = chosen[t_row]
        hit = np.flatnonzero(row == t)
        if hit.size:
            j = hit[0]
            row[1 : j + 1] = row[:j].copy()
        else:
            # only possible when >= n pool nodes share the target's
            # position; drop the last member to make room
            row[1:] = row[:-1].copy()
        row[0] = t

    return nodes.with_stencils(targets, [row.astype(np.int64) for row in chosen])
