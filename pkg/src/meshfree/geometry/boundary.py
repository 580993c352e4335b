"""Boundary discretization, ghost nodes, and gridded node sets."""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError
from .nodeset import NodeSet
from .shapes import SURF, Shape
from .spacing import as_spacing


def discretize_boundary(shape: Shape, h, seed: int = 0) -> NodeSet:
    """Place nodes with outward unit normals on the boundary of ``shape``.

    Each primitive in the shape tree generates candidates on its own
    surface with local spacing ``h(p)``; candidates swallowed by the
    constructive geometry (inside a union sibling, outside the remaining
    material of a difference) are dropped.  Candidates from different
    primitives that coincide are merged with averaged normals.

    Deterministic for a given ``(shape, h, seed)``.
    """
    rng = np.random.default_rng(seed)
    pts, nrm, tags = shape.boundary_candidates(as_spacing(h), rng)
    if pts.shape[0] == 0:
        raise GeometryError("shape produced no boundary candidates")

    diam = shape.diameter()
    keep = shape.classify(pts, tol=1e-9 * diam) == SURF
    pts, nrm, tags = pts[keep], nrm[keep], tags[keep]
    if pts.shape[0] == 0:
        raise GeometryError("boundary discretization is empty")

    pts, nrm, tags = _merge_coincident(pts, nrm, tags, tol=1e-7 * diam)

    norms = np.linalg.norm(nrm, axis=1)
    nrm = nrm / norms[:, None]
    return NodeSet(pts, tags, nrm)


def _merge_coincident(pts, nrm, tags, tol):
    """Collapse clusters of near-identical points (union seams).

    The lowest-index member keeps its position and tag; normals are
    averaged and renormalized unless they cancel, in which case the
    first normal wins.
    """
    from scipy.spatial import cKDTree

    pairs = cKDTree(pts).query_pairs(r=tol, output_type="ndarray")
    if pairs.shape[0] == 0:
        return pts, nrm, tags

    parent = np.arange(pts.shape[0])

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    roots = np.array([find(i) for i in range(pts.shape[0])])
    keep_idx = np.unique(roots)
    merged_nrm = nrm.copy()
    for r in keep_idx[np.bincount(roots)[keep_idx] > 1]:
        members = np.flatnonzero(roots == r)
        avg = nrm[members].mean(axis=0)
        if np.linalg.norm(avg) > 1e-8:
            merged_nrm[r] = avg
    return pts[keep_idx], merged_nrm[keep_idx], tags[keep_idx]


def add_ghost_nodes(nodes: NodeSet, h, tag: int = 0, which="boundary"):
    """Append one ghost node outside the domain per selected boundary node.

    A ghost sits exactly at ``p + h(p) * n(p)``.  Ghosts carry the given
    ``tag`` (0 by default, so they join stencils but get no equation) and
    no normal.

    Returns ``(new_nodes, ghost_of)`` where ``ghost_of[i]`` is the ghost
    index for parent node ``i``, or -1 for nodes without a ghost.
    """
    h = as_spacing(h)
    idx = nodes.select(which)
    if np.any(nodes.types[idx] >= 0):
        raise GeometryError("ghost nodes require boundary parents with normals")
    p = nodes.positions[idx]
    ghosts = p + h(p)[:, None] * nodes.normals[idx]
    new = nodes.append(ghosts, np.full(idx.shape[0], tag, dtype=np.int64))
    ghost_of = np.full(len(new), -1, dtype=np.int64)
    ghost_of[idx] = len(nodes) + np.arange(idx.shape[0])
    return new, ghost_of


def grid_nodes(lo, hi, spacing: float, interior_tag: int = 1, boundary_tag: int = -1) -> NodeSet:
    """Uniform tensor grid over a box, faces tagged as boundary.

    Node count per axis is ``round(L / spacing) + 1``, so ``spacing``
    should divide the box size for an exact match.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    d = lo.shape[0]
    axes = []
    for a in range(d):
        k = int(round((hi[a] - lo[a]) / spacing))
        if k < 1:
            raise GeometryError("grid spacing exceeds box size")
        axes.append(np.linspace(lo[a], hi[a], k + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    on_face = np.zeros(pts.shape[0], dtype=bool)
    for a in range(d):
        on_face |= (pts[:, a] == axes[a][0]) | (pts[:, a] == axes[a][-1])
    types = np.where(on_face, boundary_tag, interior_tag).astype(np.int64)
    return NodeSet(pts, types)
