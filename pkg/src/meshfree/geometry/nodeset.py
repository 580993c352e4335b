"""Node container: positions, type tags, boundary normals, stencils.

Type tags classify nodes: positive for interior, negative for boundary,
zero for auxiliary nodes (ghosts) that take part in stencils but carry
no equation of their own.  Boundary nodes store an outward unit normal;
other rows of the normal array are NaN.

Node selectors used throughout the package:

* ``None`` or ``"all"``: every node,
* ``"interior"`` / ``"boundary"``: by tag sign,
* ``int``: nodes with exactly that tag,
* list or tuple of ints: nodes with any of those tags,
* boolean array of length N: mask,
* integer ``ndarray``: explicit node indices, kept in the given order.
"""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError, StencilError


class NodeSet:
    def __init__(self, positions, types, normals=None, stencils=None):
        self.positions = np.ascontiguousarray(positions, dtype=float)
        if self.positions.ndim != 2:
            raise GeometryError("positions must be an (N, d) array")
        n, d = self.positions.shape
        self.types = np.asarray(types, dtype=np.int64)
        if self.types.shape != (n,):
            raise GeometryError("types must be a length-N vector")
        if normals is None:
            normals = np.full((n, d), np.nan)
        self.normals = np.asarray(normals, dtype=float)
        if self.normals.shape != (n, d):
            raise GeometryError("normals must be an (N, d) array")
        self.stencils: list = list(stencils) if stencils is not None else [None] * n
        if len(self.stencils) != n:
            raise GeometryError("stencil list length must match node count")

    # -- basic queries ---------------------------------------------------

    def __len__(self):
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def interior_indices(self):
        return np.flatnonzero(self.types > 0)

    def boundary_indices(self):
        return np.flatnonzero(self.types < 0)

    def select(self, which):
        """Resolve a node selector (see module docstring) to index array."""
        n = len(self)
        if which is None or (isinstance(which, str) and which == "all"):
            return np.arange(n)
        if isinstance(which, str):
            if which == "interior":
                return self.interior_indices()
            if which == "boundary":
                return self.boundary_indices()
            raise GeometryError(f"unknown node selector {which!r}")
        if isinstance(which, (int, np.integer)):
            return np.flatnonzero(self.types == which)
        if isinstance(which, (list, tuple, set, frozenset)):
            mask = np.isin(self.types, list(which))
            return np.flatnonzero(mask)
        arr = np.asarray(which)
        if arr.dtype == bool:
            if arr.shape != (n,):
                raise GeometryError("boolean selector must have length N")
            return np.flatnonzero(arr)
        if np.issubdtype(arr.dtype, np.integer):
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise GeometryError("index selector out of range")
            return arr.astype(np.int64)
        raise GeometryError(f"cannot interpret node selector {which!r}")

    def normal(self, i: int):
        if self.types[i] >= 0:
            raise GeometryError(f"node {i} is not a boundary node")
        return self.normals[i]

    def stencil(self, i: int):
        s = self.stencils[i]
        if s is None:
            raise StencilError(f"node {i} has no stencil")
        return s

    def has_stencil(self, i: int) -> bool:
        return self.stencils[i] is not None

    # -- derived forms -----------------------------------------------------

    def stencil_matrix(self, indices=None):
        """Stack stencils of the given nodes into an (M, n) matrix.

        Requires every requested stencil to exist and share one size.
        """
        idx = self.select(indices)
        rows = []
        for i in idx:
            s = self.stencils[i]
            if s is None:
                raise StencilError(f"node {i} has no stencil")
            rows.append(s)
        if not rows:
            return np.empty((0, 0), dtype=np.int64)
        sizes = {r.shape[0] for r in rows}
        if len(sizes) != 1:
            raise StencilError(f"stencil sizes differ: {sorted(sizes)}")
        return np.vstack(rows).astype(np.int64)

    def append(self, positions, types, normals=None):
        """New NodeSet with extra nodes appended; existing stencils kept."""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        m = positions.shape[0]
        types = np.broadcast_to(np.asarray(types, dtype=np.int64), (m,))
        if normals is None:
            normals = np.full((m, self.dim), np.nan)
        return NodeSet(
            np.concatenate([self.positions, positions], axis=0),
            np.concatenate([self.types, types]),
            np.concatenate([self.normals, normals], axis=0),
            self.stencils + [None] * m,
        )

    def with_stencils(self, indices, stencils):
        """New NodeSet where nodes ``indices[k]`` get ``stencils[k]``."""
        new = list(self.stencils)
        for i, s in zip(indices, stencils):
            new[int(i)] = np.asarray(s, dtype=np.int64)
        return NodeSet(self.positions, self.types, self.normals, new)

    def __repr__(self):
        nb = len(self.boundary_indices())
        ni = len(self.interior_indices())
        return (
            f"NodeSet(N={len(self)}, d={self.dim}, interior={ni}, "
            f"boundary={nb}, other={len(self) - ni - nb})"
        )
