"""Geometric primitives and constructive solid geometry.

Shapes provide three services: membership classification of point
batches, an axis-aligned bounding box, and generation of boundary node
candidates with outward unit normals.  Composite shapes (union,
difference, rigid transforms) build all three from their children.

Membership is *closed*: a shape contains its boundary.  The difference
``A - B`` contains a point when ``A`` contains it and the open interior
of ``B`` does not, so shared boundary circles of an annulus stay inside.
"""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError
from .spacing import as_spacing

# classification codes
IN = 1
SURF = 0
OUT = -1

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class Shape:
    """Base class; subclasses set ``dim`` and implement the primitives."""

    dim: int
    tag: int = -1

    # -- membership ---------------------------------------------------

    def classify(self, points, tol: float = 0.0):
        """Classify points as IN (+1), SURF (0) or OUT (-1).

        ``tol`` widens the boundary band: points within ``tol`` of the
        surface report SURF.  With ``tol=0`` only exact surface points do.
        """
        raise NotImplementedError

    def contains(self, points):
        """Closed membership test, vectorized over an ``(M, d)`` batch."""
        return self.classify(self._batch(points)) != OUT

    def interior_contains(self, points):
        """Open membership test (strict interior)."""
        return self.classify(self._batch(points)) == IN

    def _batch(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        if points.shape[1] != self.dim:
            raise GeometryError(
                f"points have dimension {points.shape[1]}, shape has {self.dim}"
            )
        return points

    # -- extent --------------------------------------------------------

    def bounding_box(self):
        """Axis-aligned ``(lo, hi)`` pair enclosing the shape."""
        raise NotImplementedError

    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    # -- boundary ------------------------------------------------------

    def boundary_candidates(self, h, rng):
        """Nodes on the boundaries of all primitives in this shape tree.

        Returns ``(points, normals, tags)``.  Composite shapes do not
        filter here; candidates lying inside a sibling primitive are
        removed afterwards by ``discretize_boundary``.
        """
        raise NotImplementedError

    # -- algebra ---------------------------------------------------------

    def __or__(self, other):
        return ShapeUnion(self, other)

    def __sub__(self, other):
        return ShapeDifference(self, other)

    def translate(self, offset):
        return Translated(self, offset)

    def rotate(self, matrix):
        return Rotated(self, matrix)


class Ball(Shape):
    """Closed ball: an interval (1D), disc (2D) or solid sphere (3D).

    ``tag`` is the boundary type stamped on nodes generated from this
    primitive's surface; boundary tags must be negative.
    """

    def __init__(self, center, radius: float, tag: int = -1):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.radius = float(radius)
        if self.radius <= 0:
            raise GeometryError(f"ball radius must be positive, got {radius}")
        if tag >= 0:
            raise GeometryError("boundary tags must be negative")
        self.tag = tag
        self.dim = self.center.shape[0]

    def classify(self, points, tol=0.0):
        t = np.linalg.norm(points - self.center, axis=1) - self.radius
        return np.where(t > tol, OUT, np.where(t < -tol, IN, SURF)).astype(np.int8)

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def boundary_candidates(self, h, rng):
        h = as_spacing(h)
        if self.dim == 1:
            pts = np.array([[self.center[0] - self.radius], [self.center[0] + self.radius]])
            nrm = np.array([[-1.0], [1.0]])
        elif self.dim == 2:
            pts, nrm = _circle_nodes(self.center, self.radius, h, rng)
        elif self.dim == 3:
            pts, nrm = _sphere_nodes(self.center, self.radius, h, rng)
        else:
            raise GeometryError(f"ball boundaries support d <= 3, got {self.dim}")
        tags = np.full(pts.shape[0], self.tag, dtype=np.int64)
        return pts, nrm, tags

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius}, tag={self.tag})"


class Box(Shape):
    """Closed axis-aligned box given by opposite corners ``lo`` and ``hi``."""

    def __init__(self, lo, hi, tag: int = -1):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape:
            raise GeometryError("box corners must have equal dimension")
        if np.any(self.hi <= self.lo):
            raise GeometryError("box needs hi > lo in every axis")
        if tag >= 0:
            raise GeometryError("boundary tags must be negative")
        self.tag = tag
        self.dim = self.lo.shape[0]

    def classify(self, points, tol=0.0):
        # signed margin: distance to the nearest face along an axis,
        # positive inside, negative outside
        m = np.minimum((points - self.lo).min(axis=1), (self.hi - points).min(axis=1))
        return np.where(m < -tol, OUT, np.where(m > tol, IN, SURF)).astype(np.int8)

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def boundary_candidates(self, h, rng):
        h = as_spacing(h)
        if self.dim == 1:
            pts = np.array([[self.lo[0]], [self.hi[0]]])
            nrm = np.array([[-1.0], [1.0]])
        elif self.dim == 2:
            pts, nrm = _box_edges_2d(self.lo, self.hi, h)
        elif self.dim == 3:
            pts, nrm = _box_faces_3d(self.lo, self.hi, h)
        else:
            raise GeometryError(f"box boundaries support d <= 3, got {self.dim}")
        tags = np.full(pts.shape[0], self.tag, dtype=np.int64)
        return pts, nrm, tags

    def __repr__(self):
        return f"Box({self.lo.tolist()}, {self.hi.tolist()}, tag={self.tag})"


class ShapeUnion(Shape):
    def __init__(self, a: Shape, b: Shape):
        if a.dim != b.dim:
            raise GeometryError("cannot combine shapes of different dimension")
        self.a, self.b = a, b
        self.dim = a.dim

    def classify(self, points, tol=0.0):
        ca = self.a.classify(points, tol)
        cb = self.b.classify(points, tol)
        out = np.full(points.shape[0], SURF, dtype=np.int8)
        out[(ca == IN) | (cb == IN)] = IN
        out[(ca == OUT) & (cb == OUT)] = OUT
        return out

    def bounding_box(self):
        alo, ahi = self.a.bounding_box()
        blo, bhi = self.b.bounding_box()
        return np.minimum(alo, blo), np.maximum(ahi, bhi)

    def boundary_candidates(self, h, rng):
        return _concat_candidates(
            self.a.boundary_candidates(h, rng), self.b.boundary_candidates(h, rng)
        )

    def __repr__(self):
        return f"({self.a!r} | {self.b!r})"


class ShapeDifference(Shape):
    """Points of ``a`` not in the open interior of ``b``.

    Boundary nodes contributed by ``b`` keep its tag and get their
    normals flipped so they point out of the remaining material.
    """

    def __init__(self, a: Shape, b: Shape):
        if a.dim != b.dim:
            raise GeometryError("cannot combine shapes of different dimension")
        self.a, self.b = a, b
        self.dim = a.dim

    def classify(self, points, tol=0.0):
        ca = self.a.classify(points, tol)
        cb = self.b.classify(points, tol)
        out = np.full(points.shape[0], SURF, dtype=np.int8)
        out[(ca == IN) & (cb == OUT)] = IN
        out[(ca == OUT) | (cb == IN)] = OUT
        return out

    def bounding_box(self):
        return self.a.bounding_box()

    def boundary_candidates(self, h, rng):
        pa = self.a.boundary_candidates(h, rng)
        pb, nb, tb = self.b.boundary_candidates(h, rng)
        return _concat_candidates(pa, (pb, -nb, tb))

    def __repr__(self):
        return f"({self.a!r} - {self.b!r})"


class Translated(Shape):
    def __init__(self, inner: Shape, offset):
        self.inner = inner
        self.offset = np.atleast_1d(np.asarray(offset, dtype=float))
        if self.offset.shape[0] != inner.dim:
            raise GeometryError("offset dimension does not match shape")
        self.dim = inner.dim

    def classify(self, points, tol=0.0):
        return self.inner.classify(points - self.offset, tol)

    def bounding_box(self):
        lo, hi = self.inner.bounding_box()
        return lo + self.offset, hi + self.offset

    def boundary_candidates(self, h, rng):
        h = as_spacing(h)
        pts, nrm, tags = self.inner.boundary_candidates(
            lambda q: h(q + self.offset), rng
        )
        return pts + self.offset, nrm, tags

    def __repr__(self):
        return f"{self.inner!r}.translate({self.offset.tolist()})"


class Rotated(Shape):
    """Shape rotated by an orthogonal matrix about the origin."""

    def __init__(self, inner: Shape, matrix):
        self.inner = inner
        self.matrix = np.asarray(matrix, dtype=float)
        d = inner.dim
        if self.matrix.shape != (d, d):
            raise GeometryError(f"rotation matrix must be {d}x{d}")
        if not np.allclose(self.matrix @ self.matrix.T, np.eye(d), atol=1e-12):
            raise GeometryError("rotation matrix must be orthogonal")
        self.dim = d

    def classify(self, points, tol=0.0):
        return self.inner.classify(points @ self.matrix, tol)

    def bounding_box(self):
        lo, hi = self.inner.bounding_box()
        corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(self.dim, -1).T
        world = corners @ self.matrix.T
        return world.min(axis=0), world.max(axis=0)

    def boundary_candidates(self, h, rng):
        h = as_spacing(h)
        pts, nrm, tags = self.inner.boundary_candidates(
            lambda q: h(q @ self.matrix.T), rng
        )
        return pts @ self.matrix.T, nrm @ self.matrix.T, tags

    def __repr__(self):
        return f"{self.inner!r}.rotate(...)"


def _concat_candidates(a, b):
    return (
        np.concatenate([a[0], b[0]], axis=0),
        np.concatenate([a[1], b[1]], axis=0),
        np.concatenate([a[2], b[2]], axis=0),
    )


# ----------------------------------------------------------------------
# primitive boundary generators


def _arc_count(total_mass: float, k_min: int) -> int:
    """Node count for a 1D march of accumulated mass (arc length over h).

    Rounds to the nearest count, then backs off by one if that would
    squeeze the local spacing below 0.76 h, keeping generated boundary
    pairs clear of the 0.75 h minimum-distance floor.
    """
    k = max(k_min, int(round(total_mass)))
    if k > k_min and total_mass / k < 0.76:
        k -= 1
    return k


def _circle_nodes(center, radius, h, rng):
    """March around a circle emitting nodes at equal spacing mass.

    The mass density is ``r / h(p(theta))``, so where the requested
    spacing is small the march slows down and nodes densify.  A random
    start angle decorrelates the discretization from the axes.
    """
    theta0 = rng.uniform(0.0, 2.0 * np.pi)
    # probe pass to bound the fine-grid resolution
    probe = theta0 + np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    ring = center + radius * np.stack([np.cos(probe), np.sin(probe)], axis=1)
    h_min = float(np.min(h(ring)))
    m = max(512, int(np.ceil(32.0 * 2.0 * np.pi * radius / h_min)))

    theta = theta0 + np.linspace(0.0, 2.0 * np.pi, m + 1)
    pts = center + radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    dens = radius / h(pts)
    dtheta = 2.0 * np.pi / m
    # cumulative mass along the ring, trapezoid rule
    mass = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * dtheta)])
    total = mass[-1]
    k = _arc_count(total, 3)
    targets = np.arange(k) * (total / k)
    node_theta = np.interp(targets, mass, theta)
    normals = np.stack([np.cos(node_theta), np.sin(node_theta)], axis=1)
    return center + radius * normals, normals


def _segment_nodes(p0, p1, h):
    """Interior nodes of one box edge, spaced by the same mass rule."""
    length = float(np.linalg.norm(p1 - p0))
    m = max(64, int(np.ceil(16.0 * length / _min_h_on_segment(p0, p1, h))))
    t = np.linspace(0.0, 1.0, m + 1)
    pts = p0 + t[:, None] * (p1 - p0)
    dens = length / h(pts)
    dt = 1.0 / m
    mass = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * dt)])
    total = mass[-1]
    k = _arc_count(total, 1)
    if k < 2:
        return np.empty((0, p0.shape[0]))
    targets = np.arange(1, k) * (total / k)
    t_nodes = np.interp(targets, mass, t)
    return p0 + t_nodes[:, None] * (p1 - p0)


def _min_h_on_segment(p0, p1, h):
    t = np.linspace(0.0, 1.0, 33)
    return float(np.min(h(p0 + t[:, None] * (p1 - p0))))


def _box_edges_2d(lo, hi, h):
    """Corners plus marched edge interiors; corner normals are averaged."""
    c = [
        np.array([lo[0], lo[1]]),
        np.array([hi[0], lo[1]]),
        np.array([hi[0], hi[1]]),
        np.array([lo[0], hi[1]]),
    ]
    s = np.sqrt(0.5)
    corner_normals = np.array([[-s, -s], [s, -s], [s, s], [-s, s]])
    edges = [(c[0], c[1], [0.0, -1.0]), (c[1], c[2], [1.0, 0.0]),
             (c[2], c[3], [0.0, 1.0]), (c[3], c[0], [-1.0, 0.0])]
    pts = list(c)
    nrm = list(corner_normals)
    for p0, p1, n in edges:
        inner = _segment_nodes(p0, p1, h)
        pts.extend(inner)
        nrm.extend([np.asarray(n)] * inner.shape[0])
    return np.array(pts), np.array(nrm)


def _box_faces_3d(lo, hi, h):
    """Inclusive grids on each face, deduplicated along shared edges.

    Duplicated edge and corner nodes get the average of the face normals
    that contributed them, renormalized to unit length.
    """
    size = hi - lo
    center = 0.5 * (lo + hi)
    h0 = float(as_spacing(h)(center[None, :])[0])
    counts = []
    for ax in range(3):
        total = size[ax] / h0
        counts.append(_arc_count(total, 1))

    acc: dict[tuple, list] = {}
    quant = 1e-12 * float(np.linalg.norm(size))

    def add(p, n):
        key = tuple(np.round(p / quant).astype(np.int64))
        slot = acc.setdefault(key, [p, np.zeros(3)])
        slot[1] += n

    for ax in range(3):
        u_ax, v_ax = [a for a in range(3) if a != ax]
        ku, kv = counts[u_ax], counts[v_ax]
        us = np.linspace(lo[u_ax], hi[u_ax], ku + 1)
        vs = np.linspace(lo[v_ax], hi[v_ax], kv + 1)
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        for side, coord in ((-1.0, lo[ax]), (1.0, hi[ax])):
            n = np.zeros(3)
            n[ax] = side
            face = np.empty((uu.size, 3))
            face[:, ax] = coord
            face[:, u_ax] = uu.ravel()
            face[:, v_ax] = vv.ravel()
            for p in face:
                add(p, n)

    pts = np.array([slot[0] for slot in acc.values()])
    nrm = np.array([slot[1] for slot in acc.values()])
    norms = np.linalg.norm(nrm, axis=1)
    nrm = nrm / norms[:, None]
    return pts, nrm


def _fibonacci_sphere(n: int):
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * _GOLDEN_ANGLE
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _sphere_nodes(center, radius, h, rng):
    """Sphere discretization by greedy thinning of a fine spiral lattice.

    A spiral lattice several times denser than the finest requested
    spacing is rotated randomly, then walked in order keeping every
    point at least ``0.8 h(p)`` from all previously kept points.  The
    0.8 factor guarantees kept pairs clear the 0.75 min-distance floor
    for any spacing function.  A single neighborhood-averaging pass
    evens out the spacing; it is rolled back if it would break the floor.
    """
    probe = center + radius * _fibonacci_sphere(256)
    h_probe = h(probe)
    h_min = float(np.min(h_probe))
    h_max = float(np.max(h_probe))
    base_n = int(np.ceil(161.0 * (radius / (0.45 * h_min)) ** 2))
    base = center + radius * (_fibonacci_sphere(base_n) @ _random_rotation(rng).T)
    h_base = h(base)

    cell = 0.8 * h_max
    grid: dict[tuple, list] = {}
    kept: list[int] = []
    pts = base
    for i in range(base_n):
        p = pts[i]
        key = tuple((p // cell).astype(np.int64))
        limit = 0.8 * h_base[i]
        ok = True
        for kx in range(key[0] - 1, key[0] + 2):
            for ky in range(key[1] - 1, key[1] + 2):
                for kz in range(key[2] - 1, key[2] + 2):
                    for j in grid.get((kx, ky, kz), ()):
                        if np.sum((pts[j] - p) ** 2) < limit * limit:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            grid.setdefault(key, []).append(i)
            kept.append(i)

    nodes = pts[kept]
    nodes = _sphere_smooth(nodes, center, radius, h)
    normals = (nodes - center) / radius
    norms = np.linalg.norm(normals, axis=1)
    return center + radius * normals / norms[:, None], normals / norms[:, None]


def _sphere_smooth(nodes, center, radius, h):
    """One averaging pass toward the centroid of the 6 nearest neighbors."""
    from scipy.spatial import cKDTree

    n = nodes.shape[0]
    if n < 8:
        return nodes
    tree = cKDTree(nodes)
    _, idx = tree.query(nodes, k=7)
    centroid = nodes[idx[:, 1:]].mean(axis=1)
    moved = nodes + 0.5 * (centroid - nodes)
    rel = moved - center
    moved = center + radius * rel / np.linalg.norm(rel, axis=1)[:, None]
    # keep the pass only if the minimum-distance floor survives it
    d_new, j_new = cKDTree(moved).query(moved, k=2)
    h_new = h(moved)
    pair_h = np.minimum(h_new, h_new[j_new[:, 1]])
    if np.all(d_new[:, 1] >= 0.76 * pair_h):
        return moved
    return nodes
