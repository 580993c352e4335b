"""Weight tables: compute once, apply many times.

``compute_weights`` evaluates an engine over the stencils of the chosen
nodes for a list of operator families and stores all weight vectors in
flat arrays aligned with the stencils.  The returned :class:`WeightStore`
supports explicit operator application (single node or whole field),
vector calculus helpers, and the explicit Neumann update.

Family names: ``"identity"``, ``"d1_<axis>"``, ``"d2_<a>_<b>"`` with
``a <= b``, ``"laplacian"``.  The shorthands ``"gradient"`` and
``"hessian"`` expand to all first, respectively all upper-triangle
second, derivatives.  Custom operators are stored under a caller-chosen
name via a ``(name, operator)`` pair.

Polyharmonic RBF-FD engines with the ``lu`` solver and uniform stencil
sizes are routed to a batched backend (numba-compiled when enabled);
everything else goes through the engine one node at a time.  Both paths
produce the same weights up to floating point roundoff of the dense
solver; within one backend results are deterministic and independent of
the thread count, because every node's system is solved in isolation.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse

from . import _phs_batch
from .approx.basis import MonomialBasis, Polyharmonic, graded_lex_exponents
from .approx.engines import RbfFd
from .approx.operators import (
    FirstDerivative,
    Identity,
    Laplacian,
    Operator,
    SecondDerivative,
)
from .config import set_threads
from .errors import MeshfreeError, NumericalError, StencilError, StorageError, WeightError

# first-slot pivot guard for the explicit Neumann solve
NEUMANN_PIVOT_RTOL = 1e-12


def _canonical_key(op) -> str:
    if isinstance(op, Identity):
        return "identity"
    if isinstance(op, FirstDerivative):
        return f"d1_{op.axis}"
    if isinstance(op, SecondDerivative):
        return f"d2_{op.a}_{op.b}"
    if isinstance(op, Laplacian):
        return "laplacian"
    raise StorageError(
        f"{op!r} has no canonical family name; store it as (name, operator)"
    )


def _key_to_operator(key: str, dim: int) -> Operator:
    if key == "identity":
        return Identity()
    if key == "laplacian":
        return Laplacian()
    if key.startswith("d1_"):
        axis = int(key[3:])
        if not 0 <= axis < dim:
            raise StorageError(f"axis out of range in family {key!r}")
        return FirstDerivative(axis)
    if key.startswith("d2_"):
        a, b = (int(x) for x in key[3:].split("_"))
        if not 0 <= a <= b < dim:
            raise StorageError(f"axes out of range in family {key!r}")
        return SecondDerivative(a, b)
    raise StorageError(f"unknown family {key!r}")


def expand_families(families, dim: int):
    """Normalize a family spec list into an ordered {name: operator} dict."""
    out: dict[str, Operator] = {}

    def put(key, op):
        if key in out:
            raise StorageError(f"family {key!r} requested twice")
        out[key] = op

    for spec in families:
        if isinstance(spec, str):
            if spec == "gradient":
                for a in range(dim):
                    put(f"d1_{a}", FirstDerivative(a))
            elif spec == "hessian":
                for a in range(dim):
                    for b in range(a, dim):
                        put(f"d2_{a}_{b}", SecondDerivative(a, b))
            else:
                put(spec, _key_to_operator(spec, dim))
        elif isinstance(spec, Operator):
            put(_canonical_key(spec), spec)
        elif isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[1], Operator):
            name = str(spec[0])
            if "," in name or not name:
                raise StorageError(f"bad custom family name {name!r}")
            put(name, spec[1])
        else:
            raise StorageError(f"cannot interpret family spec {spec!r}")
    if not out:
        raise StorageError("no operator families requested")
    return out


class WeightStore:
    """Per-node stencil weights for a set of operator families.

    Weights are kept in stencil order (self first); sparse-matrix views
    used for whole-field application sort each row by column index, the
    same canonical layout the implicit assembly produces, so explicit
    and assembled applications agree bitwise.
    """

    def __init__(self, n_nodes, rows, offsets, cols, values, stencil_sizes):
        self.n_nodes = int(n_nodes)
        self.rows = rows
        self.offsets = offsets
        self.cols = cols
        self.values = values  # {family: flat array aligned with cols}
        self.stencil_sizes = stencil_sizes
        self.node_row = np.full(self.n_nodes, -1, dtype=np.int64)
        self.node_row[rows] = np.arange(rows.shape[0])
        self._matrices: dict[str, scipy.sparse.csr_matrix] = {}

    @property
    def families(self):
        return list(self.values.keys())

    def _row_slice(self, i: int):
        r = self.node_row[i]
        if r < 0:
            raise StorageError(f"no weights stored for node {i}")
        return slice(self.offsets[r], self.offsets[r + 1])

    def _family(self, key: str):
        try:
            return self.values[key]
        except KeyError:
            raise StorageError(
                f"family {key!r} not stored; available: {', '.join(self.families)}"
            ) from None

    def stencil(self, i: int):
        return self.cols[self._row_slice(i)]

    def weights(self, key: str, i: int):
        """Weight vector for one node, aligned with its stencil."""
        return self._family(key)[self._row_slice(i)]

    def matrix(self, key: str) -> scipy.sparse.csr_matrix:
        """Canonical CSR view: N x N, rows only for stored nodes."""
        if key not in self._matrices:
            vals = self._family(key)
            row_rep = np.repeat(self.rows, np.diff(self.offsets))
            order = np.lexsort((self.cols, row_rep))
            indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
            np.add.at(indptr, row_rep + 1, 1)
            np.cumsum(indptr, out=indptr)
            mat = scipy.sparse.csr_matrix(
                (vals[order], self.cols[order], indptr),
                shape=(self.n_nodes, self.n_nodes),
            )
            self._matrices[key] = mat
        return self._matrices[key]

    # -- explicit application -------------------------------------------

    def apply(self, key: str, field, i: int) -> float:
        """(L u)(p_i) from stored weights; matches the assembled matrix
        row bitwise (same addend order)."""
        mat = self.matrix(key)
        lo, hi = mat.indptr[i], mat.indptr[i + 1]
        if lo == hi and self.node_row[i] < 0:
            raise StorageError(f"no weights stored for node {i}")
        acc = 0.0
        for p in range(lo, hi):
            acc += mat.data[p] * field[mat.indices[p]]
        return acc

    def apply_all(self, key: str, field):
        """(L u) at every stored node as a length-N vector (zeros elsewhere)."""
        return self.matrix(key) @ np.asarray(field, dtype=float)

    def gradient(self, field, i: int):
        d = self._dim()
        return np.array([self.apply(f"d1_{a}", field, i) for a in range(d)])

    def divergence(self, vec_field, i: int) -> float:
        vec_field = np.asarray(vec_field, dtype=float)
        d = self._dim()
        acc = 0.0
        for a in range(d):
            acc += self.apply(f"d1_{a}", vec_field[:, a], i)
        return acc

    def vector_laplacian(self, vec_field, i: int):
        vec_field = np.asarray(vec_field, dtype=float)
        d = vec_field.shape[1]
        return np.array([self.apply("laplacian", vec_field[:, a], i) for a in range(d)])

    def grad_div(self, vec_field, i: int):
        """grad(div u) at node i; needs the hessian families."""
        vec_field = np.asarray(vec_field, dtype=float)
        d = self._dim()
        out = np.zeros(d)
        for a in range(d):
            for b in range(d):
                key = f"d2_{min(a, b)}_{max(a, b)}"
                out[a] += self.apply(key, vec_field[:, b], i)
        return out

    def _dim(self) -> int:
        axes = [int(k[3:]) for k in self.values if k.startswith("d1_")]
        if not axes:
            raise StorageError("no first-derivative families stored")
        return max(axes) + 1

    # -- boundary handling ----------------------------------------------

    def normal_combination(self, i: int, normal):
        """Stencil-ordered weights of the normal derivative at node i."""
        normal = np.asarray(normal, dtype=float)
        sl = self._row_slice(i)
        acc = None
        for a, na in enumerate(normal):
            part = na * self._family(f"d1_{a}")[sl]
            acc = part if acc is None else acc + part
        return acc

    def neumann_value(self, field, i: int, normal, gn: float) -> float:
        """Value at node i enforcing w . u = gn with the node's own weight
        as pivot; neighbor values are read from ``field``."""
        c = self.normal_combination(i, normal)
        pivot = c[0]
        if abs(pivot) < NEUMANN_PIVOT_RTOL * float(np.linalg.norm(c)):
            raise NumericalError(
                f"node {i}: negligible self-weight in the normal derivative; "
                "the stencil cannot enforce a Neumann condition explicitly"
            )
        st = self.cols[self._row_slice(i)]
        acc = float(gn)
        for j in range(1, st.shape[0]):
            acc -= c[j] * field[st[j]]
        return acc / pivot

    # -- export -----------------------------------------------------------

    def rows_in_order(self):
        return self.rows


def compute_weights(nodes, engine, families, for_which=None) -> WeightStore:
    """Evaluate ``engine`` on every selected node for all families.

    ``engine`` is a single engine, or a mapping from family specs (names
    or shorthands like ``"gradient"``) to engines so different families
    can use different fits; every requested family must then be covered.

    ``for_which=None`` means every node that has a stencil.  Nodes
    selected explicitly must all have stencils.
    """
    if for_which is None:
        rows = np.array([i for i in range(len(nodes)) if nodes.has_stencil(i)],
                        dtype=np.int64)
        if rows.size == 0:
            raise StencilError("no node has a stencil; run find_closest_stencils first")
    else:
        rows = nodes.select(for_which).astype(np.int64)

    fams = expand_families(families, nodes.dim)

    sizes = np.array([nodes.stencil(int(i)).shape[0] for i in rows], dtype=np.int64)
    offsets = np.zeros(rows.shape[0] + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    cols = np.empty(offsets[-1], dtype=np.int64)
    for r, i in enumerate(rows):
        cols[offsets[r]:offsets[r + 1]] = nodes.stencil(int(i))

    if isinstance(engine, dict):
        assign = {}
        for spec, eng in engine.items():
            try:
                keys = list(expand_families([spec], nodes.dim))
            except StorageError:
                keys = [str(spec)]  # custom family referenced by its name
            for key in keys:
                if key in assign:
                    raise StorageError(f"family {key!r} mapped to two engines")
                assign[key] = eng
        missing = [k for k in fams if k not in assign]
        if missing:
            raise StorageError(f"no engine given for families {missing}")
        values = {}
        for eng in dict.fromkeys(assign.values()):
            sub = {k: op for k, op in fams.items() if assign[k] is eng}
            if sub:
                values.update(_dispatch(nodes, eng, sub, rows, sizes, offsets, cols))
        values = {k: values[k] for k in fams}
    else:
        values = _dispatch(nodes, engine, fams, rows, sizes, offsets, cols)
    return WeightStore(len(nodes), rows, offsets, cols, values, sizes)


def _dispatch(nodes, engine, fams, rows, sizes, offsets, cols):
    uniform = sizes.size > 0 and np.all(sizes == sizes[0])
    batchable = (
        uniform
        and isinstance(engine, RbfFd)
        and isinstance(engine.rbf, Polyharmonic)
        and engine.solver == "lu"
        and engine.rbf.exponent >= 3
        and engine.scale in ("none", "nearest", "support")
    )
    if batchable:
        return _run_batch(nodes, engine, fams, rows, sizes[0], offsets)
    return _run_loop(nodes, engine, fams, rows, offsets, cols)


def _run_loop(nodes, engine, fams, rows, offsets, cols):
    values = {key: np.empty(offsets[-1]) for key in fams}
    pts = nodes.positions
    for r, i in enumerate(rows):
        i = int(i)
        st = cols[offsets[r]:offsets[r + 1]]
        stencil_pts = pts[st]
        center = pts[i]
        for key, op in fams.items():
            try:
                w = engine.weights(stencil_pts, center, op)
            except MeshfreeError as exc:
                raise WeightError(i, f"family {key!r}: {exc}") from exc
            values[key][offsets[r]:offsets[r + 1]] = w
    return values


def _run_batch(nodes, engine, fams, rows, n, offsets):
    set_threads()
    dim = nodes.dim
    kinds = []
    ax_a = []
    ax_b = []
    orders = []
    for op in fams.values():
        if isinstance(op, Identity):
            kinds.append(_phs_batch.KIND_IDENTITY); ax_a.append(0); ax_b.append(0)
        elif isinstance(op, FirstDerivative):
            kinds.append(_phs_batch.KIND_D1); ax_a.append(op.axis); ax_b.append(0)
        elif isinstance(op, SecondDerivative):
            kinds.append(_phs_batch.KIND_D2); ax_a.append(op.a); ax_b.append(op.b)
        elif isinstance(op, Laplacian):
            kinds.append(_phs_batch.KIND_LAPLACIAN); ax_a.append(0); ax_b.append(0)
        else:
            # custom operators go through the per-node engine loop
            cols = np.concatenate([nodes.stencil(int(i)) for i in rows])
            return _run_loop(nodes, engine, fams, rows, offsets, cols)
        orders.append(op.order)

    degree = engine.degree
    if degree >= 0:
        expos = np.array(graded_lex_exponents(dim, degree), dtype=np.int64)
        basis = MonomialBasis(dim, degree)
        if expos.shape[0] > n:
            raise WeightError(
                int(rows[0]),
                f"augmentation of degree {degree} needs at least "
                f"{expos.shape[0]} stencil nodes, got {n}",
            )
        origin = np.zeros((1, dim))
        base_bot = np.stack(
            [basis.apply(op, origin)[0] for op in fams.values()], axis=0
        )
    else:
        expos = np.empty((0, dim), dtype=np.int64)
        base_bot = np.zeros((len(fams), 0))

    scale_code = {"none": _phs_batch.SCALE_NONE,
                  "nearest": _phs_batch.SCALE_NEAREST,
                  "support": _phs_batch.SCALE_SUPPORT}[engine.scale]

    stencils = nodes.stencil_matrix(rows)
    try:
        out = _phs_batch.batch_phs_weights(
            nodes.positions, rows, stencils,
            np.int64(engine.rbf.exponent), engine.rbf.even,
            expos, base_bot,
            np.array(kinds, dtype=np.int64),
            np.array(ax_a, dtype=np.int64),
            np.array(ax_b, dtype=np.int64),
            np.array(orders, dtype=np.int64),
            scale_code,
        )
    except _phs_batch._ScaleDegenerate as exc:
        raise WeightError(exc.node, "all stencil nodes coincide with the center") from None
    except _phs_batch._SolveDegenerate as exc:
        raise WeightError(
            exc.node,
            "singular local collocation system; try a larger stencil",
        ) from None

    values = {}
    for f, key in enumerate(fams):
        values[key] = np.ascontiguousarray(out[:, f, :]).reshape(-1)
    return values
