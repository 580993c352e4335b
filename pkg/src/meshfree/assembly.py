"""Implicit assembly of collocation systems.

One equation per node: interior rows place stencil weights of the PDE
operator, Dirichlet rows pin the value, Neumann rows place the normal
derivative weights.  Each row is owned by the node it belongs to and can
be committed only once; rebuilding a row means building a new system.

``finalize`` produces a canonical CSR matrix: rows in index order,
columns ascending within each row.  Weight stores emit the same layout
for their explicit matrices, which makes the two application paths agree
bitwise.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse

from .errors import StorageError

_EMPTY = 0
_TAKEN = 1


class SparseSystem:
    def __init__(self, n_rows: int):
        self.n = int(n_rows)
        self._rows = []
        self._cols = []
        self._vals = []
        self.rhs = np.zeros(self.n)
        self._state = np.zeros(self.n, dtype=np.int8)

    def _claim(self, i: int):
        if not 0 <= i < self.n:
            raise StorageError(f"row {i} outside system of size {self.n}")
        if self._state[i] != _EMPTY:
            raise StorageError(f"row {i} is already committed")
        self._state[i] = _TAKEN

    def add_row(self, i: int, cols, vals, rhs_value: float):
        """Commit one equation: sum_j vals[j] u[cols[j]] = rhs_value.

        Only row ``i`` may be written; entries naming other rows are the
        caller mixing up stencil direction, so they raise.
        """
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if cols.shape != vals.shape or cols.ndim != 1:
            raise StorageError("cols and vals must be matching 1-d arrays")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n):
            raise StorageError(f"row {i}: column index out of range")
        if np.unique(cols).size != cols.size:
            raise StorageError(f"row {i}: duplicate columns in one equation")
        self._claim(int(i))
        self._rows.append(np.full(cols.size, int(i), dtype=np.int64))
        self._cols.append(cols.copy())
        self._vals.append(vals.copy())
        self.rhs[int(i)] = float(rhs_value)

    # -- the three row kinds ----------------------------------------------

    def add_interior_row(self, store, i: int, terms, rhs_value: float):
        """PDE row from stored weights.

        ``terms`` is a family name or a list of ``(coefficient, family)``
        pairs; coefficients combine the stored weight vectors slot by slot.
        """
        if isinstance(terms, str):
            terms = [(1.0, terms)]
        st = store.stencil(i)
        acc = None
        for coeff, key in terms:
            part = float(coeff) * store.weights(key, i)
            acc = part if acc is None else acc + part
        self.add_row(i, st, acc, rhs_value)

    def add_dirichlet_row(self, i: int, value: float):
        self.add_row(i, np.array([i]), np.array([1.0]), value)

    def add_neumann_row(self, store, i: int, normal, value: float):
        st = store.stencil(i)
        c = store.normal_combination(i, normal)
        self.add_row(i, st, c, value)

    # -- output ------------------------------------------------------------

    def finalize(self):
        """Canonical CSR matrix and right-hand side."""
        missing = np.flatnonzero(self._state == _EMPTY)
        if missing.size:
            raise StorageError(
                f"{missing.size} rows never committed (first: node {missing[0]})"
            )
        rows = np.concatenate(self._rows) if self._rows else np.empty(0, dtype=np.int64)
        cols = np.concatenate(self._cols) if self._cols else np.empty(0, dtype=np.int64)
        vals = np.concatenate(self._vals) if self._vals else np.empty(0)
        order = np.lexsort((cols, rows))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        mat = scipy.sparse.csr_matrix(
            (vals[order], cols[order], indptr), shape=(self.n, self.n)
        )
        return mat, self.rhs.copy()

    @property
    def nnz(self) -> int:
        return int(sum(c.size for c in self._cols))

    def __repr__(self):
        committed = int(np.count_nonzero(self._state))
        return f"SparseSystem(n={self.n}, committed={committed}, nnz={self.nnz})"
