"""CSV and manifest output.

All floating point values are written with 17 significant digits, which
round-trips IEEE doubles exactly, and files always use LF line endings,
so identical data produces identical bytes on any platform.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .errors import ConfigError


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_nodes_csv(path, nodes):
    """Node table ``x_0,...,x_{d-1},type`` plus a ``*_normals.csv``
    sibling holding ``index,n_0,...`` rows for boundary nodes."""
    d = nodes.dim
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow([f"x_{a}" for a in range(d)] + ["type"])
        for i in range(len(nodes)):
            w.writerow([_fmt(v) for v in nodes.positions[i]] + [str(int(nodes.types[i]))])

    stem, ext = os.path.splitext(path)
    normals_path = f"{stem}_normals{ext or '.csv'}"
    with open(normals_path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["index"] + [f"n_{a}" for a in range(d)])
        for i in nodes.boundary_indices():
            w.writerow([str(int(i))] + [_fmt(v) for v in nodes.normals[i]])
    return normals_path


def write_field_csv(path, nodes, field):
    """Field table ``x_0,...,x_{d-1},type,u_0,...``.

    ``field`` is an (N,) vector or an (N, k) matrix of components.
    """
    field = np.asarray(field, dtype=float)
    if field.ndim == 1:
        field = field[:, None]
    if field.shape[0] != len(nodes):
        raise ConfigError("field length does not match node count")
    d = nodes.dim
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow([f"x_{a}" for a in range(d)] + ["type"]
                   + [f"u_{c}" for c in range(field.shape[1])])
        for i in range(len(nodes)):
            w.writerow(
                [_fmt(v) for v in nodes.positions[i]]
                + [str(int(nodes.types[i]))]
                + [_fmt(v) for v in field[i]]
            )


def read_field_csv(path):
    """Inverse of :func:`write_field_csv`: (positions, types, field)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = sum(1 for name in header if name.startswith("x_"))
        k = sum(1 for name in header if name.startswith("u_"))
        if d == 0 or header[d] != "type":
            raise ConfigError(f"{path}: not a field CSV")
        pos, types, vals = [], [], []
        for row in reader:
            pos.append([float(v) for v in row[:d]])
            types.append(int(row[d]))
            vals.append([float(v) for v in row[d + 1 : d + 1 + k]])
    return np.array(pos), np.array(types, dtype=np.int64), np.array(vals)


def write_records_csv(path, records):
    """Benchmark rows with error and the full stage timing breakdown."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["N", "h", "e_inf", "t_domain", "t_stencil", "t_weights",
                    "t_assembly", "t_precond", "t_solve", "t_error"])
        for r in records:
            t = r.timings
            w.writerow(
                [str(r.n_nodes), _fmt(r.h), _fmt(r.e_inf)]
                + [_fmt(v) for v in (
                    t.domain_discretization, t.stencil_selection,
                    t.weight_computation, t.matrix_assembly,
                    t.preconditioner, t.iterative_solve, t.error_computation,
                )]
            )


def write_errors_csv(path, records):
    """Deterministic subset of the benchmark rows (no timings)."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["N", "h", "e_inf"])
        for r in records:
            w.writerow([str(r.n_nodes), _fmt(r.h), _fmt(r.e_inf)])


def write_approx_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["setup", "h", "e_h"])
        for name, h, e in rows:
            w.writerow([name, _fmt(h), _fmt(e)])


def write_weights_csv(path, store):
    """Debug dump of every stored weight: node, family, slot, value."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["node", "family", "offset", "weight"])
        for r, node in enumerate(store.rows):
            sl = slice(store.offsets[r], store.offsets[r + 1])
            for family in store.families:
                vals = store.values[family][sl]
                for j, v in enumerate(vals):
                    w.writerow([str(int(node)), family, str(j), _fmt(v)])


def write_manifest(path, payload: dict):
    """Reproducibility manifest: config echo plus environment versions.

    Contains no timestamps or timings, so reruns of the same setup
    produce identical bytes.
    """
    import numba
    import scipy

    from . import __version__

    body = {
        "meshfree": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }
    body.update(payload)
    with open(path, "w", newline="") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
