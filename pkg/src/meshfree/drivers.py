"""Problem drivers built on the weight store.

``run_heat_explicit`` marches the heat equation with forward Euler on
scattered nodes; ``solve_poisson_implicit`` assembles and solves a
steady problem.  Both take boundary conditions as ``{tag: value}``
dictionaries.  For the time stepper a value is a constant or a callable
``g(points, t)``; for steady problems it is a constant or ``g(points)``.
"""

from __future__ import annotations

import numpy as np

from .assembly import SparseSystem
from .errors import ConfigError, InstabilityError
from .solve import SolverConfig, solve_sparse

BLOWUP_LIMIT = 1e12


def _bc_values(value, points, t):
    if callable(value):
        out = value(points, t)
        return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],))
    return np.full(points.shape[0], float(value))


def _steady_values(value, points):
    if callable(value):
        out = value(points)
        return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],))
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(points.shape[0], float(arr))
    return np.broadcast_to(arr, (points.shape[0],))


def _tag_indices(nodes, bc_dict):
    out = {}
    for tag, value in (bc_dict or {}).items():
        idx = nodes.select(int(tag))
        if idx.size == 0:
            raise ConfigError(f"boundary condition for tag {tag} matches no node")
        out[int(tag)] = (idx, value)
    return out


def run_heat_explicit(
    nodes,
    store,
    *,
    dt: float,
    steps: int,
    diffusivity: float = 1.0,
    source=None,
    dirichlet=None,
    neumann=None,
    initial=0.0,
):
    """Forward-Euler march of du/dt = D lap(u) + f.

    Per step: interior nodes take an Euler update from the stored
    laplacian weights, Dirichlet nodes are set to their prescribed
    value, and Neumann nodes solve their flux condition for the nodal
    value using neighbor values from the previous step.

    Boundary tags not mentioned in either dictionary keep their initial
    values.  Returns the field after ``steps`` steps.
    """
    if dt <= 0 or steps < 0:
        raise ConfigError("need dt > 0 and steps >= 0")
    n = len(nodes)
    pts = nodes.positions
    interior = nodes.interior_indices()

    u = np.empty(n)
    if callable(initial):
        u[:] = np.asarray(initial(pts), dtype=float)
    else:
        u[:] = np.asarray(initial, dtype=float)

    diri = _tag_indices(nodes, dirichlet)
    neum = _tag_indices(nodes, neumann)
    for idx, value in diri.values():
        u[idx] = _bc_values(value, pts[idx], 0.0)

    lap = store.matrix("laplacian")
    for step in range(steps):
        t_new = (step + 1) * dt
        lap_u = lap @ u
        f = _bc_values(source, pts, step * dt) if source is not None else 0.0
        u_new = u.copy()
        u_new[interior] = u[interior] + dt * (
            diffusivity * lap_u[interior]
            + (f[interior] if source is not None else 0.0)
        )
        for idx, value in diri.values():
            u_new[idx] = _bc_values(value, pts[idx], t_new)
        for tag, (idx, value) in neum.items():
            g = _bc_values(value, pts[idx], t_new)
            for j, i in enumerate(idx):
                u_new[i] = store.neumann_value(u, int(i), nodes.normal(int(i)), g[j])
        u = u_new
        peak = float(np.max(np.abs(u)))
        if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
            raise InstabilityError(
                step + 1,
                f"field peak {peak:.2e} exceeds {BLOWUP_LIMIT:.0e}; forward Euler "
                "needs roughly dt <= h_min^2 / (2 d D)",
            )
    return u


def solve_poisson_implicit(
    nodes,
    store,
    *,
    terms,
    rhs,
    dirichlet=None,
    neumann=None,
    config: SolverConfig | None = None,
    system_out: list | None = None,
):
    """Assemble and solve a steady collocation problem.

    ``terms`` follows :meth:`SparseSystem.add_interior_row` (a family
    name or ``(coeff, family)`` list) and ``rhs`` is a constant or
    callable ``f(points)`` giving interior right-hand sides.  Every node
    must end up covered: interior by the PDE, boundary by exactly one of
    the condition dictionaries.

    ``system_out``, when given, receives the assembled ``(matrix, rhs)``
    for callers that want to reuse or inspect the system.
    """
    n = len(nodes)
    pts = nodes.positions
    system = SparseSystem(n)

    interior = nodes.interior_indices()
    f = _steady_values(rhs, pts[interior])
    for j, i in enumerate(interior):
        system.add_interior_row(store, int(i), terms, float(f[j]))

    for idx, value in _tag_indices(nodes, dirichlet).values():
        g = _steady_values(value, pts[idx])
        for j, i in enumerate(idx):
            system.add_dirichlet_row(int(i), float(g[j]))
    for idx, value in _tag_indices(nodes, neumann).values():
        g = _steady_values(value, pts[idx])
        for j, i in enumerate(idx):
            system.add_neumann_row(store, int(i), nodes.normal(int(i)), float(g[j]))

    matrix, rhs_vec = system.finalize()
    if system_out is not None:
        system_out.append((matrix, rhs_vec))
    return solve_sparse(matrix, rhs_vec, config)
