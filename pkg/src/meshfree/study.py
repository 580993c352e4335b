"""Convergence and timing studies.

The Poisson benchmark runs the full pipeline, domain build through error
evaluation, at a sequence of target spacings, timing seven stages
separately and taking the median over repetitions.  The approximation
study measures raw Laplacian stencil accuracy on gridded unit squares
for a set of classic engine configurations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, fields

import numpy as np

from .approx.basis import Gaussian, MonomialBasis, Polyharmonic
from .approx.engines import RbfFd, WeightedLeastSquares
from .approx.weights import GaussianWeight
from .assembly import SparseSystem
from .errors import ConfigError, MeshfreeError
from .geometry import Ball, discretize_boundary, fill_interior, find_closest_stencils, grid_nodes
from .solve import SolverConfig, make_preconditioner, solve_sparse
from .storage import compute_weights

STAGES = (
    "domain_discretization",
    "stencil_selection",
    "weight_computation",
    "matrix_assembly",
    "preconditioner",
    "iterative_solve",
    "error_computation",
)


@dataclass
class TimingBreakdown:
    domain_discretization: float = 0.0
    stencil_selection: float = 0.0
    weight_computation: float = 0.0
    matrix_assembly: float = 0.0
    preconditioner: float = 0.0
    iterative_solve: float = 0.0
    error_computation: float = 0.0

    def total(self) -> float:
        return sum(getattr(self, f.name) for f in fields(self))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class ConvergenceRecord:
    n_nodes: int
    h: float
    e_inf: float
    timings: TimingBreakdown


def fit_order(h_values, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    h_values = np.asarray(h_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if h_values.size < 2:
        raise ConfigError("order fit needs at least two resolutions")
    if np.any(errors <= 0) or np.any(h_values <= 0):
        raise ConfigError("order fit needs positive spacings and errors")
    return float(np.polyfit(np.log(h_values), np.log(errors), 1)[0])


def order_vs_nodes(n_values, errors, dim: int) -> float:
    """Convergence order against the effective spacing N^(-1/dim)."""
    h_eff = np.asarray(n_values, dtype=float) ** (-1.0 / dim)
    return fit_order(h_eff, errors)


# ----------------------------------------------------------------------
# manufactured Poisson benchmark


def shell_problem(dim: int):
    """Manufactured Poisson problem on a ball-with-hole domain.

    ``-lap(u) = f`` with ``u0 = prod(sin(pi x_a))``, Dirichlet data from
    ``u0`` on both spheres.  Returns (shape, u0, f).
    """
    if dim not in (2, 3):
        raise ConfigError("benchmark domain exists for dim 2 or 3")
    shape = Ball([0.0] * dim, 1.0, tag=-1) - Ball([0.0] * dim, 0.5, tag=-2)

    def u0(points):
        return np.prod(np.sin(np.pi * points), axis=1)

    def f(points):
        return dim * np.pi**2 * np.prod(np.sin(np.pi * points), axis=1)

    return shape, u0, f


def poisson_pipeline(
    shape,
    u_exact,
    f_rhs,
    h: float,
    *,
    stencil_size: int,
    engine,
    seed: int = 0,
    solver_config: SolverConfig | None = None,
):
    """One full implicit Poisson run with per-stage wall timings.

    Returns ``(record, field, nodes)``; the error is the max-norm
    difference from ``u_exact`` over all nodes.
    """
    timings = TimingBreakdown()
    solver_config = solver_config or SolverConfig()

    t0 = time.perf_counter()
    nodes = discretize_boundary(shape, h, seed=seed)
    nodes = fill_interior(nodes, shape, h, seed=seed)
    timings.domain_discretization = time.perf_counter() - t0

    t0 = time.perf_counter()
    nodes = find_closest_stencils(nodes, stencil_size)
    timings.stencil_selection = time.perf_counter() - t0

    t0 = time.perf_counter()
    store = compute_weights(nodes, engine, ["laplacian"])
    timings.weight_computation = time.perf_counter() - t0

    t0 = time.perf_counter()
    pts = nodes.positions
    system = SparseSystem(len(nodes))
    interior = nodes.interior_indices()
    f_vals = f_rhs(pts[interior])
    for j, i in enumerate(interior):
        system.add_interior_row(store, int(i), [(-1.0, "laplacian")], float(f_vals[j]))
    boundary = nodes.boundary_indices()
    g_vals = u_exact(pts[boundary])
    for j, i in enumerate(boundary):
        system.add_dirichlet_row(int(i), float(g_vals[j]))
    matrix, rhs = system.finalize()
    timings.matrix_assembly = time.perf_counter() - t0

    t0 = time.perf_counter()
    precond = make_preconditioner(matrix, solver_config)
    timings.preconditioner = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = solve_sparse(matrix, rhs, solver_config, preconditioner=precond)
    timings.iterative_solve = time.perf_counter() - t0

    t0 = time.perf_counter()
    e_inf = float(np.max(np.abs(result.u - u_exact(pts))))
    timings.error_computation = time.perf_counter() - t0

    record = ConvergenceRecord(n_nodes=len(nodes), h=float(h), e_inf=e_inf, timings=timings)
    return record, result.u, nodes


def poisson_convergence(
    dim: int,
    h_values,
    *,
    stencil_size: int | None = None,
    repetitions: int = 1,
    seed: int = 0,
    engine=None,
    solver_config: SolverConfig | None = None,
):
    """Benchmark records over a spacing sweep, stage-median over repetitions.

    The error comes from the first repetition (repetitions only re-time
    the identical deterministic run); each stage reports its median time.
    """
    if repetitions < 1:
        raise ConfigError("repetitions must be at least 1")
    shape, u0, f = shell_problem(dim)
    if stencil_size is None:
        stencil_size = 9 if dim == 2 else 35
    if engine is None:
        engine = RbfFd(Polyharmonic(3), degree=2, scale="nearest", solver="lu")

    records = []
    for h in h_values:
        runs = [
            poisson_pipeline(
                shape, u0, f, float(h),
                stencil_size=stencil_size, engine=engine, seed=seed,
                solver_config=solver_config,
            )[0]
            for _ in range(repetitions)
        ]
        rec = runs[0]
        for name in STAGES:
            setattr(rec.timings, name,
                    float(np.median([getattr(r.timings, name) for r in runs])))
        records.append(rec)
    return records


# ----------------------------------------------------------------------
# stencil approximation study on gridded squares


def classic_setups() -> dict:
    """Five reference engine configurations for the grid Laplacian study.

    Keys are short stable names used in CSV output; values are
    ``(engine, stencil_size)`` pairs.
    """
    wls_basis = MonomialBasis.from_exponents(
        2, [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)]
    )
    return {
        "gauss-wide-lu": (RbfFd(Gaussian(100.0), degree=-1, scale="nearest", solver="lu"), 9),
        "gauss-raw-lu": (RbfFd(Gaussian(5.0), degree=-1, scale="none", solver="lu"), 9),
        "gauss-raw-svd": (RbfFd(Gaussian(5.0), degree=-1, scale="none", solver="svd"), 9),
        "wls-quad-svd": (
            WeightedLeastSquares(wls_basis, weight=GaussianWeight(1.0),
                                 scale="nearest", solver="svd"),
            9,
        ),
        "phs5-aug2-lu": (RbfFd(Polyharmonic(5), degree=2, scale="nearest", solver="lu"), 12),
    }


def grid_laplacian_error(engine, stencil_size: int, resolution: int) -> float:
    """Max-norm Laplacian error over interior nodes of a unit-square grid.

    ``resolution`` is the inverse spacing: the grid has resolution + 1
    nodes per side.  The reference field is sin(pi x) sin(pi y).
    """
    h = 1.0 / resolution
    nodes = grid_nodes([0.0, 0.0], [1.0, 1.0], h)
    nodes = find_closest_stencils(nodes, stencil_size, for_which="interior")
    try:
        store = compute_weights(nodes, engine, ["laplacian"], for_which="interior")
    except MeshfreeError:
        # a setup that breaks down entirely at this spacing has unbounded
        # error; record that instead of aborting the whole study
        return float("inf")

    pts = nodes.positions
    u = np.sin(np.pi * pts[:, 0]) * np.sin(np.pi * pts[:, 1])
    exact = -2.0 * np.pi**2 * u
    approx = store.apply_all("laplacian", u)
    interior = nodes.interior_indices()
    return float(np.max(np.abs(approx[interior] - exact[interior])))


def approximation_convergence(resolutions, setups=None):
    """Rows of (setup, h, e_h) for the grid study, setups in dict order."""
    if setups is None:
        setups = classic_setups()
    rows = []
    for name, (engine, n_st) in setups.items():
        for res in resolutions:
            rows.append((name, 1.0 / res, grid_laplacian_error(engine, n_st, res)))
    return rows
