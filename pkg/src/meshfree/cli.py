"""Command line interface.

Subcommands::

    fill-demo           discretize a CSG shape and fill it with nodes
    approx-convergence  grid Laplacian accuracy of the classic engine setups
    heat2d              explicit heat flow on a disc with a circular hole
    convdiff3d          implicit convection-diffusion in a 3D box with a hole
    poisson-bench       manufactured Poisson convergence and timing sweep

Common flags: ``--config`` (INI file, see runconfig), ``--out``
(output directory), ``--seed``, ``--dim``, ``--quiet``.  Exit codes:
0 success, 1 numerical failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import csvio
from .approx.engines import WeightedLeastSquares
from .approx.operators import Laplacian
from .approx.weights import GaussianWeight
from .config import backend_name
from .errors import ConfigError, MeshfreeError
from .geometry import Ball, Box, discretize_boundary, fill_interior, find_closest_stencils
from .runconfig import RunConfig, make_engine, read_run_config
from .solve import solve_sparse
from .drivers import run_heat_explicit, solve_poisson_implicit
from .storage import compute_weights
from .study import (
    approximation_convergence,
    classic_setups,
    order_vs_nodes,
    poisson_convergence,
)


def _say(args, message):
    if not args.quiet:
        print(message)


def _prepare(args):
    cfg = read_run_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.dim is not None:
        cfg.domain.dim = args.dim
    os.makedirs(args.out, exist_ok=True)
    return cfg


def _manifest(args, cfg: RunConfig, command: str, extra=None):
    payload = {"command": command, "backend": backend_name(), "config": cfg.as_dict()}
    if extra:
        payload.update(extra)
    csvio.write_manifest(os.path.join(args.out, "run_manifest.json"), payload)


def _demo_shape(dim: int):
    if dim == 2:
        return Ball([0.0, 0.0], 1.0) - Ball([0.4, 0.3], 0.35, tag=-2)
    if dim == 3:
        return Ball([0.0, 0.0, 0.0], 1.0) - Ball([0.35, 0.0, 0.2], 0.4, tag=-2)
    raise ConfigError("fill-demo supports dim 2 or 3")


def cmd_fill_demo(args):
    cfg = _prepare(args)
    shape = _demo_shape(cfg.domain.dim)
    h = cfg.domain.h or (0.05 if cfg.domain.dim == 2 else 0.1)
    nodes = discretize_boundary(shape, h, seed=cfg.seed)
    nodes = fill_interior(nodes, shape, h, seed=cfg.seed)
    csvio.write_nodes_csv(os.path.join(args.out, "nodes.csv"), nodes)
    _manifest(args, cfg, "fill-demo")
    _say(args, f"{len(nodes)} nodes ({len(nodes.boundary_indices())} boundary) "
               f"written to {args.out}/nodes.csv")
    return 0


def cmd_approx_convergence(args):
    cfg = _prepare(args)
    rows = approximation_convergence(cfg.domain.resolutions)
    csvio.write_approx_csv(os.path.join(args.out, "approx_convergence.csv"), rows)
    _manifest(args, cfg, "approx-convergence")
    if not args.quiet:
        for name in classic_setups():
            sub = [(h, e) for s, h, e in rows if s == name]
            print(f"{name}: e_h from {sub[0][1]:.3e} (h={sub[0][0]:g}) "
                  f"to {sub[-1][1]:.3e} (h={sub[-1][0]:g})")
    return 0


def cmd_heat2d(args):
    cfg = _prepare(args)
    shape = Ball([0.0, 0.0], 1.0) - Ball([0.3, 0.0], 0.35, tag=-2)
    h = cfg.domain.h or 0.05
    nodes = discretize_boundary(shape, h, seed=cfg.seed)
    nodes = fill_interior(nodes, shape, h, seed=cfg.seed)
    if cfg.engine.kind:
        engine, n_st = make_engine(cfg, default_kind="wls", default_stencil=9)
    else:
        # boundary-value elimination needs a dominant self weight in the
        # normal derivative; a linear fit guarantees it, a quadratic does not
        engine = {
            "laplacian": WeightedLeastSquares(2, weight=GaussianWeight(1.0), solver="svd"),
            "gradient": WeightedLeastSquares(1, weight=GaussianWeight(1.0), solver="svd"),
        }
        n_st = cfg.engine.stencil or 9
    nodes = find_closest_stencils(nodes, n_st)
    store = compute_weights(nodes, engine, ["laplacian", "gradient"])

    dt = cfg.stepper.dt or 0.2 * h * h / (2.0 * 2.0 * cfg.stepper.diffusivity)
    u = run_heat_explicit(
        nodes, store,
        dt=dt, steps=cfg.stepper.steps, diffusivity=cfg.stepper.diffusivity,
        source=lambda pts, t: 5.0,
        dirichlet={-1: lambda pts, t: pts[:, 0]},
        neumann={-2: 0.0},
        initial=0.0,
    )
    csvio.write_field_csv(os.path.join(args.out, "field.csv"), nodes, u)
    _manifest(args, cfg, "heat2d", {"dt": dt, "steps": cfg.stepper.steps})
    _say(args, f"heat2d: {len(nodes)} nodes, {cfg.stepper.steps} steps of dt={dt:g}, "
               f"final range [{u.min():.4f}, {u.max():.4f}]")
    return 0


def cmd_convdiff3d(args):
    cfg = _prepare(args)
    shape = Box([0.0] * 3, [1.0] * 3) - Ball([0.5] * 3, 0.25, tag=-2)
    h = cfg.domain.h or 0.07
    nodes = discretize_boundary(shape, h, seed=cfg.seed)
    nodes = fill_interior(nodes, shape, h, seed=cfg.seed)
    engine, n_st = make_engine(cfg, default_kind="rbffd", default_stencil=35,
                               default_solver="lu")
    nodes = find_closest_stencils(nodes, n_st)
    store = compute_weights(nodes, engine, ["laplacian", "gradient"])

    # -2 lap(u) + 8 (2, 1, -1) . grad(u) = 1, u = 0 on all boundaries
    terms = [(-2.0, "laplacian"), (16.0, "d1_0"), (8.0, "d1_1"), (-8.0, "d1_2")]
    result = solve_poisson_implicit(
        nodes, store, terms=terms, rhs=1.0,
        dirichlet={-1: 0.0, -2: 0.0}, config=cfg.solver,
    )
    csvio.write_field_csv(os.path.join(args.out, "field.csv"), nodes, result.u)
    _manifest(args, cfg, "convdiff3d",
              {"iterations": result.iterations, "residual": result.residual})
    _say(args, f"convdiff3d: {len(nodes)} nodes, {result.iterations} iterations, "
               f"residual {result.residual:.2e}, peak {result.u.max():.5f}")
    return 0


def cmd_poisson_bench(args):
    cfg = _prepare(args)
    dim = cfg.domain.dim
    h_values = cfg.domain.h_values or ((0.08, 0.04, 0.02, 0.0095) if dim == 2
                                       else (0.16, 0.10, 0.066, 0.048))
    engine, n_st = make_engine(
        cfg, default_kind="rbffd",
        default_stencil=(9 if dim == 2 else 35), default_solver="lu",
    )
    records = poisson_convergence(
        dim, h_values, stencil_size=n_st, repetitions=cfg.bench.repetitions,
        seed=cfg.seed, engine=engine, solver_config=cfg.solver,
    )
    csvio.write_records_csv(os.path.join(args.out, "bench_records.csv"), records)
    csvio.write_errors_csv(os.path.join(args.out, "bench_errors.csv"), records)
    _manifest(args, cfg, "poisson-bench", {"dim": dim})
    order = order_vs_nodes([r.n_nodes for r in records],
                           [r.e_inf for r in records], dim)
    if not args.quiet:
        for r in records:
            print(f"N={r.n_nodes:>7}  h={r.h:<8g}  e_inf={r.e_inf:.4e}  "
                  f"total={r.timings.total():.2f}s")
        print(f"fitted order (vs N^(-1/{dim})): {order:.2f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="meshfree",
        description="strong-form meshless PDE toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "fill-demo": cmd_fill_demo,
        "approx-convergence": cmd_approx_convergence,
        "heat2d": cmd_heat2d,
        "convdiff3d": cmd_convdiff3d,
        "poisson-bench": cmd_poisson_bench,
    }
    for name, func in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override [run] seed")
        p.add_argument("--dim", type=int, choices=(2, 3), default=None,
                       help="override [domain] dim")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except MeshfreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
