"""Compare the compiled kernels against the plain numpy fallback.

Runs the hot pipeline stages (interior fill, stencil search, stencil
weight computation) in fresh subprocesses, once with MESHFREE_NUMBA=1
and once with MESHFREE_NUMBA=0, and reports median stage times.  The
two backends produce bitwise-identical results; only speed differs.

    python3 benchmarks/backend_bench.py --h 0.02 --repeats 3
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_stages(h, dim, repeats):
    import numpy as np

    from meshfree import (Ball, Polyharmonic, RbfFd, compute_weights,
                          discretize_boundary, fill_interior,
                          find_closest_stencils)
    from meshfree.config import backend_name

    shape = Ball([0.0] * dim, 1.0)
    stencil = 9 if dim == 2 else 35
    # lu takes the batched kernel; other solvers go through the per-node loop
    engine = RbfFd(Polyharmonic(3), degree=2, solver="lu")

    def one_pass():
        t = {}
        start = time.perf_counter()
        nodes = discretize_boundary(shape, h, seed=0)
        nodes = fill_interior(nodes, shape, h, seed=0)
        t["fill"] = time.perf_counter() - start
        start = time.perf_counter()
        nodes = find_closest_stencils(nodes, stencil)
        t["stencils"] = time.perf_counter() - start
        start = time.perf_counter()
        compute_weights(nodes, engine, ["laplacian", "gradient"])
        t["weights"] = time.perf_counter() - start
        return len(nodes), t

    one_pass()  # warm caches and jit
    n_nodes, _ = one_pass()
    runs = [one_pass()[1] for _ in range(repeats)]
    stages = {k: float(np.median([r[k] for r in runs])) for k in runs[0]}
    return {"backend": backend_name(), "n_nodes": n_nodes, "stages": stages}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--h", type=float, default=0.02, help="nodal spacing")
    parser.add_argument("--dim", type=int, default=2, choices=(2, 3))
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    if args.worker:
        print(json.dumps(run_stages(args.h, args.dim, args.repeats)))
        return 0

    results = {}
    for flag in ("1", "0"):
        env = dict(os.environ, MESHFREE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, __file__, "--worker", "--h", str(args.h),
             "--dim", str(args.dim), "--repeats", str(args.repeats)],
            env=env, check=True, capture_output=True, text=True,
        )
        data = json.loads(out.stdout.splitlines()[-1])
        results[data["backend"]] = data

    fast, slow = results["numba"], results["numpy"]
    print(f"N = {fast['n_nodes']} nodes, dim = {args.dim}, "
          f"median of {args.repeats} runs\n")
    print(f"{'stage':<10} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for stage in fast["stages"]:
        a, b = fast["stages"][stage], slow["stages"][stage]
        print(f"{stage:<10} {a:>9.4f}s {b:>9.4f}s {b / a:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
