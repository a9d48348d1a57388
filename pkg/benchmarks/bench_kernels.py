"""Sweep-kernel benchmark: compiled extension vs numpy fallback.

Times the three kernel operations on representative problems and a full
eigenvalue bisection, and checks that the two backends agree.

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from eigenmp import _kernels_py, kernels, zoo
from eigenmp.domains import build_grid, disk, interval, rectangle
from eigenmp.eigen import SolverParams, blowup_eigenvalue
from eigenmp.scheme import DiscreteScheme

PROBLEMS = [
    ("linear 1D n=400", "neg_u_xx", interval(0, 1), 1 / 400, 0.0),
    ("drift 1D n=400", "neg_two_x_drift", interval(0, 1), 1 / 400, 0.05),
    ("linear 2D 80x80", "neg_laplace_2d", rectangle(0, 1, 0, 1), 1 / 80, 0.0),
    ("grushin 2D 40x20", "grushin", rectangle(-1, 1, 0, 1), 1 / 20, 0.0),
    ("pk1 disk h=1/30", "neg_pk_1", disk(0, 0, 1), 1 / 30, 0.0),
    ("pucci disk h=1/20", "pucci_max_degenerate", disk(0, 0, 1), 1 / 20, 0.0),
    ("eikonal 1D n=400", "eikonal_coercive", interval(0, 1), 1 / 400, 0.0),
    ("p-laplacian n=400", "p_laplacian_3", interval(0, 1), 1 / 400, 0.0),
]


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sweeps(repeats):
    backends = [("python", _kernels_py)]
    if kernels.HAVE_COMPILED:
        from eigenmp import _speedups

        backends.append(("compiled", _speedups))
    print("%-20s %-14s %12s %12s %12s" % ("problem", "backend", "residual", "blowup", "descent"))
    for label, name, dom, h, eps in PROBLEMS:
        sch = DiscreteScheme(zoo.get(name).spec, build_grid(dom, h), viscous_eps=eps)
        cp = sch.compiled()
        rng = np.random.default_rng(0)
        u = cp.state()
        u[:-1] = rng.uniform(0.0, 1.0, cp.grid.size)
        ref = None
        for bname, mod in backends:
            tr = _time(lambda: mod.residual(cp, u), repeats)
            tb = _time(lambda: mod.blowup_sweep(cp, u, 0.5, 1.0), repeats)
            td = _time(lambda: mod.descent_sweep(cp, u, 0.0), repeats)
            out = mod.blowup_sweep(cp, u, 0.5, 1.0)
            if ref is None:
                ref = out
            else:
                assert np.allclose(ref, out, rtol=1e-9, atol=1e-9), label
            print("%-20s %-14s %10.1fus %10.1fus %10.1fus"
                  % (label, bname, tr * 1e6, tb * 1e6, td * 1e6))
        print()


def bench_end_to_end():
    print("end-to-end: nonlinear eigenvalue bisection (pk1 on the disk, h=1/24)")
    sch = DiscreteScheme(zoo.get("neg_pk_1").spec, build_grid(disk(0, 0, 1), 1 / 24))
    for bname in ("python", "compiled") if kernels.HAVE_COMPILED else ("python",):
        kernels.use_backend(bname)
        t0 = time.perf_counter()
        est = blowup_eigenvalue(sch, lambda_cap=10.0, tol=0.1,
                                params=SolverParams(max_sweeps=30000))
        dt = time.perf_counter() - t0
        print("  %-10s %6.2fs  bracket (%.4g, %.4g)" % (bname, dt, *est.bracket))
    kernels.use_backend(None)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    print("compiled extension available:", kernels.HAVE_COMPILED)
    bench_sweeps(args.repeats)
    bench_end_to_end()
