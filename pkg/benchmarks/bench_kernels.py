"""Benchmark the compiled kernel backend against the pure-Python twin.

Times the wave functions and the three star-parameter solvers on a fixed
batch of randomized subsonic inputs, then a junction Newton solve through
each backend.

Run from the repository root:

    python benchmarks/bench_kernels.py [--n 200000]
"""

import argparse
import time

import numpy as np

import gasnet._kernels_py as pk

try:
    import gasnet._kernels as ck
except ImportError:
    ck = None

GAMMA = 1.4


def bench_wave_functions(mod, inputs):
    t0 = time.perf_counter()
    acc = 0.0
    for x, base, aux in inputs:
        acc += mod.theta2(x, base, aux, GAMMA)
        acc += mod.theta3(x, base, aux, GAMMA)
        acc += mod.psi(x, base, aux, GAMMA)
        acc += mod.phi(x, base, aux, GAMMA)
        acc += mod.dtheta2(x, base, aux, GAMMA)
        acc += mod.dpsi(x, base, aux, GAMMA)
    return time.perf_counter() - t0, acc


def bench_star_solvers(mod, problems):
    t0 = time.perf_counter()
    acc = 0.0
    for rho_l, u_l, p_l, rho_r, u_r, p_r in problems:
        p, _ = mod.solve_p_star_m1(rho_l, u_l, p_l, rho_r, u_r, p_r,
                                   GAMMA, 1e-10, 100)
        acc += p
        r, _ = mod.solve_rho_star_m2(rho_l, u_l, rho_r, u_r, 1.0, GAMMA, 1e-10, 100)
        acc += r
        r, _ = mod.solve_rho_star_m3(rho_l, rho_l * u_l, rho_r, rho_r * u_r,
                                     1.0, GAMMA, 1e-10, 100)
        acc += r
    return time.perf_counter() - t0, acc


def bench_junction(n_solves):
    from gasnet import GasConstants, Model, iso_state
    from gasnet.junction import JunctionProblem, PipeSpec, solve_junction

    g = GasConstants(gamma=GAMMA, R=1.0)
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    for _ in range(n_solves):
        st_in = iso_state(Model.M2, 1.0 + 0.01 * rng.uniform(-1, 1), -0.4, 1.0)
        st_out = iso_state(Model.M3, 1.05, 0.35, 1.0)
        prob = JunctionProblem([
            (PipeSpec("a", 2.0, Model.M2), st_in),
            (PipeSpec("b", 1.1, Model.M3), st_out),
            (PipeSpec("c", 1.1, Model.M3), st_out),
        ], g)
        solve_junction(prob)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000,
                    help="number of wave-function evaluations")
    ap.add_argument("--solves", type=int, default=20_000,
                    help="number of star solves per model")
    ap.add_argument("--junctions", type=int, default=500,
                    help="junction Newton solves per backend")
    ap.add_argument("--junction-only", action="store_true",
                    help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.junction_only:
        from gasnet import backend_name

        t = bench_junction(args.junctions)
        print(f"junction solves ({backend_name():<7}): {t:.3f} s "
              f"({args.junctions / t:.0f}/s)")
        return

    rng = np.random.default_rng(42)
    inputs = [(x, b, a) for x, b, a in zip(rng.uniform(0.2, 3.0, args.n),
                                           rng.uniform(0.3, 3.0, args.n),
                                           rng.uniform(0.3, 3.0, args.n))]
    problems = [tuple(row) for row in np.column_stack([
        rng.uniform(0.3, 3.0, args.solves), rng.uniform(-0.4, 0.4, args.solves),
        rng.uniform(0.3, 3.0, args.solves), rng.uniform(0.3, 3.0, args.solves),
        rng.uniform(-0.4, 0.4, args.solves), rng.uniform(0.3, 3.0, args.solves)])]

    rows = []
    backends = [("python", pk)] + ([("cython", ck)] if ck is not None else [])
    for name, mod in backends:
        t_wave, acc1 = bench_wave_functions(mod, inputs)
        t_star, acc2 = bench_star_solvers(mod, problems)
        rows.append((name, t_wave, t_star, acc1 + acc2))

    print(f"{'backend':<10} {'wave fns':>12} {'star solves':>12}", flush=True)
    for name, t_wave, t_star, _ in rows:
        print(f"{name:<10} {t_wave:>10.3f} s {t_star:>10.3f} s", flush=True)
    if len(rows) == 2:
        print(f"{'speedup':<10} {rows[0][1] / rows[1][1]:>11.1f}x "
              f"{rows[0][2] / rows[1][2]:>11.1f}x", flush=True)
        assert abs(rows[0][3] - rows[1][3]) <= 1e-6 * max(abs(rows[0][3]), 1.0), \
            "backend results drifted apart"

    # the backend is fixed at import time, so the junction comparison runs
    # in fresh interpreters
    import os
    import subprocess
    import sys

    for name in ("cython", "python"):
        if name == "cython" and ck is None:
            continue
        env = dict(os.environ)
        if name == "python":
            env["GASNET_PURE_PYTHON"] = "1"
        else:
            env.pop("GASNET_PURE_PYTHON", None)
        subprocess.run([sys.executable, __file__, "--junction-only",
                        "--junctions", str(args.junctions)],
                       env=env, check=True)


if __name__ == "__main__":
    main()
