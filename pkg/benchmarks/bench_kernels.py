"""Compiled kernels versus their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0] [--max-rows 30]

Times the simplex pivot loop on random dense LPs and active-set vertex
enumeration on random ball polytopes, and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from ambiball.kernels import get_backend
from ambiball.oracle import ball_hrep_prokhorov, random_instance


def lp_tableau(rng, m, n):
    """``max c x`` s.t. ``A x <= b``, ``x >= 0`` with a feasible slack basis."""
    A = rng.random((m, n))
    b = rng.random(m) + 1.0
    c = rng.random(n)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = np.arange(n, n + m, dtype=np.intp)
    return T, basis


def vertex_problem(rng, max_rows):
    while True:
        center = random_instance(rng, points=(7, 8), centers=(2, 3))
        poly = ball_hrep_prokhorov(center)
        eq = list(poly.eq_rows)
        rows = list(poly.ineq_rows)
        E = np.ascontiguousarray(poly.A[eq], dtype=float)
        f = np.ascontiguousarray(poly.b[eq], dtype=float)
        A = np.ascontiguousarray(poly.A[rows], dtype=float)
        b = np.ascontiguousarray(poly.b[rows], dtype=float)
        s = poly.dimension - len(eq)
        if len(rows) <= max_rows:
            return E, f, A, b, s


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_pivot(backends, rng, repeat):
    print("pivot_loop (dense LP, m x n)")
    for m, n in [(20, 40), (60, 120), (150, 300)]:
        T0, basis0 = lp_tableau(rng, m, n)
        row = f"  {m:>4} x {n:<4}"
        results, times = {}, {}
        for name, mod in backends.items():
            def run():
                T, basis = T0.copy(), basis0.copy()
                status, it = mod.pivot_loop(T, basis, n + m, 1e-10, 10_000)
                return T[m, -1], it
            times[name], results[name] = best_of(run, repeat)
            row += f"  {name}: {times[name] * 1e3:8.2f} ms"
        values = [v for v, _ in results.values()]
        row += f"  iterations {next(iter(results.values()))[1]}  agree {np.allclose(values, values[0])}"
        row += _speedup(times)
        print(row)


def _speedup(times):
    if len(times) < 2:
        return ""
    return f"  speedup {times['python'] / times['cython']:6.1f}x"


def bench_vertices(backends, rng, repeat, max_rows):
    print(f"active_set_vertices (random ball polytopes, at most {max_rows} rows)")
    for _ in range(3):
        E, f, A, b, s = vertex_problem(rng, max_rows)
        row = f"  rows {A.shape[0]:>3} dim {A.shape[1]} active {s}"
        found, times = {}, {}
        for name, mod in backends.items():
            times[name], (V, _) = best_of(lambda: mod.active_set_vertices(E, f, A, b, s, 1e-10, 1e-9), repeat)
            found[name] = {tuple(np.round(v, 9)) for v in V}
            row += f"  {name}: {times[name] * 1e3:8.2f} ms"
        sets = list(found.values())
        row += f"  solutions {len(sets[0])}  agree {all(x == sets[0] for x in sets)}"
        row += _speedup(times)
        print(row)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-rows", type=int, default=30, help="largest polytope for the vertex benchmark")
    args = ap.parse_args()
    backends = {"python": get_backend("python")}
    try:
        backends["cython"] = get_backend("cython")
    except ImportError:
        print("compiled kernels not built; timing the fallback only")
    rng = np.random.default_rng(args.seed)
    bench_pivot(backends, rng, args.repeat)
    bench_vertices(backends, rng, args.repeat, args.max_rows)


if __name__ == "__main__":
    main()
