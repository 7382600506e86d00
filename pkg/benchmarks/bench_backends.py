"""Timing comparison of the compiled and pure-python kernel backends.

Runs the three hot kernels head to head on identical inputs, then solves the
same synthetic city end to end under each backend in a subprocess (backend
choice is fixed at import time).  Results must agree exactly; the table only
reports how long each side took.

    python3 benchmarks/bench_backends.py          # reduced city, a few seconds
    python3 benchmarks/bench_backends.py --full   # 60-stop city on both backends
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from osdnp import compute_metrics
from osdnp._core import pykernels
from osdnp.synth import grid_city

try:
    from osdnp._core import _kernels
except ImportError:
    _kernels = None


def _random_csr(rng, n, avg_degree=4):
    """Symmetric CSR digraph with integer costs; both arc directions stored."""
    arcs = {}
    for a in range(1, n):
        b = rng.integers(0, a)
        cost = int(rng.integers(1, 50))
        arcs[(a, b)] = cost
        arcs[(b, a)] = cost
    for _ in range(n * max(avg_degree - 2, 0) // 2):
        a, b = rng.integers(0, n, size=2)
        if a == b:
            continue
        cost = int(rng.integers(1, 50))
        arcs[(int(a), int(b))] = cost
        arcs[(int(b), int(a))] = cost
    indptr = np.zeros(n + 1, dtype=np.int64)
    pairs = sorted(arcs)
    for a, _ in pairs:
        indptr[a + 1] += 1
    indptr = np.cumsum(indptr)
    indices = np.array([b for _, b in pairs], dtype=np.int64)
    weights = np.array([arcs[p] for p in pairs], dtype=np.int64)
    return indptr, indices, weights


def _time(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def _bench_paths(impl, n, repeat):
    rng = np.random.default_rng(n)
    indptr, indices, weights = _random_csr(rng, n)
    sources = np.arange(n, dtype=np.int64)
    return _time(lambda: impl.shortest_path_rows(n, indptr, indices, weights, sources), repeat)


def _bench_node_eval(impl, metrics, masks, repeat):
    n_u = len(metrics.cand_ptr) - 1
    best_d = np.empty(n_u, dtype=np.int64)
    best_stop = np.empty(n_u, dtype=np.int32)
    second_d = np.empty(n_u, dtype=np.int64)

    def run():
        for mask in masks:
            impl.node_eval(
                metrics.cand_ptr, metrics.cand_idx, metrics.cand_d, mask,
                metrics.weight_arr, metrics.pair_cap, best_d, best_stop, second_d,
            )

    return _time(run, repeat)


def _bench_min_access(impl, metrics, masks, repeat):
    access = np.array(
        [[int(t) for t in row] for row in metrics.instance.access], dtype=np.int64
    )
    out = np.empty(access.shape[0], dtype=np.int64)

    def run():
        for mask in masks:
            impl.min_access(access, mask.astype(bool), out)

    return _time(run, repeat)


def _solve_subprocess(pure, city_kwargs):
    code = (
        "import json, time\n"
        "from osdnp import backend, compute_metrics\n"
        "from osdnp.synth import grid_city\n"
        "from osdnp.solve import bnb_solve\n"
        f"metrics = compute_metrics(grid_city(**{city_kwargs!r}))\n"
        "t0 = time.monotonic()\n"
        "report = bnb_solve(metrics)\n"
        "print(json.dumps({'backend': backend(), 'wall': time.monotonic() - t0,\n"
        "                  'twt': report.best.twt, 'nodes': report.nodes_explored}))\n"
    )
    env = dict(os.environ)
    env.pop("OSDNP_PURE_PYTHON", None)
    if pure:
        env["OSDNP_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def _row(label, compiled, pure):
    ratio = "" if compiled is None else f"{pure / compiled:6.1f}x"
    left = "   n/a" if compiled is None else f"{compiled * 1e3:9.2f}"
    print(f"  {label:<34}{left}  {pure * 1e3:9.2f}  {ratio}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--full", action="store_true", help="solve the 60-stop city end to end")
    parser.add_argument("--repeat", type=int, default=5, help="timing repeats, best-of")
    args = parser.parse_args(argv)

    if _kernels is None:
        print("compiled backend not importable; timing the pure backend alone")

    city_kwargs = {} if args.full else {"cols": 7, "rows": 4, "n_u": 50, "od_pairs": 150}
    metrics = compute_metrics(grid_city(**city_kwargs))
    rng = np.random.default_rng(0)
    n_t = len(metrics.instance.stops)
    masks = [
        (rng.random(n_t) < 0.3).astype(np.uint8) for _ in range(2000)
    ]

    print(f"kernel timings, best of {args.repeat} (ms)")
    print(f"  {'kernel':<34}{'compiled':>9}  {'pure':>9}  speedup")
    for n in (60, 300):
        pure = _bench_paths(pykernels, n, args.repeat)
        compiled = None if _kernels is None else _bench_paths(_kernels, n, args.repeat)
        _row(f"shortest_path_rows n={n}", compiled, pure)
    pure = _bench_node_eval(pykernels, metrics, masks, args.repeat)
    compiled = None if _kernels is None else _bench_node_eval(_kernels, metrics, masks, args.repeat)
    _row(f"node_eval x{len(masks)} (n_t={n_t})", compiled, pure)
    pure = _bench_min_access(pykernels, metrics, masks, args.repeat)
    compiled = None if _kernels is None else _bench_min_access(_kernels, metrics, masks, args.repeat)
    _row(f"min_access x{len(masks)}", compiled, pure)

    print()
    label = "60-stop city" if args.full else "28-stop city"
    print(f"end-to-end exact solve, {label} (one run each)")
    runs = [_solve_subprocess(False, city_kwargs)]
    runs.append(_solve_subprocess(True, city_kwargs))
    for run in runs:
        print(
            f"  {run['backend']:<10} wall {run['wall']:7.2f}s   "
            f"twt {run['twt']}   nodes {run['nodes']}"
        )
    if runs[0]["twt"] != runs[1]["twt"] or runs[0]["nodes"] != runs[1]["nodes"]:
        print("  MISMATCH: backends disagree")
        return 1
    print("  backends agree on objective and node count")
    return 0


if __name__ == "__main__":
    sys.exit(main())
