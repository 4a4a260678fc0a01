"""Compare the compiled and pure-Python kernels on parity solving and the counter product.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import sys
import time

import numpy as np

from delaycost import kernel
from delaycost.families import gen_bad_pair, gen_tradeoff_gradual
from delaycost.games import CostParityGame, build_fixed_lookahead_game


def random_game(rng, n, max_color=6, max_out=4):
    owner = [rng.randint(0, 1) for _ in range(n)]
    colors = [rng.randint(0, max_color) for _ in range(n)]
    edges = []
    for u in range(n):
        for v in rng.sample(range(n), rng.randint(1, max_out)):
            edges.append((u, v, rng.random() < 0.5))
    return CostParityGame.from_edges(owner, colors, edges)


def workloads():
    rng = random.Random(0)
    yield "random n=20000", random_game(rng, 20_000), 2
    yield "badpair(2) k=4", build_fixed_lookahead_game(gen_bad_pair(2), 4), 5
    yield "gradual(4) k=0", build_fixed_lookahead_game(gen_tradeoff_gradual(4), 0), 10


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if "compiled" not in kernel.BACKENDS:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`", file=sys.stderr)
    print(f"{'workload':<18} {'vertices':>9} {'kernel':<8} {'backend':<9} {'seconds':>9}")
    for name, G, b in workloads():
        odd = np.array(G.odd_colors(), dtype=np.int64)
        roots = np.array([G.initial], dtype=np.int64)
        for backend, impl in sorted(kernel.BACKENDS.items()):
            t_parity = best_of(lambda: impl.solve_parity(G.owner, G.colors, G.offsets, G.targets), args.repeat)
            t_product = best_of(lambda: impl.build_product(G.owner, G.colors, G.offsets, G.targets, G.incs, odd, b,
                                                           roots, 10**8), args.repeat)
            print(f"{name:<18} {G.n_vertices:>9} {'parity':<8} {backend:<9} {t_parity:>9.4f}")
            print(f"{name:<18} {G.n_vertices:>9} {'product':<8} {backend:<9} {t_product:>9.4f}")


if __name__ == "__main__":
    main()
