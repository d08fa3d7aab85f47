"""Compare the compiled bitmask kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import random
import timeit

from frugality import _kernels_py

try:
    from frugality import _kernels as compiled
except ImportError:
    compiled = None


def random_graph_masks(rng, n, p):
    return [(1 << u) | (1 << v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def cases(rng):
    g14 = random_graph_masks(rng, 14, 0.4)
    g18 = random_graph_masks(rng, 18, 0.3)
    sets = [rng.getrandbits(24) | 1 for _ in range(3000)]
    return [
        ("vertex_cover_masks n=14 all", "vertex_cover_masks", (14, g14, False, 10**6)),
        ("vertex_cover_masks n=18 minimal", "vertex_cover_masks", (18, g18, True, 10**6)),
        ("minimal_masks 3000 sets", "minimal_masks", (sets,)),
        ("dominance_keep 3000 sets", "dominance_keep", (sets,)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the Python timings are shown")
    print(f"{'case':34} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for label, name, call_args in cases(random.Random(args.seed)):
        py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(*call_args), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{label:34} {py:10.4f} {'-':>11} {'-':>8}")
            continue
        assert getattr(compiled, name)(*call_args) == getattr(_kernels_py, name)(*call_args)
        cy = min(timeit.repeat(lambda: getattr(compiled, name)(*call_args), number=1, repeat=args.repeat))
        print(f"{label:34} {py:10.4f} {cy:11.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
