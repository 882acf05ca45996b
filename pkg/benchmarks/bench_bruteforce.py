"""Benchmark: compiled kernel vs pure-Python twin on the exhaustive sweeps.

Usage:  python benchmarks/bench_bruteforce.py

Each case runs the coboundary-constant search with both backends and checks
that the values agree.
"""

import time

from hdxcones.expansion import coboundary_constant, kernel_backend
from hdxcones.simplicial import Complex


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def main():
    if kernel_backend() != "compiled":
        print("compiled kernel unavailable; nothing to compare")
        return
    from hdxcones.buildings import opposition_an, standard_flag
    from hdxcones.fqlinalg import GF

    F2 = GF(2)
    cases = [
        ("filled triangle, k=1, Z/2", Complex.simplex(3), 1, 2),
        ("octahedron, k=1, Z/2", Complex.octahedron(), 1, 2),
        ("octahedron, k=0, Z/3", Complex.octahedron(), 0, 3),
        ("4-simplex, k=1, Z/2", Complex.simplex(5), 1, 2),
        ("A2 opposition / F2, k=0, Z/2",
         opposition_an(F2, 3, standard_flag(F2, 3)), 0, 2),
        ("A2 opposition / F3, k=0, Z/2",
         __import__("hdxcones.buildings", fromlist=["opposition_an"]).opposition_an(
             GF(3), 3, standard_flag(GF(3), 3)), 0, 2),
    ]
    print(f"{'case':38s} {'compiled':>10s} {'pure':>10s} {'speedup':>8s}")
    for name, X, k, m in cases:
        (h_fast, _), t_fast = timed(lambda: coboundary_constant(X, k, m))
        (h_slow, _), t_slow = timed(
            lambda: coboundary_constant(X, k, m, force_pure=True)
        )
        assert h_fast == h_slow, (name, h_fast, h_slow)
        print(f"{name:38s} {t_fast:9.4f}s {t_slow:9.4f}s {t_slow/t_fast:7.1f}x")


if __name__ == "__main__":
    main()
