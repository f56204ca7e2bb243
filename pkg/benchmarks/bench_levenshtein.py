#!/usr/bin/env python3
"""Times the compiled edit-distance kernel against the pure-Python fallback.

Usage: python benchmarks/bench_levenshtein.py [--pairs N] [--max-len N]
"""

import argparse
import random
import string
import time

from phishcode import distance


def make_pairs(rng, n_pairs, max_len):
    alphabet = string.ascii_lowercase + "    "
    out = []
    for _ in range(n_pairs):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
        out.append((a, b))
    return out


def bench(fn, pairs, repeats=3):
    best = float("inf")
    checksum = 0
    for _ in range(repeats):
        start = time.perf_counter()
        checksum = 0
        for a, b in pairs:
            checksum += fn(a, b)
        best = min(best, time.perf_counter() - start)
    return best, checksum


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=20_000)
    parser.add_argument("--max-len", type=int, default=60)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    pairs = make_pairs(random.Random(args.seed), args.pairs, args.max_len)
    py_time, py_sum = bench(distance._levenshtein_py, pairs)
    rows = [("pure python", py_time, py_sum)]
    if distance._levenshtein_c is not None:
        c_time, c_sum = bench(distance._levenshtein_c, pairs)
        assert c_sum == py_sum, "backends disagree"
        rows.append(("compiled", c_time, c_sum))
    else:
        print("compiled kernel not built; showing pure python only")

    print(f"\n{args.pairs} random pairs, strings up to {args.max_len} chars "
          f"(active backend: {distance.BACKEND})\n")
    print(f"{'backend':<12} {'seconds':>9} {'pairs/sec':>12}")
    for name, seconds, _ in rows:
        print(f"{name:<12} {seconds:>9.3f} {args.pairs / seconds:>12.0f}")
    if len(rows) == 2:
        print(f"\nspeedup: {rows[0][1] / rows[1][1]:.1f}x")


if __name__ == "__main__":
    main()
