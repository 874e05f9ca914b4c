"""Throughput of the batched comparison kernels, numba vs pure numpy.

    python benchmarks/bench_backends.py --n 4,8,16,32 --pairs 20000

Both backends are checked against each other and against integer comparison
before timing.  JIT compilation is excluded by a warm-up call.
"""

import argparse
import random
import time

import numpy as np

from rnscomp import kernels
from rnscomp.bench import generate_base, random_operands


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", default="4,8,16,32")
    ap.add_argument("--bits", type=int, default=60)
    ap.add_argument("--pairs", type=int, default=20_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    print(f"{'n':>4} {'method':>8} " + " ".join(f"{b + ' ns/pair':>16}" for b in backends) + f" {'speedup':>8}")
    for n in [int(t) for t in args.n.split(",")]:
        rng = random.Random(args.seed + n)
        base = generate_base(n, args.bits, rng.getrandbits(32))
        xs = random_operands(base, args.pairs, rng)
        ys = random_operands(base, args.pairs, rng)
        want = np.array([x >= y for x, y in zip(xs, ys)])
        r1, a1 = kernels.encode_batch(xs, base)
        r2, a2 = kernels.encode_batch(ys, base)
        jobs = {
            "rnscomp": lambda be: kernels.rns_compare_batch(r1, a1, r2, a2, base, be),
            "classic": lambda be: kernels.classic_compare_batch(r1, r2, base, be),
        }
        for method, job in jobs.items():
            per_pair = []
            for be in backends:
                assert (job(be) == want).all(), (n, method, be)
                per_pair.append(best_of(lambda: job(be), args.repeats) / args.pairs * 1e9)
            speed = f"{per_pair[0] / per_pair[-1]:8.1f}" if len(per_pair) > 1 else f"{'-':>8}"
            print(f"{n:>4} {method:>8} " + " ".join(f"{t:16.1f}" for t in per_pair) + f" {speed}")


if __name__ == "__main__":
    main()
