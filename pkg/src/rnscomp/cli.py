"""``rnscomp`` command line: gen-base, compare, selftest, bench.

Exit status: 0 when every check passes, 1 when a check fails, 2 for bad
input (unreadable or invalid base file, out-of-range operands).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time

import numpy as np

from . import kernels
from .bench import format_records, generate_base, random_operands, run_bench
from .comparison import GEQ, LT, classic_compare, rns_compare, rns_compare_trace
from .mixed_radix import mrc_convert, mrc_reconstruct
from .reference_oracle import crt_reconstruct, exhaustive_check
from .rns_core import RnsError, base_new, encode, load_base

log = logging.getLogger("rnscomp")

SMALL_BASES = [
    ((3, 5, 7), 11),
    ((2, 3), 5),
    ((3, 5, 7), 2),
    ((4, 5, 7, 9), 11),
    ((8, 3, 5), 7),
]

SCALAR_SUBSET = 2000


def _parse_ns(text: str) -> list[int]:
    try:
        ns = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad channel-count list {text!r}")
    if not ns or min(ns) < 2:
        raise argparse.ArgumentTypeError("channel counts must be >= 2")
    return ns


def cmd_gen_base(args) -> int:
    base = generate_base(args.n, args.bits, args.seed)
    text = base.to_json() + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_compare(args) -> int:
    base = load_base(args.base)
    try:
        x1, x2 = int(args.n1, 10), int(args.n2, 10)
    except ValueError as exc:
        raise RnsError(f"operands must be decimal integers: {exc}") from exc
    v1, v2 = encode(x1, base), encode(x2, base)
    tr = rns_compare_trace(v1, v2, base)
    print(tr.outcome)
    if args.dump_mrc:
        print(
            json.dumps(
                {
                    "delta": str(tr.delta),
                    "delta_prime": str(tr.delta_prime),
                    "differences": [str(z) for z in tr.differences],
                    "digits": tr.digits.to_list(),
                }
            )
        )
    return 0


def _random_suite(base, pairs: int, seed: int, backend) -> dict:
    """Seeded random pairs: batch kernels on all, scalar path on a prefix, bignum oracle."""
    rng = random.Random(seed)
    xs = random_operands(base, pairs, rng)
    ys = random_operands(base, pairs, rng)
    want = np.array([x >= y for x, y in zip(xs, ys)])
    r1, a1 = kernels.encode_batch(xs, base)
    r2, a2 = kernels.encode_batch(ys, base)
    bad_rns = int(np.count_nonzero(kernels.rns_compare_batch(r1, a1, r2, a2, base, backend) != want))
    bad_classic = int(np.count_nonzero(kernels.classic_compare_batch(r1, r2, base, backend) != want))
    bad_scalar = 0
    for x, y in zip(xs[:SCALAR_SUBSET], ys[:SCALAR_SUBSET]):
        v1, v2 = encode(x, base), encode(y, base)
        expect = GEQ if x >= y else LT
        bad_scalar += rns_compare(v1, v2, base) is not expect
        bad_scalar += classic_compare(v1, v2, base) is not expect
    bad_decode = 0
    for x in xs[:SCALAR_SUBSET]:
        res = encode(x, base).residues
        bad_decode += mrc_reconstruct(mrc_convert(res, base), base) != x
        bad_decode += crt_reconstruct(res, base) != x
    return {
        "pairs": pairs,
        "rnscomp_mismatches": bad_rns,
        "classic_mismatches": bad_classic,
        "scalar_mismatches": bad_scalar,
        "decode_mismatches": bad_decode,
    }


def cmd_selftest(args) -> int:
    failures = 0
    if not args.exhaustive_small and not args.base:
        args.exhaustive_small = True
    if args.exhaustive_small:
        for moduli, ma in SMALL_BASES:
            rep = exhaustive_check(base_new(moduli, ma), backend=args.backend or "auto")
            failures += rep.failure_count
            print(rep.to_json())
    if args.base:
        base = load_base(args.base)
        t0 = time.perf_counter()
        summary = _random_suite(base, args.pairs, args.seed, args.backend)
        summary["elapsed_s"] = round(time.perf_counter() - t0, 3)
        failures += sum(v for k, v in summary.items() if k.endswith("mismatches"))
        print(json.dumps(summary))
    print("selftest:", "PASS" if failures == 0 else f"FAIL ({failures} failures)")
    return 0 if failures == 0 else 1


def cmd_bench(args) -> int:
    records = run_bench(args.n, args.bits, args.trials, args.seed, args.backend)
    sys.stdout.write(format_records(records, args.format, args.itemized))
    bad = [r for r in records if not r.formula_ok]
    for r in bad:
        log.error("count mismatch: n=%d method=%s muls=%d adds=%d cmps=%d", r.n, r.method, r.mod_muls, r.mod_adds, r.word_cmps)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rnscomp", description="RNS comparison with one redundant modulus")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-base", help="generate a random pairwise-coprime base")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--bits", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen_base)

    c = sub.add_parser("compare", help="compare two integers, prints GEQ or LT")
    c.add_argument("--base", required=True)
    c.add_argument("n1")
    c.add_argument("n2")
    c.add_argument("--dump-mrc", action="store_true")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("selftest", help="exhaustive and randomized oracle checks")
    s.add_argument("--base")
    s.add_argument("--exhaustive-small", action="store_true")
    s.add_argument("--pairs", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--backend", choices=["numba", "numpy"])
    s.set_defaults(func=cmd_selftest)

    b = sub.add_parser("bench", help="instrumented operation counts and timings")
    b.add_argument("--n", type=_parse_ns, default=[2, 4, 8, 16, 32, 64])
    b.add_argument("--bits", type=int, default=60)
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--format", choices=["csv", "md"], default="csv")
    b.add_argument("--backend", choices=["scalar", "numba", "numpy"], default="scalar")
    b.add_argument("--itemized", action="store_true", help="append raw itemised count columns")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RnsError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
