"""Base generation, seeded operand streams and the instrumented benchmark."""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .comparison import (
    classic_compare,
    classic_compare_batch,
    classic_formula_muls,
    rns_compare,
    rns_compare_batch,
    rns_formula_muls,
)
from .rns_core import WORD_LIMIT, OpCounter, RnsBase, RnsError, base_new, counting, encode

CSV_COLUMNS = ["n", "method", "mod_muls", "mod_adds", "word_cmps", "median_ns", "trials", "seed"]
ITEMIZED_COLUMNS = ["raw_mod_muls", "reductions", "mrc_subs"]
SMALL_POOL = 1 << 16


class GenerationFailed(RnsError):
    pass


def generate_base(n: int, bits: int, seed: int) -> RnsBase:
    """n pairwise-coprime moduli of exactly ``bits`` bits plus a redundant modulus.

    Narrow widths shuffle the whole range and pick greedily; wide widths draw
    random odd candidates.  The redundant modulus comes from the same stream
    when possible, otherwise it is the nearest coprime value outside the range.
    """
    if n < 2:
        raise GenerationFailed("need n >= 2")
    if not 2 <= bits <= 63:
        raise GenerationFailed("bits must lie in [2, 63]")
    rng = random.Random(seed)
    lo = max(2, 1 << (bits - 1))
    hi = 1 << bits
    if hi - lo <= SMALL_POOL:
        pool = list(range(lo, hi))
        rng.shuffle(pool)
        candidates = iter(pool)
    else:
        attempts = 64 * (n + 1) + 1000
        candidates = (rng.randrange(lo, hi) | 1 for _ in range(attempts))

    chosen: list[int] = []
    prod = 1
    for c in candidates:
        if math.gcd(c, prod) == 1:
            chosen.append(c)
            prod *= c
            if len(chosen) == n + 1:
                break
    if len(chosen) < n:
        raise GenerationFailed(f"only {len(chosen)} coprime {bits}-bit moduli found, need {n}")
    if len(chosen) == n:
        step, c = (1, hi) if hi < WORD_LIMIT else (-1, lo - 1)
        while c >= 2 and math.gcd(c, prod) != 1:
            c += step
        if c < 2:
            raise GenerationFailed("no coprime redundant modulus found")
        chosen.append(c)
    return base_new(chosen[:n], chosen[n])


def random_operands(base: RnsBase, count: int, rng: random.Random) -> list[int]:
    """Uniform integers in [0, M) by rejection sampling over M's bit width."""
    M = base.dynamic_range
    width = M.bit_length()
    out = []
    while len(out) < count:
        x = rng.getrandbits(width)
        if x < M:
            out.append(x)
    return out


@dataclass
class BenchRecord:
    n: int
    modulus_bits: int
    method: str
    mod_muls: int  # initial redundant reduction charged as one multiplication
    mod_adds: int
    word_cmps: int
    median_ns: float
    trials: int
    seed: int
    raw_mod_muls: int
    reductions: int
    mrc_subs: int
    input_independent: bool
    formula_ok: bool

    def row(self, itemized: bool = False) -> list:
        d = asdict(self)
        d["median_ns"] = round(self.median_ns, 1)
        cols = CSV_COLUMNS + (ITEMIZED_COLUMNS if itemized else [])
        return [d[c] for c in cols]


def expected_counts(method: str, n: int) -> tuple[int, int, int]:
    if method == "rnscomp":
        return rns_formula_muls(n), 2 * n, 1
    return classic_formula_muls(n), 0, n


def _record(n, bits, method, per_call: list[OpCounter], times, trials, seed) -> BenchRecord:
    first = per_call[0]
    independent = all(c == first for c in per_call)
    rec = BenchRecord(
        n=n,
        modulus_bits=bits,
        method=method,
        mod_muls=first.table_muls,
        mod_adds=first.mod_adds,
        word_cmps=first.word_comparisons,
        median_ns=float(statistics.median(times)),
        trials=trials,
        seed=seed,
        raw_mod_muls=first.mod_muls,
        reductions=first.reductions,
        mrc_subs=first.mrc_subs,
        input_independent=independent,
        formula_ok=False,
    )
    rec.formula_ok = independent and (rec.mod_muls, rec.mod_adds, rec.word_cmps) == expected_counts(method, n)
    return rec


def bench_one(n: int, bits: int, trials: int, seed: int, backend: str = "scalar", warmup: int = 50) -> list[BenchRecord]:
    """Time and count both methods for one channel count; one record per method."""
    rng = random.Random(seed * 1_000_003 + n)
    base = generate_base(n, bits, rng.getrandbits(64))
    xs = random_operands(base, trials, rng)
    ys = random_operands(base, trials, rng)
    if backend == "scalar":
        return _bench_scalar(base, xs, ys, bits, trials, seed, warmup)
    return _bench_batch(base, xs, ys, bits, trials, seed, backend)


def _bench_scalar(base, xs, ys, bits, trials, seed, warmup) -> list[BenchRecord]:
    n = base.n
    v1 = [encode(x, base) for x in xs]
    v2 = [encode(y, base) for y in ys]
    out = []
    for method, fn in (("rnscomp", rns_compare), ("classic", classic_compare)):
        per_call = []
        for a, b in zip(v1, v2):
            with counting() as ops:
                fn(a, b, base)
            per_call.append(ops)
        for a, b in zip(v1[:warmup], v2[:warmup]):
            fn(a, b, base)
        times = []
        clock = time.perf_counter_ns
        for a, b in zip(v1, v2):
            t0 = clock()
            fn(a, b, base)
            times.append(clock() - t0)
        out.append(_record(n, bits, method, per_call, times, trials, seed))
    return out


def _bench_batch(base, xs, ys, bits, trials, seed, backend, repeats: int = 7) -> list[BenchRecord]:
    n = base.n
    r1, a1 = kernels.encode_batch(xs, base)
    r2, a2 = kernels.encode_batch(ys, base)
    runs = {
        "rnscomp": lambda: rns_compare_batch(r1, a1, r2, a2, base, backend),
        "classic": lambda: classic_compare_batch(r1, r2, base, backend),
    }
    out = []
    for method, fn in runs.items():
        fn()  # warm-up, also triggers JIT compilation
        with counting() as total:
            fn()
        per = OpCounter(*(v // trials for v in total.as_dict().values()))
        exact = all(v % trials == 0 for v in total.as_dict().values())
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter_ns()
            fn()
            times.append((time.perf_counter_ns() - t0) / trials)
        rec = _record(n, bits, method, [per], times, trials, seed)
        rec.input_independent = rec.input_independent and exact
        rec.formula_ok = rec.formula_ok and exact
        out.append(rec)
    return out


def run_bench(ns, bits: int, trials: int, seed: int, backend: str = "scalar") -> list[BenchRecord]:
    records = []
    for n in ns:
        records.extend(bench_one(n, bits, trials, seed, backend))
    return records


def format_records(records: list[BenchRecord], fmt: str = "csv", itemized: bool = False) -> str:
    cols = CSV_COLUMNS + (ITEMIZED_COLUMNS if itemized else [])
    rows = [r.row(itemized) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(str(v) for v in row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def scaling_exponent(ns, counts) -> float:
    """Least-squares slope of log(count) against log(n)."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(counts, float)), 1)
    return float(slope)
