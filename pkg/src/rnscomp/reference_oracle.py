"""Arbitrary-precision ground truth for the word-level algorithms.

Nothing here is counted by :class:`~rnscomp.rns_core.OpCounter`; these paths
exist to check the hot path, not to be fast.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .comparison import GEQ, LT, classic_compare, rns_compare
from .rns_core import RnsBase, RnsError, encode

EXHAUSTIVE_LIMIT = 10**4


class RedundantModulusTooSmall(RnsError):
    pass


class RangeTooLarge(RnsError):
    pass


@dataclass(frozen=True)
class CrtTerms:
    weighted_sum: int  # Y, the unreduced CRT sum
    k: int  # X = Y - k*M, 0 <= k < n
    dynamic_range: int

    @property
    def value(self) -> int:
        return self.weighted_sum - self.k * self.dynamic_range


def crt_terms(residues: Sequence[int], base: RnsBase) -> CrtTerms:
    M = base.dynamic_range
    y = sum(
        (x * inv % m) * Mi for x, m, (Mi, inv) in zip(residues, base.moduli, base.crt_weights)
    )
    return CrtTerms(y, y // M, M)


def crt_reconstruct(residues: Sequence[int], base: RnsBase) -> int:
    return crt_terms(residues, base).value


def brute_force_decode(residues: Sequence[int], base: RnsBase) -> int:
    """Linear scan of [0, M) for the residue vector; only for tiny bases."""
    target = tuple(residues)
    for x in range(base.dynamic_range):
        if all(x % m == r for m, r in zip(base.moduli, target)):
            return x
    raise ValueError("residue vector not found")


def shenoy_k(residues: Sequence[int], x_r: int, base: RnsBase) -> int:
    """Recover k in X = Y - k*M from the redundant residue x_r = X mod m_a.

    Reducing X = Y - k*M mod m_a gives k = (Y - x_r) * M^{-1} mod m_a; every
    term is word-sized.  k < n, so the result is exact only if m_a >= n and
    x_r is the genuine residue of the value.
    """
    ma = base.redundant_modulus
    if ma < base.n:
        raise RedundantModulusTooSmall(f"m_a = {ma} < n = {base.n}: k is not recoverable")
    y_mod = 0
    for x, m, (Mi, inv) in zip(residues, base.moduli, base.crt_weights):
        y_mod = (y_mod + (x * inv % m) * (Mi % ma)) % ma
    m_inv = pow(base.m_mod_ma, -1, ma)
    return (y_mod - x_r) * m_inv % ma


def shenoy_counterexample(base: RnsBase) -> tuple[int, int, int, int] | None:
    """First (N1, N2) with N1 < N2 where the naive redundant difference breaks k.

    Returns ``(N1, N2, true_k, wrong_k)``: the difference (N1 - N2) mod M is
    extended with x_r = (N1 mod m_a - N2 mod m_a) mod m_a instead of the true
    residue of the wrapped value.
    """
    M = base.dynamic_range
    ma = base.redundant_modulus
    for n2 in range(M):
        for n1 in range(n2):
            wrapped = (n1 - n2) % M
            res = [wrapped % m for m in base.moduli]
            true_k = crt_terms(res, base).k
            fake = (n1 % ma - n2 % ma) % ma
            got = shenoy_k(res, fake, base)
            if got != true_k:
                return n1, n2, true_k, got
    return None


@dataclass
class CheckReport:
    moduli: list[str]
    redundant: str
    pairs: int = 0
    failure_count: int = 0
    failures: list[dict] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def exhaustive_check(base: RnsBase, backend: str = "auto", max_failures: int = 100) -> CheckReport:
    """Sweep every ordered pair in [0, M)^2 through both comparison methods.

    ``backend="scalar"`` uses the instrumented per-pair functions; anything
    else uses the batched kernels (``"auto"`` picks the default kernel).
    """
    M = base.dynamic_range
    if M > EXHAUSTIVE_LIMIT:
        raise RangeTooLarge(f"M = {M} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}")
    report = CheckReport([str(m) for m in base.moduli], str(base.redundant_modulus))
    t0 = time.perf_counter()

    def fail(n1, n2, method, got):
        report.failure_count += 1
        if len(report.failures) < max_failures:
            report.failures.append({"n1": n1, "n2": n2, "method": method, "got": got})

    if backend == "scalar":
        vals = [encode(x, base) for x in range(M)]
        for n1 in range(M):
            for n2 in range(M):
                want = GEQ if n1 >= n2 else LT
                got = rns_compare(vals[n1], vals[n2], base)
                if got is not want:
                    fail(n1, n2, "rnscomp", str(got))
                got = classic_compare(vals[n1], vals[n2], base)
                if got is not want:
                    fail(n1, n2, "classic", str(got))
        report.pairs = M * M
    else:
        be = None if backend == "auto" else backend
        res, red = kernels.encode_batch(range(M), base)
        xs = np.arange(M)
        rows = max(1, 200_000 // M)
        for start in range(0, M, rows):
            n1 = np.repeat(xs[start:start + rows], M)
            n2 = np.tile(xs, len(n1) // M)
            want = n1 >= n2
            for method, got in (
                ("rnscomp", kernels.rns_compare_batch(res[n1], red[n1], res[n2], red[n2], base, be)),
                ("classic", kernels.classic_compare_batch(res[n1], res[n2], base, be)),
            ):
                for idx in np.nonzero(got != want)[0]:
                    fail(int(n1[idx]), int(n2[idx]), method, "GEQ" if got[idx] else "LT")
            report.pairs += len(n1)
    report.elapsed_s = time.perf_counter() - t0
    return report
