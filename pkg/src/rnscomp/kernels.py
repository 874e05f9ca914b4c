"""Batched uint64 kernels for comparison over many operand pairs.

Two interchangeable backends compute bit-identical results:

* ``numba``: scalar loops compiled with ``@njit``.
* ``numpy``: the same arithmetic vectorised over the pair axis (and, inside
  the mixed-radix conversion, over the channel axis).

Set ``RNSCOMP_NO_NUMBA=1`` to force the numpy path; it is also used when
numba cannot be imported.

Moduli are below 2^63, so a product of two residues needs 128 bits.  Both
backends form it from 32-bit limbs and reduce it with a two-digit long
division (Knuth D, base 2^32).  Because every modulus is below 2^63 the
normalising shift is always at least 1.
"""

from __future__ import annotations

import os
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .rns_core import OpCounter, RnsBase, active_counter

U32 = np.uint64(32)
MASK32 = np.uint64(0xFFFFFFFF)
B32 = np.uint64(1 << 32)
ONE = np.uint64(1)
ZERO = np.uint64(0)

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

_DISABLED = os.environ.get("RNSCOMP_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
DEFAULT_BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def resolve_backend(backend: str | None) -> str:
    b = DEFAULT_BACKEND if backend is None else backend
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    if b == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return b


class Tables(NamedTuple):
    mods: np.ndarray  # (n,) uint64
    shifts: np.ndarray  # (n,) uint64, leading-zero count of each modulus
    inv: np.ndarray  # (n, n) uint64, inv[i, j] = m_j^{-1} mod m_i for j < i
    betas: np.ndarray  # (n,) uint64, betas[0] = 1 mod m_a
    ma: np.uint64
    ma_shift: np.uint64


def _nlz(m: int) -> int:
    return 64 - m.bit_length()


@lru_cache(maxsize=64)
def tables(base: RnsBase) -> Tables:
    n = base.n
    inv = np.zeros((n, n), dtype=np.uint64)
    for i, row in enumerate(base.inv_table):
        for j, w in enumerate(row):
            inv[i, j] = w
    return Tables(
        mods=np.array(base.moduli, dtype=np.uint64),
        shifts=np.array([_nlz(m) for m in base.moduli], dtype=np.uint64),
        inv=inv,
        betas=np.array(base.betas, dtype=np.uint64),
        ma=np.uint64(base.redundant_modulus),
        ma_shift=np.uint64(_nlz(base.redundant_modulus)),
    )


def encode_batch(xs, base: RnsBase) -> tuple[np.ndarray, np.ndarray]:
    """Residue matrix (k, n) and redundant residues (k,) for integers in [0, M)."""
    M = base.dynamic_range
    mods = base.moduli
    ma = base.redundant_modulus
    rows = []
    red = []
    for x in xs:
        x = int(x)
        if not 0 <= x < M:
            raise ValueError(f"{x} outside [0, M)")
        rows.append([x % m for m in mods])
        red.append(x % ma)
    res = np.array(rows, dtype=np.uint64).reshape(len(rows), base.n)
    return res, np.array(red, dtype=np.uint64)


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def np_mulhilo(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a0 = a & MASK32
    a1 = a >> U32
    b0 = b & MASK32
    b1 = b >> U32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> U32) + (p01 & MASK32) + (p10 & MASK32)
    lo = (mid << U32) | (p00 & MASK32)
    hi = p11 + (p01 >> U32) + (p10 >> U32) + (mid >> U32)
    return hi, lo


def np_rem128(hi: np.ndarray, lo: np.ndarray, m: np.ndarray, s: np.ndarray) -> np.ndarray:
    """(hi*2^64 + lo) mod m, requires hi < m and 1 <= s = nlz(m)."""
    v = m << s
    vn1 = v >> U32
    vn0 = v & MASK32
    un32 = (hi << s) | (lo >> (np.uint64(64) - s))
    un10 = lo << s
    un1 = un10 >> U32
    un0 = un10 & MASK32

    q1 = un32 // vn1
    rhat = un32 - q1 * vn1
    live = np.ones(np.broadcast(q1, vn0).shape, dtype=bool)
    for _ in range(2):
        fix = live & ((q1 >= B32) | (q1 * vn0 > (rhat << U32) + un1))
        q1 = np.where(fix, q1 - ONE, q1)
        rhat = np.where(fix, rhat + vn1, rhat)
        live = fix & (rhat < B32)
    un21 = (un32 << U32) + un1 - q1 * v

    q0 = un21 // vn1
    rhat = un21 - q0 * vn1
    live = np.ones_like(live)
    for _ in range(2):
        fix = live & ((q0 >= B32) | (q0 * vn0 > (rhat << U32) + un0))
        q0 = np.where(fix, q0 - ONE, q0)
        rhat = np.where(fix, rhat + vn1, rhat)
        live = fix & (rhat < B32)
    return ((un21 << U32) + un0 - q0 * v) >> s


def np_mulmod(a, b, m, s) -> np.ndarray:
    with np.errstate(over="ignore"):
        hi, lo = np_mulhilo(np.asarray(a, dtype=np.uint64), np.asarray(b, dtype=np.uint64))
        return np_rem128(hi, lo, np.asarray(m, dtype=np.uint64), np.asarray(s, dtype=np.uint64))


def _np_sub(a, b, m):
    d = a + (m - b)
    return np.where(d >= m, d - m, d)


def _np_mrc(res: np.ndarray, t: Tables) -> np.ndarray:
    a = np.array(res, dtype=np.uint64, copy=True)
    n = a.shape[1]
    for j in range(n - 1):
        m = t.mods[j + 1:]
        aj = a[:, j:j + 1]
        aj = np.where(t.mods[j] > m, aj % m, aj)
        d = _np_sub(a[:, j + 1:], aj, m)
        a[:, j + 1:] = np_mulmod(d, t.inv[j + 1:, j], m, t.shifts[j + 1:])
    return a


def _np_extend(dig: np.ndarray, t: Tables) -> np.ndarray:
    acc = dig[:, 0] % t.ma
    for i in range(1, dig.shape[1]):
        p = np_mulmod(dig[:, i], t.betas[i], t.ma, t.ma_shift)
        acc = acc + p
        acc = np.where(acc >= t.ma, acc - t.ma, acc)
    return acc


def _np_rns_compare(r1, a1, r2, a2, t: Tables):
    k, n = r1.shape
    d_prime = _np_sub(a1, a2, t.ma)
    z = _np_sub(r1, r2, t.mods)
    delta = _np_extend(_np_mrc(z, t), t)
    geq = delta == d_prime
    per = (n * (n - 1) // 2 + (n - 1), 2 * n, 1, n * (n - 1) // 2, 1)
    return geq, per


def _np_classic(r1, r2, t: Tables):
    k, n = r1.shape
    d1 = _np_mrc(r1, t)
    d2 = _np_mrc(r2, t)
    geq = np.ones(k, dtype=bool)
    open_ = np.ones(k, dtype=bool)
    for i in range(n - 1, -1, -1):
        differ = open_ & (d1[:, i] != d2[:, i])
        geq = np.where(differ, d1[:, i] > d2[:, i], geq)
        open_ &= ~differ
    per = (n * (n - 1), 0, n, n * (n - 1), 0)
    return geq, per


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _nb_mulmod(a, b, m, s):
        a0 = a & MASK32
        a1 = a >> U32
        b0 = b & MASK32
        b1 = b >> U32
        p00 = a0 * b0
        p01 = a0 * b1
        p10 = a1 * b0
        p11 = a1 * b1
        mid = (p00 >> U32) + (p01 & MASK32) + (p10 & MASK32)
        lo = (mid << U32) | (p00 & MASK32)
        hi = p11 + (p01 >> U32) + (p10 >> U32) + (mid >> U32)

        v = m << s
        vn1 = v >> U32
        vn0 = v & MASK32
        un32 = (hi << s) | (lo >> (np.uint64(64) - s))
        un10 = lo << s
        un1 = un10 >> U32
        un0 = un10 & MASK32

        q1 = un32 // vn1
        rhat = un32 - q1 * vn1
        while q1 >= B32 or q1 * vn0 > (rhat << U32) + un1:
            q1 -= ONE
            rhat += vn1
            if rhat >= B32:
                break
        un21 = (un32 << U32) + un1 - q1 * v
        q0 = un21 // vn1
        rhat = un21 - q0 * vn1
        while q0 >= B32 or q0 * vn0 > (rhat << U32) + un0:
            q0 -= ONE
            rhat += vn1
            if rhat >= B32:
                break
        return ((un21 << U32) + un0 - q0 * v) >> s

    @njit(cache=True, inline="always")
    def _nb_sub(a, b, m):
        d = a + (m - b)
        if d >= m:
            d -= m
        return d

    @njit(cache=True)
    def _nb_mulmod_vec(a, b, m, s):
        out = np.empty(a.shape[0], dtype=np.uint64)
        for i in range(a.shape[0]):
            out[i] = _nb_mulmod(a[i], b[i], m[i], s[i])
        return out

    @njit(cache=True)
    def _nb_mrc_into(a, mods, shifts, inv, cnt):
        # a is one residue row, converted in place
        n = a.shape[0]
        for i in range(1, n):
            mi = mods[i]
            si = shifts[i]
            ai = a[i]
            for j in range(i):
                aj = a[j]
                if mods[j] > mi:
                    aj = aj % mi
                ai = _nb_mulmod(_nb_sub(ai, aj, mi), inv[i, j], mi, si)
                cnt[0] += 1
                cnt[3] += 1
            a[i] = ai

    @njit(cache=True)
    def _nb_mrc_batch(res, mods, shifts, inv):
        out = res.copy()
        cnt = np.zeros(5, dtype=np.int64)
        for p in range(out.shape[0]):
            _nb_mrc_into(out[p], mods, shifts, inv, cnt)
        return out

    @njit(cache=True)
    def _nb_rns_compare(r1, a1, r2, a2, mods, shifts, inv, betas, ma, ma_shift):
        k, n = r1.shape
        geq = np.empty(k, dtype=np.bool_)
        cnt = np.zeros(5, dtype=np.int64)
        z = np.empty(n, dtype=np.uint64)
        for p in range(k):
            d_prime = _nb_sub(a1[p], a2[p], ma)
            cnt[1] += 1
            for i in range(n):
                z[i] = _nb_sub(r1[p, i], r2[p, i], mods[i])
                cnt[1] += 1
            _nb_mrc_into(z, mods, shifts, inv, cnt)
            acc = z[0] % ma
            cnt[4] += 1
            for i in range(1, n):
                acc += _nb_mulmod(z[i], betas[i], ma, ma_shift)
                if acc >= ma:
                    acc -= ma
                cnt[0] += 1
                cnt[1] += 1
            geq[p] = acc == d_prime
            cnt[2] += 1
        return geq, cnt

    @njit(cache=True)
    def _nb_classic(r1, r2, mods, shifts, inv):
        k, n = r1.shape
        geq = np.empty(k, dtype=np.bool_)
        cnt = np.zeros(5, dtype=np.int64)
        d1 = np.empty(n, dtype=np.uint64)
        d2 = np.empty(n, dtype=np.uint64)
        for p in range(k):
            for i in range(n):
                d1[i] = r1[p, i]
                d2[i] = r2[p, i]
            _nb_mrc_into(d1, mods, shifts, inv, cnt)
            _nb_mrc_into(d2, mods, shifts, inv, cnt)
            verdict = True
            decided = False
            # full scan, no early exit
            for i in range(n - 1, -1, -1):
                cnt[2] += 1
                if not decided and d1[i] != d2[i]:
                    verdict = d1[i] > d2[i]
                    decided = True
            geq[p] = verdict
        return geq, cnt


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _as_rows(r, n) -> np.ndarray:
    arr = np.ascontiguousarray(r, dtype=np.uint64)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"expected residue matrix of shape (k, {n}), got {arr.shape}")
    return arr


def _tally(counts, k: int | None = None) -> None:
    c = active_counter()
    if c is None:
        return
    vals = [int(x) * (k if k is not None else 1) for x in counts]
    c.merge(OpCounter(*vals))


def mulmod(a, b, m, backend: str | None = None) -> np.ndarray:
    """Elementwise exact (a*b) mod m on uint64 arrays; needs a < m or b < m."""
    a, b, m = np.broadcast_arrays(
        np.asarray(a, dtype=np.uint64), np.asarray(b, dtype=np.uint64), np.asarray(m, dtype=np.uint64)
    )
    s = np.array([_nlz(int(x)) for x in m.ravel()], dtype=np.uint64).reshape(m.shape)
    if resolve_backend(backend) == "numba":
        flat = _nb_mulmod_vec(
            np.ascontiguousarray(a).ravel(), np.ascontiguousarray(b).ravel(), np.ascontiguousarray(m).ravel(), s.ravel()
        )
        return flat.reshape(a.shape)
    return np_mulmod(a, b, m, s)


def mrc_convert_batch(res, base: RnsBase, backend: str | None = None) -> np.ndarray:
    t = tables(base)
    res = _as_rows(res, base.n)
    if resolve_backend(backend) == "numba":
        return _nb_mrc_batch(res, t.mods, t.shifts, t.inv)
    with np.errstate(over="ignore"):
        return _np_mrc(res, t)


def rns_compare_batch(r1, a1, r2, a2, base: RnsBase, backend: str | None = None) -> np.ndarray:
    """Boolean array, True where N1 >= N2, for k pairs of encoded operands."""
    t = tables(base)
    r1 = _as_rows(r1, base.n)
    r2 = _as_rows(r2, base.n)
    a1 = np.ascontiguousarray(a1, dtype=np.uint64)
    a2 = np.ascontiguousarray(a2, dtype=np.uint64)
    if r1.shape != r2.shape or a1.shape != (r1.shape[0],) or a2.shape != a1.shape:
        raise ValueError("operand batches have mismatched shapes")
    if resolve_backend(backend) == "numba":
        geq, cnt = _nb_rns_compare(r1, a1, r2, a2, t.mods, t.shifts, t.inv, t.betas, t.ma, t.ma_shift)
        _tally(cnt)
        return geq
    with np.errstate(over="ignore"):
        geq, per = _np_rns_compare(r1, a1, r2, a2, t)
    _tally(per, r1.shape[0])
    return geq


def classic_compare_batch(r1, r2, base: RnsBase, backend: str | None = None) -> np.ndarray:
    t = tables(base)
    r1 = _as_rows(r1, base.n)
    r2 = _as_rows(r2, base.n)
    if r1.shape != r2.shape:
        raise ValueError("operand batches have mismatched shapes")
    if resolve_backend(backend) == "numba":
        geq, cnt = _nb_classic(r1, r2, t.mods, t.shifts, t.inv)
        _tally(cnt)
        return geq
    with np.errstate(over="ignore"):
        geq, per = _np_classic(r1, r2, t)
    _tally(per, r1.shape[0])
    return geq
