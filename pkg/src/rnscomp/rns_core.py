"""RNS bases, residue encoding, channel arithmetic and word-level primitives.

Every modular operation on the hot path goes through :func:`mod_mul`,
:func:`mod_add`, :func:`mod_sub`, :func:`mod_mulsub` or :func:`mod_reduce`
so that an active :class:`OpCounter` sees an exact tally.
"""

from __future__ import annotations

import json
import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from typing import Iterator, Sequence

WORD_LIMIT = 1 << 63


class RnsError(ValueError):
    """Base class for all RNS validation errors."""


class NotCoprime(RnsError):
    def __init__(self, i: int, j: int, a: int, b: int):
        self.i, self.j = i, j
        super().__init__(f"moduli at positions {i} and {j} share a factor: gcd({a}, {b}) = {math.gcd(a, b)}")


class ModulusTooLarge(RnsError):
    pass


class ModulusTooSmall(RnsError):
    pass


class TooFewModuli(RnsError):
    pass


class OutOfRange(RnsError):
    pass


class InconsistentBase(RnsError):
    pass


# ---------------------------------------------------------------------------
# Operation counting
# ---------------------------------------------------------------------------

@dataclass
class OpCounter:
    """Tally of word-size operations.

    ``mod_muls``, ``mod_adds`` and ``word_comparisons`` are the reported
    costs.  The two extra fields keep the
    raw itemisation: ``mrc_subs`` are the subtractions fused into each
    mixed-radix step ``(a_i - a_j) * inv``, ``reductions`` are plain
    ``x mod m`` reductions of an already word-sized value.
    """

    mod_muls: int = 0
    mod_adds: int = 0
    word_comparisons: int = 0
    mrc_subs: int = 0
    reductions: int = 0

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)

    def merge(self, other: "OpCounter") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    @property
    def table_muls(self) -> int:
        """Multiplications with the initial redundant reduction charged as one M."""
        return self.mod_muls + self.reductions

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class _CounterSlot(threading.local):
    counter: OpCounter | None = None


_tls = _CounterSlot()


def active_counter() -> OpCounter | None:
    return _tls.counter


@contextmanager
def counting(counter: OpCounter | None = None) -> Iterator[OpCounter]:
    """Activate ``counter`` (or a fresh one) for the current thread."""
    ops = OpCounter() if counter is None else counter
    prev = _tls.counter
    _tls.counter = ops
    try:
        yield ops
    finally:
        _tls.counter = prev


# ---------------------------------------------------------------------------
# Word primitives
# ---------------------------------------------------------------------------

def mod_mul(a: int, b: int, m: int) -> int:
    c = _tls.counter
    if c is not None:
        c.mod_muls += 1
    return (a * b) % m


def mod_add(a: int, b: int, m: int) -> int:
    c = _tls.counter
    if c is not None:
        c.mod_adds += 1
    s = a + b
    return s - m if s >= m else s


def mod_sub(a: int, b: int, m: int) -> int:
    c = _tls.counter
    if c is not None:
        c.mod_adds += 1
    # (a + m - b) keeps everything non-negative
    s = a + m - b
    return s - m if s >= m else s


def mod_mulsub(a: int, b: int, w: int, m: int) -> int:
    """``((a - b) * w) mod m`` for ``a, b < m``; one mixed-radix step."""
    c = _tls.counter
    if c is not None:
        c.mod_muls += 1
        c.mrc_subs += 1
    d = a + m - b
    if d >= m:
        d -= m
    return (d * w) % m


def mod_reduce(a: int, m: int) -> int:
    c = _tls.counter
    if c is not None:
        c.reductions += 1
    return a % m


def word_cmp(a: int, b: int) -> int:
    """Three-way word comparison, counted as one C."""
    c = _tls.counter
    if c is not None:
        c.word_comparisons += 1
    return (a > b) - (a < b)


# ---------------------------------------------------------------------------
# Bases and values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RnsBase:
    moduli: tuple[int, ...]
    redundant_modulus: int
    # inv_table[i][j] = m_j^{-1} mod m_i for j < i (0-based, row i has i entries)
    inv_table: tuple[tuple[int, ...], ...] = field(repr=False)
    # betas[i] = (m_0 * ... * m_{i-1}) mod m_a for i >= 1; betas[0] is the implicit 1
    betas: tuple[int, ...] = field(repr=False)
    m_mod_ma: int = field(repr=False)
    dynamic_range: int = field(repr=False)
    crt_weights: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.moduli)

    @property
    def table_words(self) -> int:
        """Stored word constants used by the single-conversion comparison."""
        return sum(len(row) for row in self.inv_table) + (self.n - 1) + 1

    def to_json(self) -> str:
        return json.dumps(
            {"moduli": [str(m) for m in self.moduli], "redundant": str(self.redundant_modulus)}
        )

    @classmethod
    def from_json(cls, text: str) -> "RnsBase":
        return base_from_dict(json.loads(text))


def base_new(moduli: Sequence[int], redundant_modulus: int) -> RnsBase:
    """Validate a moduli set and precompute every constant the algorithms need."""
    mods = tuple(int(m) for m in moduli)
    ma = int(redundant_modulus)
    if len(mods) < 2:
        raise TooFewModuli(f"need at least 2 moduli, got {len(mods)}")
    everything = mods + (ma,)
    for m in everything:
        if m < 2:
            raise ModulusTooSmall(f"modulus {m} < 2")
        if m >= WORD_LIMIT:
            raise ModulusTooLarge(f"modulus {m} >= 2^63")
    for i in range(len(everything)):
        for j in range(i + 1, len(everything)):
            if math.gcd(everything[i], everything[j]) != 1:
                raise NotCoprime(i, j, everything[i], everything[j])

    n = len(mods)
    inv_table = tuple(
        tuple(pow(mods[j], -1, mods[i]) for j in range(i)) for i in range(n)
    )
    betas = [1 % ma]
    for i in range(1, n):
        betas.append(betas[-1] * mods[i - 1] % ma)
    M = math.prod(mods)
    crt = []
    for m in mods:
        Mi = M // m
        crt.append((Mi, pow(Mi % m, -1, m)))
    return RnsBase(
        moduli=mods,
        redundant_modulus=ma,
        inv_table=inv_table,
        betas=tuple(betas),
        m_mod_ma=M % ma,
        dynamic_range=M,
        crt_weights=tuple(crt),
    )


def base_from_dict(doc: dict) -> RnsBase:
    try:
        moduli = [int(str(m), 10) for m in doc["moduli"]]
        redundant = int(str(doc["redundant"]), 10)
    except (KeyError, TypeError, ValueError) as exc:
        raise RnsError(f"malformed base description: {exc}") from exc
    return base_new(moduli, redundant)


def load_base(path) -> RnsBase:
    with open(path) as fh:
        return base_from_dict(json.load(fh))


@dataclass(frozen=True)
class RnsValue:
    residues: tuple[int, ...]
    redundant_residue: int

    def to_dict(self) -> dict:
        return {"residues": [str(r) for r in self.residues], "redundant": str(self.redundant_residue)}

    @classmethod
    def from_dict(cls, doc: dict, base: RnsBase) -> "RnsValue":
        v = cls(tuple(int(r) for r in doc["residues"]), int(doc["redundant"]))
        check_value(v, base)
        return v


def check_value(v: RnsValue, base: RnsBase) -> None:
    if len(v.residues) != base.n:
        raise InconsistentBase(f"value has {len(v.residues)} residues, base has {base.n} moduli")
    for r, m in zip(v.residues, base.moduli):
        if not 0 <= r < m:
            raise InconsistentBase(f"residue {r} not reduced mod {m}")
    if not 0 <= v.redundant_residue < base.redundant_modulus:
        raise InconsistentBase("redundant residue not reduced")


def encode(x: int, base: RnsBase) -> RnsValue:
    x = int(x)
    if not 0 <= x < base.dynamic_range:
        raise OutOfRange(f"{x} outside [0, M)")
    return RnsValue(tuple(x % m for m in base.moduli), x % base.redundant_modulus)


def decode(v: RnsValue, base: RnsBase) -> int:
    from .mixed_radix import mrc_convert, mrc_reconstruct

    if len(v.residues) != base.n:
        raise InconsistentBase(f"value has {len(v.residues)} residues, base has {base.n} moduli")
    return mrc_reconstruct(mrc_convert(v.residues, base), base)


def _channelwise(op, a: RnsValue, b: RnsValue, base: RnsBase) -> RnsValue:
    if len(a.residues) != base.n or len(b.residues) != base.n:
        raise InconsistentBase("residue count does not match base")
    res = tuple(op(x, y, m) for x, y, m in zip(a.residues, b.residues, base.moduli))
    return RnsValue(res, op(a.redundant_residue, b.redundant_residue, base.redundant_modulus))


def channel_add(a: RnsValue, b: RnsValue, base: RnsBase) -> RnsValue:
    return _channelwise(mod_add, a, b, base)


def channel_sub(a: RnsValue, b: RnsValue, base: RnsBase) -> RnsValue:
    """Per-channel difference, redundant channel included.

    When the underlying A < B the main channels hold A - B + M while the
    redundant channel holds (A - B) mod m_a; the two disagree mod m_a.
    """
    return _channelwise(mod_sub, a, b, base)


def channel_mul(a: RnsValue, b: RnsValue, base: RnsBase) -> RnsValue:
    return _channelwise(mod_mul, a, b, base)
