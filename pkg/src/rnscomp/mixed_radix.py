"""Szabo-Tanaka mixed-radix conversion and extension to the redundant modulus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .rns_core import InconsistentBase, RnsBase, active_counter, mod_add, mod_mul, mod_mulsub, mod_reduce


@dataclass(frozen=True)
class MixedRadixDigits:
    """Digits a_1..a_n with X = a_1 + a_2*m_1 + ... + a_n*m_1*...*m_{n-1}."""

    digits: tuple[int, ...]

    def to_list(self) -> list[str]:
        return [str(d) for d in self.digits]


def mrc_convert(residues: Sequence[int], base: RnsBase, order: str = "row") -> MixedRadixDigits:
    """Mixed-radix digits of the value with the given residues.

    Performs exactly n(n-1)/2 modular multiplications regardless of the
    input; there is no early exit on zero digits.  A digit a_j is reduced
    mod m_i before the subtraction when m_j > m_i; that depends on the base
    only, never on the operands.

    ``order="row"`` runs the triangular double loop digit by digit.
    ``order="column"`` finalises a_j and then updates every later channel
    with it, which is the channel-parallel schedule; each a_i still sees the
    same sequence of updates, so both orders give identical digits.
    """
    n = base.n
    if len(residues) != n:
        raise InconsistentBase(f"{len(residues)} residues for a base of {n} moduli")
    a = list(residues)
    mods = base.moduli
    inv = base.inv_table
    if order == "row" and active_counter() is None:
        # uncounted path; Python's floored % absorbs the sign of a_i - a_j
        for i in range(1, n):
            mi = mods[i]
            row = inv[i]
            ai = a[i]
            for j in range(i):
                ai = (ai - a[j]) * row[j] % mi
            a[i] = ai
    elif order == "row":
        for i in range(1, n):
            mi = mods[i]
            row = inv[i]
            ai = a[i]
            for j in range(i):
                aj = a[j] % mi if mods[j] > mi else a[j]
                ai = mod_mulsub(ai, aj, row[j], mi)
            a[i] = ai
    elif order == "column":
        for j in range(n - 1):
            aj = a[j]
            for i in range(j + 1, n):
                mi = mods[i]
                a[i] = mod_mulsub(a[i], aj % mi if mods[j] > mi else aj, inv[i][j], mi)
    else:
        raise ValueError(f"unknown order {order!r}")
    return MixedRadixDigits(tuple(a))


def extend_to_redundant(digits: MixedRadixDigits, base: RnsBase) -> int:
    """X mod m_a from the mixed-radix digits of X.

    Starts from ``a_1 mod m_a`` (a reduction) and accumulates
    ``a_i * beta_i`` for i = 2..n: n-1 multiplications, n-1 additions.
    """
    ma = base.redundant_modulus
    a = digits.digits
    if len(a) != base.n:
        raise InconsistentBase("digit count does not match base")
    betas = base.betas
    if active_counter() is None:
        acc = a[0] % ma
        for i in range(1, len(a)):
            acc = (acc + a[i] * betas[i]) % ma
        return acc
    acc = mod_reduce(a[0], ma)
    for i in range(1, len(a)):
        # a_i < m_i may exceed m_a; the product is reduced mod m_a as a whole
        acc = mod_add(acc, mod_mul(a[i], betas[i], ma), ma)
    return acc


def mrc_reconstruct(digits: MixedRadixDigits, base: RnsBase) -> int:
    """Horner evaluation of the mixed-radix expansion in arbitrary precision."""
    a = digits.digits
    mods = base.moduli
    x = a[-1]
    for i in range(len(a) - 2, -1, -1):
        x = x * mods[i] + a[i]
    return x
