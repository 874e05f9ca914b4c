"""Comparison of two RNS numbers.

:func:`rns_compare` needs a single mixed-radix conversion of the channel
difference plus its extension to the redundant modulus.  N1 >= N2 exactly
when that extension agrees with the directly subtracted redundant residues;
for N1 < N2 the two differ by M mod m_a, which is never 0 because m_a is
coprime with M.

:func:`classic_compare` converts both operands and compares digit vectors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .mixed_radix import MixedRadixDigits, extend_to_redundant, mrc_convert
from .rns_core import InconsistentBase, RnsBase, RnsValue, mod_sub, word_cmp


class ComparisonOutcome(enum.Enum):
    GreaterOrEqual = "GEQ"
    Less = "LT"

    def __str__(self) -> str:
        return self.value


GEQ = ComparisonOutcome.GreaterOrEqual
LT = ComparisonOutcome.Less


@dataclass(frozen=True)
class CompareTrace:
    """Intermediates of one single-conversion comparison (for ``--dump-mrc``)."""

    outcome: ComparisonOutcome
    delta: int
    delta_prime: int
    differences: tuple[int, ...]
    digits: MixedRadixDigits


def _check_pair(n1: RnsValue, n2: RnsValue, base: RnsBase) -> None:
    if len(n1.residues) != base.n or len(n2.residues) != base.n:
        raise InconsistentBase(
            f"residue counts {len(n1.residues)}, {len(n2.residues)} do not match base of {base.n}"
        )


def rns_compare_trace(n1: RnsValue, n2: RnsValue, base: RnsBase) -> CompareTrace:
    _check_pair(n1, n2, base)
    ma = base.redundant_modulus
    delta_prime = mod_sub(n1.redundant_residue, n2.redundant_residue, ma)
    z = tuple(mod_sub(x, y, m) for x, y, m in zip(n1.residues, n2.residues, base.moduli))
    digits = mrc_convert(z, base)
    delta = extend_to_redundant(digits, base)
    outcome = GEQ if word_cmp(delta, delta_prime) == 0 else LT
    return CompareTrace(outcome, delta, delta_prime, z, digits)


def rns_compare(n1: RnsValue, n2: RnsValue, base: RnsBase) -> ComparisonOutcome:
    """GreaterOrEqual iff N1 >= N2, using one mixed-radix conversion.

    Equal operands give GreaterOrEqual.  Cost: n(n-1)/2 + n-1 modular
    multiplications, one reduction, 2n modular additions/subtractions and a
    single word comparison.
    """
    return rns_compare_trace(n1, n2, base).outcome


def classic_compare(n1: RnsValue, n2: RnsValue, base: RnsBase) -> ComparisonOutcome:
    """Two mixed-radix conversions, then a most-significant-first digit scan.

    All n digit positions are compared, even after the verdict is known, so
    the operation count does not depend on the operands.
    """
    _check_pair(n1, n2, base)
    d1 = mrc_convert(n1.residues, base).digits
    d2 = mrc_convert(n2.residues, base).digits
    verdict = 0
    for i in range(base.n - 1, -1, -1):
        c = word_cmp(d1[i], d2[i])
        if verdict == 0:
            verdict = c
    return LT if verdict < 0 else GEQ


def rns_compare_batch(r1, a1, r2, a2, base: RnsBase, backend: str | None = None) -> np.ndarray:
    """Vectorised :func:`rns_compare` over residue matrices; True means N1 >= N2."""
    return kernels.rns_compare_batch(r1, a1, r2, a2, base, backend)


def classic_compare_batch(r1, r2, base: RnsBase, backend: str | None = None) -> np.ndarray:
    return kernels.classic_compare_batch(r1, r2, base, backend)


def rns_formula_muls(n: int) -> int:
    """Multiplication count charged to the single-conversion method, n(n-1)/2 + n."""
    return n * (n - 1) // 2 + n


def classic_formula_muls(n: int) -> int:
    return n * (n - 1)
