import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rnscomp import base_new, encode, extend_to_redundant, mrc_convert, mrc_reconstruct
from rnscomp.mixed_radix import MixedRadixDigits
from rnscomp.rns_core import InconsistentBase, counting


def brute_digits(x, moduli):
    """Search every digit vector for the one whose expansion equals x."""
    for digits in itertools.product(*(range(m) for m in moduli)):
        acc, w = 0, 1
        for d, m in zip(digits, moduli):
            acc += d * w
            w *= m
        if acc == x:
            return digits
    raise AssertionError("no digit vector")


@pytest.mark.parametrize("x, digits", [(23, (2, 2, 1)), (40, (1, 3, 2)), (104, (2, 4, 6)), (0, (0, 0, 0))])
def test_convert_examples(b357, x, digits):
    assert brute_digits(x, b357.moduli) == digits
    assert mrc_convert(encode(x, b357).residues, b357).digits == digits


@pytest.mark.parametrize("moduli, ma", [((3, 5, 7), 11), ((7, 3, 5), 2), ((9, 2, 5, 7), 11), ((16, 3), 7)])
def test_convert_exhaustive_against_brute(moduli, ma):
    b = base_new(moduli, ma)
    for x in range(b.dynamic_range):
        d = mrc_convert(encode(x, b).residues, b)
        assert d.digits == brute_digits(x, moduli)
        assert mrc_reconstruct(d, b) == x
        assert extend_to_redundant(d, b) == x % ma


def test_reconstruct_examples(b357):
    assert mrc_reconstruct(MixedRadixDigits((2, 2, 1)), b357) == 23
    assert mrc_reconstruct(MixedRadixDigits((0, 0, 0)), b357) == 0
    assert mrc_reconstruct(MixedRadixDigits((2, 4, 6)), b357) == 104


def test_reconstruct_max_digits(big_base):
    top = MixedRadixDigits(tuple(m - 1 for m in big_base.moduli))
    assert mrc_reconstruct(top, big_base) == big_base.dynamic_range - 1


@pytest.mark.parametrize("x", [23, 104, 0, 88, 57])
def test_extend_examples(b357, x):
    d = mrc_convert(encode(x, b357).residues, b357)
    assert extend_to_redundant(d, b357) == x % 11
    if x == 23:
        assert (2 + 2 * 3 + 1 * 4) % 11 == 1


@settings(max_examples=300)
@given(st.data())
def test_properties_big(big_base, data):
    x = data.draw(st.integers(0, big_base.dynamic_range - 1))
    d = mrc_convert(encode(x, big_base).residues, big_base)
    assert all(0 <= a < m for a, m in zip(d.digits, big_base.moduli))
    assert mrc_reconstruct(d, big_base) == x
    assert extend_to_redundant(d, big_base) == x % big_base.redundant_modulus


@settings(max_examples=100)
@given(st.data())
def test_column_order_bit_identical(big_base, data):
    x = data.draw(st.integers(0, big_base.dynamic_range - 1))
    res = encode(x, big_base).residues
    row = mrc_convert(res, big_base, order="row")
    assert mrc_convert(res, big_base, order="column") == row
    with counting():
        assert mrc_convert(res, big_base, order="row") == row


@pytest.mark.parametrize("n", [2, 3, 4, 7, 16])
def test_operation_counts(n):
    from rnscomp.bench import generate_base

    b = generate_base(n, 30, n)
    res = encode(b.dynamic_range // 3, b).residues
    with counting() as ops:
        d = mrc_convert(res, b)
    assert ops.mod_muls == n * (n - 1) // 2
    assert ops.mrc_subs == n * (n - 1) // 2
    with counting() as ops:
        extend_to_redundant(d, b)
    assert (ops.mod_muls, ops.mod_adds, ops.reductions) == (n - 1, n - 1, 1)
    assert ops.table_muls == n


def test_counts_n4_all_zero_input():
    b = base_new((3, 5, 7, 11), 13)
    with counting() as ops:
        d = mrc_convert((0, 0, 0, 0), b)
    assert d.digits == (0, 0, 0, 0)
    assert ops.mod_muls == 6


def test_bad_inputs(b357):
    with pytest.raises(InconsistentBase):
        mrc_convert((1, 2), b357)
    with pytest.raises(InconsistentBase):
        extend_to_redundant(MixedRadixDigits((1, 2)), b357)
    with pytest.raises(ValueError):
        mrc_convert((1, 2, 3), b357, order="diagonal")
