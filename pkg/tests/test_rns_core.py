import json
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rnscomp import (
    InconsistentBase,
    ModulusTooLarge,
    NotCoprime,
    OpCounter,
    OutOfRange,
    RnsBase,
    RnsValue,
    TooFewModuli,
    base_new,
    channel_add,
    channel_mul,
    channel_sub,
    counting,
    decode,
    encode,
)
from rnscomp.rns_core import RnsError, load_base, mod_add, mod_mul, mod_sub


def test_base_constants(b357):
    assert b357.dynamic_range == 105
    assert b357.betas[1:] == (3, 4)
    assert b357.m_mod_ma == 6
    assert b357.n == 3


def test_inverse_table_matches_brute_force(b357):
    # inv_table[i][j] = m_j^{-1} mod m_i
    for i, mi in enumerate(b357.moduli):
        for j in range(i):
            brute = [x for x in range(mi) if b357.moduli[j] * x % mi == 1]
            assert b357.inv_table[i][j] == brute[0]
    assert b357.inv_table[1][0] == 2


def test_precomputation_consistency(big_base):
    mods = big_base.moduli
    for i in range(big_base.n):
        for j in range(i):
            assert mods[j] * big_base.inv_table[i][j] % mods[i] == 1
    for m, (Mi, inv) in zip(mods, big_base.crt_weights):
        assert Mi * m == big_base.dynamic_range
        assert Mi * inv % m == 1
    ma = big_base.redundant_modulus
    assert big_base.betas[0] == 1
    for i in range(2, big_base.n):
        assert big_base.betas[i] == big_base.betas[i - 1] * mods[i - 1] % ma
    assert big_base.m_mod_ma == big_base.dynamic_range % ma


@pytest.mark.parametrize(
    "moduli, ma, err",
    [
        ((3, 5, 7), 6, NotCoprime),
        ((3, 6, 7), 11, NotCoprime),
        ((4, 5, 9), 5, NotCoprime),
        ((3,), 11, TooFewModuli),
        ((3, 1 << 63), 11, ModulusTooLarge),
        ((3, 5), 1 << 63, ModulusTooLarge),
    ],
)
def test_base_rejects(moduli, ma, err):
    with pytest.raises(err):
        base_new(moduli, ma)


def test_not_coprime_reports_positions():
    with pytest.raises(NotCoprime) as exc:
        base_new((3, 5, 7), 6)
    assert (exc.value.i, exc.value.j) == (0, 3)


def test_moduli_need_not_be_prime():
    b = base_new((4, 9, 25), 7)
    assert b.dynamic_range == 900


def test_largest_word_modulus_accepted():
    b = base_new(((1 << 63) - 25, (1 << 63) - 165), 3)
    assert b.moduli[0] == (1 << 63) - 25


@pytest.mark.parametrize(
    "x, residues, red",
    [(23, (2, 3, 2), 1), (0, (0, 0, 0), 0), (104, (2, 4, 6), 5)],
)
def test_encode(b357, x, residues, red):
    v = encode(x, b357)
    assert v == RnsValue(residues, red)


@pytest.mark.parametrize("x", [-1, 105, 10**9])
def test_encode_out_of_range(b357, x):
    with pytest.raises(OutOfRange):
        encode(x, b357)


@pytest.mark.parametrize("residues, x", [((2, 3, 2), 23), ((0, 0, 0), 0), ((2, 4, 6), 104)])
def test_decode_examples(b357, residues, x):
    brute = [y for y in range(105) if (y % 3, y % 5, y % 7) == residues]
    assert brute == [x]
    assert decode(RnsValue(residues, x % 11), b357) == x


def test_decode_wrong_length(b357):
    with pytest.raises(InconsistentBase):
        decode(RnsValue((1, 2), 0), b357)


def test_round_trip_exhaustive():
    b = base_new((7, 11, 13, 8), 15)
    for x in range(b.dynamic_range):
        v = encode(x, b)
        assert decode(v, b) == x
        assert v.redundant_residue == x % 15


@settings(max_examples=200)
@given(st.data())
def test_round_trip_big(big_base, data):
    x = data.draw(st.integers(0, big_base.dynamic_range - 1))
    assert decode(encode(x, big_base), big_base) == x


def test_channel_sub_examples(b357):
    d = channel_sub(encode(23, b357), encode(40, b357), b357)
    assert d.residues == encode(88, b357).residues
    # the redundant channel keeps (1 - 7) mod 11 while 88 mod 11 is 0
    assert d.redundant_residue == 5
    assert 88 % 11 == 0
    x = encode(77, b357)
    assert channel_sub(x, x, b357) == RnsValue((0, 0, 0), 0)


def test_channel_add_mul_examples(b357):
    assert channel_add(encode(23, b357), encode(40, b357), b357) == encode(63, b357)
    x = encode(58, b357)
    assert channel_mul(x, encode(1, b357), b357) == x
    # 130 mod 105 = 25 on the main channels; the redundant channel keeps 130 mod 11
    p = channel_mul(encode(13, b357), encode(10, b357), b357)
    assert p.residues == encode(25, b357).residues
    assert p.redundant_residue == 130 % 11


@settings(max_examples=200)
@given(st.data())
def test_homomorphism(big_base, data):
    M = big_base.dynamic_range
    a = data.draw(st.integers(0, M - 1))
    b = data.draw(st.integers(0, M - 1))
    ea, eb = encode(a, big_base), encode(b, big_base)
    assert decode(channel_add(ea, eb, big_base), big_base) == (a + b) % M
    assert decode(channel_sub(ea, eb, big_base), big_base) == (a - b) % M
    assert decode(channel_mul(ea, eb, big_base), big_base) == (a * b) % M


def test_word_primitives():
    assert mod_mul(3, 2, 5) == 1
    m = (1 << 63) - 25
    assert mod_mul(m - 1, m - 1, m) == 1
    assert mod_mul((1 << 62) - 1, (1 << 62) - 1, (1 << 62) - 57) == 3136
    assert mod_add(m - 1, m - 1, m) == m - 2
    assert mod_sub(0, m - 1, m) == 1
    assert mod_sub(5, 5, m) == 0


@given(st.integers(2, (1 << 63) - 1), st.data())
def test_word_primitives_vs_bignum(m, data):
    a = data.draw(st.integers(0, m - 1))
    b = data.draw(st.integers(0, m - 1))
    assert mod_mul(a, b, m) == a * b % m
    assert mod_add(a, b, m) == (a + b) % m
    assert mod_sub(a, b, m) == (a - b) % m


def test_counter_tallies_and_resets():
    with counting() as ops:
        mod_mul(2, 3, 7)
        mod_add(2, 3, 7)
        mod_sub(2, 3, 7)
    assert (ops.mod_muls, ops.mod_adds) == (1, 2)
    mod_mul(2, 3, 7)  # outside the block: not counted
    assert ops.mod_muls == 1
    ops.reset()
    assert ops == OpCounter()


def test_counter_is_thread_local():
    seen = {}

    def worker():
        with counting() as ops:
            for _ in range(10):
                mod_mul(2, 3, 7)
        seen["t"] = ops.mod_muls

    with counting() as main_ops:
        t = threading.Thread(target=worker)
        t.start()
        t.join()
        mod_mul(2, 3, 7)
    assert seen["t"] == 10
    assert main_ops.mod_muls == 1


def test_base_json_round_trip(tmp_path, big_base):
    doc = json.loads(big_base.to_json())
    assert all(isinstance(m, str) for m in doc["moduli"])
    assert RnsBase.from_json(big_base.to_json()) == big_base
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"moduli": ["3", "5", "7"], "redundant": "11"}))
    assert load_base(p).dynamic_range == 105


@pytest.mark.parametrize(
    "doc",
    [{"moduli": ["3", "5"]}, {"moduli": ["3", "x"], "redundant": "11"}, {"moduli": 3, "redundant": "11"}],
)
def test_base_json_malformed(doc):
    with pytest.raises(RnsError):
        RnsBase.from_json(json.dumps(doc))


def test_value_serialisation(b357):
    v = encode(23, b357)
    doc = v.to_dict()
    assert doc == {"residues": ["2", "3", "2"], "redundant": "1"}
    assert RnsValue.from_dict(doc, b357) == v
    with pytest.raises(InconsistentBase):
        RnsValue.from_dict({"residues": ["3", "3", "2"], "redundant": "1"}, b357)


def test_table_words(b357):
    # inverse triangle 3 + betas 2 + M mod m_a 1
    assert b357.table_words == 6
