import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segtrust import paillier
from segtrust.paillier import Ciphertext


# hand-checked: lambda = lcm(4, 6) = 12, (1+35)^12 = 1 + 12*35 mod 1225 -> L = 12, 12*3 = 36 = 1 mod 35
def test_toy_keypair_vectors(toy_keys):
    pk, sk = toy_keys
    assert (pk.n, pk.g, pk.n_squared) == (35, 36, 1225)
    assert (sk.lam, sk.mu) == (12, 3)


def test_toy_encrypt_vectors(toy_keys):
    pk, sk = toy_keys
    assert paillier.encrypt(pk, 0, r=1).value == 1
    assert paillier.encrypt(pk, 1, r=1).value == 36
    assert paillier.decrypt(sk, pk, Ciphertext(1, pk.key_id)) == 0


def test_toy_round_trip_17(toy_keys):
    pk, sk = toy_keys
    for r in (1, 2, 3, 4, 6, 8, 11, 34):
        assert paillier.decrypt(sk, pk, paillier.encrypt(pk, 17, r=r)) == 17


def test_toy_hom_add(toy_keys):
    pk, sk = toy_keys
    c = paillier.hom_add(pk, paillier.encrypt(pk, 2, r=3), paillier.encrypt(pk, 3, r=4))
    assert paillier.decrypt(sk, pk, c) == 5


def test_fold_of_ones(toy_keys):
    pk, sk = toy_keys
    g = random.Random(1)
    acc = paillier.encrypt(pk, 0, rng=g)
    for _ in range(10):
        acc = paillier.hom_add(pk, acc, paillier.encrypt(pk, 1, rng=g))
    assert paillier.decrypt(sk, pk, acc) == 10 % 35


def test_additive_identity(keys64):
    pk, sk = keys64
    g = random.Random(2)
    c = paillier.encrypt(pk, 12345, rng=g)
    assert paillier.decrypt(sk, pk, paillier.hom_add(pk, c, paillier.encrypt(pk, 0, rng=g))) == 12345


def test_generate_keypair_deterministic():
    assert paillier.generate_keypair(512, 42) == paillier.generate_keypair(512, 42)
    assert paillier.generate_keypair(128, 1)[0] != paillier.generate_keypair(128, 2)[0]


@pytest.mark.parametrize("bits", [16, 64, 256])
def test_generated_key_sizes(bits):
    pk, sk = paillier.generate_keypair(bits, 3)
    assert pk.n.bit_length() == bits
    assert pk.g == pk.n + 1
    assert gcd(pk.n, sk.lam) == 1


def test_invalid_primes_rejected():
    with pytest.raises(paillier.KeyGenerationError):
        paillier.keypair_from_primes(7, 7)
    with pytest.raises(paillier.KeyGenerationError):
        paillier.keypair_from_primes(9, 7)
    with pytest.raises(paillier.KeyGenerationError):
        paillier.generate_keypair(8)


def test_encrypt_domain_errors(toy_keys):
    pk, _ = toy_keys
    with pytest.raises(paillier.PlaintextRangeError):
        paillier.encrypt(pk, 35, r=1)
    with pytest.raises(paillier.PlaintextRangeError):
        paillier.encrypt(pk, -1, r=1)
    with pytest.raises(paillier.RandomnessError):
        paillier.encrypt(pk, 1, r=7)


def test_key_mismatch(toy_keys, keys64):
    pk, sk = toy_keys
    other = keys64[0]
    c = paillier.encrypt(other, 3, rng=random.Random(0))
    with pytest.raises(paillier.KeyMismatchError):
        paillier.decrypt(sk, pk, c)
    with pytest.raises(paillier.KeyMismatchError):
        paillier.hom_add(pk, paillier.encrypt(pk, 1, r=1), c)


def test_malformed_ciphertext(toy_keys):
    pk, sk = toy_keys
    for bad in (0, 1225, 7, 5 * 11):
        with pytest.raises(paillier.MalformedCiphertextError):
            paillier.decrypt(sk, pk, Ciphertext(bad, pk.key_id))


def test_equal_plaintexts_hide(keys64):
    pk, _ = keys64
    g = random.Random(3)
    assert paillier.encrypt(pk, 9, rng=g) != paillier.encrypt(pk, 9, rng=g)


def test_private_key_repr_hides_secret(toy_keys):
    assert "12" not in repr(toy_keys[1])


def test_codec_quoted_values():
    n = 10 ** 6
    assert paillier.encode_signed(0.58, 100, n) == 58
    assert paillier.decode_signed(52, 100, n) == 0.52
    assert paillier.encode_signed(0.0, 7, n) == 0
    assert paillier.decode_signed(0, 100, n) == 0.0
    assert paillier.encode_signed(-0.25, 100, n) == n - 25
    assert paillier.decode_signed(n - 25, 100, n) == -0.25


def test_codec_grid_identity():
    n = 1009 * 1013
    for k in range(-100, 101):
        x = k / 100
        assert paillier.decode_signed(paillier.encode_signed(x, 100, n), 100, n) == x


def test_codec_overflow():
    with pytest.raises(paillier.EncodingError):
        paillier.encode_signed(0.2, 100, 35)


def test_public_key_dict_round_trip(keys64):
    pk = keys64[0]
    assert paillier.PaillierPublicKey.from_dict(pk.to_dict()) == pk


def test_round_trip_1000(keys512):
    pk, sk = keys512
    g = random.Random(7)
    for _ in range(1000):
        m = g.randrange(pk.n)
        assert paillier.decrypt(sk, pk, paillier.encrypt(pk, m, rng=g)) == m


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0), st.integers(min_value=0), st.integers(0, 2 ** 32))
def test_homomorphism_property(keys64, a, b, seed):
    pk, sk = keys64
    m1, m2 = a % pk.n, b % pk.n
    g = random.Random(seed)
    c = paillier.hom_add(pk, paillier.encrypt(pk, m1, rng=g), paillier.encrypt(pk, m2, rng=g))
    assert paillier.decrypt(sk, pk, c) == (m1 + m2) % pk.n


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=5), st.integers(0, 2 ** 16))
def test_fold_permutation_invariance(keys64, ms, seed):
    pk, sk = keys64
    g = random.Random(seed)
    cts = [paillier.encrypt(pk, m, rng=g) for m in ms]
    sums = {paillier.decrypt(sk, pk, paillier.hom_sum(pk, p)) for p in itertools.permutations(cts)}
    assert sums == {sum(ms) % pk.n}


@settings(max_examples=200, deadline=None)
@given(st.integers(-100, 100), st.sampled_from([10, 100, 1000]))
def test_codec_round_trip_property(k, scale):
    n = 2 ** 61 - 1
    x = k / 100
    back = paillier.decode_signed(paillier.encode_signed(x, scale, n), scale, n)
    assert abs(back - x) <= 0.5 / scale + 1e-12
