"""Paillier cryptosystem with additive homomorphism and signed fixed-point codec.

Keys use ``g = n + 1``, so ``g^m mod n^2`` has the closed form ``1 + m*n`` and
``mu`` reduces to ``lambda^-1 mod n``.  All randomness comes from a caller
supplied :class:`random.Random` so that simulations replay bit-exactly.
"""
from __future__ import annotations

import hashlib
import math
import random
import secrets
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from sympy import isprime

DEFAULT_SCALE = 100
MAX_PRIME_ATTEMPTS = 100_000


class PaillierError(Exception):
    """Base class for all cryptosystem errors."""


class KeyGenerationError(PaillierError):
    pass


class PlaintextRangeError(PaillierError, ValueError):
    pass


class RandomnessError(PaillierError, ValueError):
    pass


class KeyMismatchError(PaillierError):
    pass


class MalformedCiphertextError(PaillierError, ValueError):
    pass


class EncodingError(PaillierError, ValueError):
    pass


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    g: int
    n_squared: int

    @property
    def key_id(self) -> str:
        return hashlib.sha256(f"{self.n:x}".encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {"n": f"{self.n:x}", "g": f"{self.g:x}"}

    @classmethod
    def from_dict(cls, data: dict) -> "PaillierPublicKey":
        n = int(data["n"], 16)
        return cls(n=n, g=int(data["g"], 16), n_squared=n * n)


@dataclass(frozen=True, repr=False)
class PaillierPrivateKey:
    lam: int
    mu: int

    def __repr__(self) -> str:
        return "PaillierPrivateKey(<hidden>)"


@dataclass(frozen=True)
class Ciphertext:
    value: int
    key_id: str

    def hex(self) -> str:
        return f"{self.value:x}"


def _L(u: int, n: int) -> int:
    return (u - 1) // n


def keypair_from_primes(p: int, q: int) -> tuple[PaillierPublicKey, PaillierPrivateKey]:
    """Build a keypair from explicit primes.

    Exposed mainly as a test hook (e.g. ``p=5, q=7`` gives hand-checkable
    vectors); :func:`generate_keypair` goes through here as well.
    """
    if p == q:
        raise KeyGenerationError("p and q must be distinct primes")
    if not (isprime(p) and isprime(q)):
        raise KeyGenerationError("p and q must both be prime")
    n = p * q
    if math.gcd(n, (p - 1) * (q - 1)) != 1:
        raise KeyGenerationError("gcd(n, (p-1)(q-1)) != 1")
    n_squared = n * n
    g = n + 1
    lam = math.lcm(p - 1, q - 1)
    try:
        mu = pow(_L(pow(g, lam, n_squared), n), -1, n)
    except ValueError as exc:
        raise KeyGenerationError("L(g^lambda mod n^2) is not invertible mod n") from exc
    return PaillierPublicKey(n=n, g=g, n_squared=n_squared), PaillierPrivateKey(lam=lam, mu=mu)


def _random_prime(bits: int, rng: random.Random) -> int:
    for _ in range(MAX_PRIME_ATTEMPTS):
        # top two bits set so that p*q has exactly 2*bits bits
        candidate = rng.getrandbits(bits) | (0b11 << (bits - 2)) | 1
        if isprime(candidate):
            return candidate
    raise KeyGenerationError(f"no {bits}-bit prime found after {MAX_PRIME_ATTEMPTS} draws")


def generate_keypair(bits: int = 512, rng_seed: int = 0) -> tuple[PaillierPublicKey, PaillierPrivateKey]:
    """Generate a keypair whose modulus has ``bits`` bits, deterministically from ``rng_seed``."""
    if bits < 16:
        raise KeyGenerationError("key length must be at least 16 bits")
    rng = random.Random(rng_seed)
    half = bits // 2
    for _ in range(64):
        p = _random_prime(half, rng)
        q = _random_prime(bits - half, rng)
        if p == q:
            continue
        try:
            return keypair_from_primes(p, q)
        except KeyGenerationError:
            continue
    raise KeyGenerationError("could not find a valid prime pair")


def random_unit(n: int, rng: random.Random | None = None) -> int:
    """Draw r uniformly from Z*_n."""
    while True:
        r = rng.randrange(1, n) if rng is not None else secrets.randbelow(n - 1) + 1
        if math.gcd(r, n) == 1:
            return r


def encrypt(pk: PaillierPublicKey, m: int, r: int | None = None,
            rng: random.Random | None = None) -> Ciphertext:
    if not 0 <= m < pk.n:
        raise PlaintextRangeError(f"plaintext {m} outside [0, n)")
    if r is None:
        r = random_unit(pk.n, rng)
    elif not 0 < r < pk.n or math.gcd(r, pk.n) != 1:
        raise RandomnessError("r must lie in Z*_n")
    nsq = pk.n_squared
    if pk.g == pk.n + 1:
        gm = (1 + m * pk.n) % nsq
    else:
        gm = pow(pk.g, m, nsq)
    return Ciphertext(value=gm * pow(r, pk.n, nsq) % nsq, key_id=pk.key_id)


def _check_ciphertext(pk: PaillierPublicKey, c: Ciphertext) -> None:
    if c.key_id != pk.key_id:
        raise KeyMismatchError("ciphertext was produced under a different public key")
    if not 0 < c.value < pk.n_squared or math.gcd(c.value, pk.n) != 1:
        raise MalformedCiphertextError("ciphertext is not in Z*_{n^2}")


def decrypt(sk: PaillierPrivateKey, pk: PaillierPublicKey, c: Ciphertext) -> int:
    _check_ciphertext(pk, c)
    return _L(pow(c.value, sk.lam, pk.n_squared), pk.n) * sk.mu % pk.n


def hom_add(pk: PaillierPublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Ciphertext of ``m1 + m2 mod n``."""
    _check_ciphertext(pk, c1)
    _check_ciphertext(pk, c2)
    return Ciphertext(value=c1.value * c2.value % pk.n_squared, key_id=pk.key_id)


def hom_sum(pk: PaillierPublicKey, ciphertexts: Iterable[Ciphertext]) -> Ciphertext:
    # E(0) with r = 1 is the neutral element
    return reduce(lambda a, b: hom_add(pk, a, b), ciphertexts, Ciphertext(1, pk.key_id))


def encode_signed(x: float, scale: int, n: int) -> int:
    """Map a signed rational to Z_n; negatives use the upper half of the ring.

    >>> encode_signed(0.58, 100, 10**6)
    58
    """
    magnitude = math.floor(abs(x) * scale + 0.5)
    if 2 * magnitude >= n:
        raise EncodingError(f"|{x}| * {scale} does not fit below n/2")
    if x < 0 and magnitude:
        return n - magnitude
    return magnitude


def decode_signed(raw: int, scale: int, n: int) -> float:
    """Inverse of :func:`encode_signed` (``52 -> 0.52`` at scale 100)."""
    if 2 * raw <= n:
        return raw / scale
    return -(n - raw) / scale
