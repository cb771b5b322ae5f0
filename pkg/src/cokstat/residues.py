"""Arithmetic in Z/aZ and its prime-power pieces Z/p^eZ."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_MODULUS = 2**31


class NonUnitError(ArithmeticError):
    """Raised when inverting a residue that is not a unit."""


def _trial_division(a: int) -> tuple[tuple[int, int], ...]:
    out = []
    d = 2
    while d * d <= a:
        if a % d == 0:
            e = 0
            while a % d == 0:
                a //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if a > 1:
        out.append((a, 1))
    return tuple(out)


@dataclass(frozen=True)
class Modulus:
    """A positive modulus together with its prime factorization."""

    a: int
    factorization: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.factorization:
            if e < 1:
                raise ValueError(f"exponent {e} for prime {p} must be positive")
            prod *= p**e
        if prod != self.a:
            raise ValueError(f"factorization {self.factorization} does not multiply to {self.a}")
        primes = [p for p, _ in self.factorization]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factorization)

    def exponent_of(self, p: int) -> int:
        for q, e in self.factorization:
            if q == p:
                return e
        return 0

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factorization]

    def __int__(self):
        return self.a

    def __str__(self):
        return str(self.a)


@lru_cache(maxsize=None)
def factorize(a: int) -> Modulus:
    """Factor ``a`` by trial division. ``factorize(12).factorization == ((2, 2), (3, 1))``."""
    a = int(a)
    if a < 1:
        raise ValueError("modulus must be a positive integer (Z/0Z is not supported)")
    if a > MAX_MODULUS:
        raise ValueError(f"modulus {a} exceeds the supported bound 2**31")
    return Modulus(a, _trial_division(a))


def as_modulus(a) -> Modulus:
    return a if isinstance(a, Modulus) else factorize(int(a))


def is_prime(p: int) -> bool:
    return p >= 2 and factorize(p).factorization == ((p, 1),)


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: Modulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.a:
            raise ValueError(f"{self.value} is not reduced mod {self.modulus.a}")

    @classmethod
    def of(cls, x: int, a) -> "Residue":
        m = as_modulus(a)
        return cls(x % m.a, m)


def valuation(x: int, p: int, e: int) -> int:
    """p-adic valuation of a residue mod p^e, capped at e (so valuation(0) == e)."""
    x %= p**e
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def unit_inverse(x: int, p: int, e: int) -> int:
    q = p**e
    x %= q
    if x % p == 0:
        raise NonUnitError(f"{x} is not a unit mod {p}^{e}")
    return pow(x, -1, q)


def crt_project(x: int, modulus, target: tuple[int, int]) -> int:
    m = as_modulus(modulus)
    if tuple(target) not in m.factorization:
        raise ValueError(f"{target} is not a prime-power factor of {m.a}")
    p, e = target
    return (x % m.a) % p**e


def crt_reconstruct(images, modulus) -> int:
    """Inverse of projecting onto every prime-power factor."""
    m = as_modulus(modulus)
    x = 0
    for (p, e), r in zip(m.factorization, images):
        q = p**e
        rest = m.a // q
        x += r * rest * pow(rest, -1, q)
    return x % m.a
