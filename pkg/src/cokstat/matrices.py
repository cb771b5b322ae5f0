"""Balanced random matrices over Z/aZ and their cokernels.

Cokernels are computed one prime power at a time: for each p^e exactly dividing
``a`` the Smith form over the local ring Z/p^eZ gives ``cok(M) (x) Z/p^eZ``, and
the pieces are assembled into a :class:`GroupType`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _kernels
from .groups import GroupType, type_from_order_census
from .residues import Modulus, as_modulus
from .rng import RandomStream

_TABLE_LIMIT = 1 << 22


class UnbalancedError(ValueError):
    """The entry distribution puts all its mass on one residue class mod some p | a."""

    def __init__(self, p: int, r: int):
        super().__init__(f"distribution is not balanced: P(y = {r} mod {p}) = 1")
        self.p = p
        self.r = r


# ---------------------------------------------------------------------------
# entry distributions

@dataclass(frozen=True)
class EntryDistribution:
    """Finitely supported law on the integers with exact rational weights."""

    support: tuple[tuple[int, Fraction], ...]
    name: str = ""

    def __post_init__(self):
        if not self.support:
            raise ValueError("empty support")
        if any(w <= 0 for _, w in self.support):
            raise ValueError("probabilities must be positive")
        total = sum(w for _, w in self.support)
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_dict(cls, probs, name: str = "") -> "EntryDistribution":
        merged: dict[int, Fraction] = {}
        for v, w in dict(probs).items():
            w = Fraction(w)
            if w:
                merged[int(v)] = merged.get(int(v), Fraction(0)) + w
        return cls(tuple(sorted(merged.items())), name)

    @classmethod
    def uniform(cls, a: int) -> "EntryDistribution":
        return cls.from_dict({v: Fraction(1, a) for v in range(a)}, "uniform")

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.support)

    def residue_law(self, q: int) -> dict[int, Fraction]:
        """Pushforward to Z/qZ."""
        out: dict[int, Fraction] = {}
        for v, w in self.support:
            out[v % q] = out.get(v % q, Fraction(0)) + w
        return out

    def epsilon(self, p: int) -> Fraction:
        return 1 - max(self.residue_law(p).values())

    def balance(self, a) -> Fraction:
        """Largest eps for which the law is eps-balanced in Z/aZ."""
        m = as_modulus(a)
        return min((self.epsilon(p) for p in m.primes), default=Fraction(1))

    def balanced(self, a) -> bool:
        return all(self.epsilon(p) > 0 for p in as_modulus(a).primes)

    def check_balanced(self, a) -> None:
        for p in as_modulus(a).primes:
            law = self.residue_law(p)
            if len(law) == 1:
                raise UnbalancedError(p, next(iter(law)))

    @cached_property
    def denominator(self) -> int:
        return math.lcm(*(w.denominator for _, w in self.support))

    def lookup_table(self, a: int, resolution: int) -> np.ndarray:
        key = (a, resolution)
        cache = self.__dict__.setdefault("_tables", {})
        if key not in cache:
            cache[key] = self._build_table(a, resolution)
            cache[key].setflags(write=False)
        return cache[key]

    def _build_table(self, a: int, resolution: int) -> np.ndarray:
        """Map a uniform integer in [0, resolution) to a value mod a.

        ``resolution`` must be a multiple of the common denominator so the
        map is exact.
        """
        if resolution % self.denominator:
            raise ValueError("resolution must be a multiple of the denominator")
        table = np.empty(resolution, dtype=np.int64)
        pos = 0
        for v, w in self.support:
            k = int(w * resolution)
            table[pos:pos + k] = v % a
            pos += k
        return table

    def __str__(self):
        return self.name or "table:" + ",".join(f"{v}={w}" for v, w in self.support)


def parse_distribution(spec: str, a: int | None = None) -> EntryDistribution:
    """Parse ``uniform`` | ``bernoulli:q`` | ``table:v1=p1,v2=p2,...``.

    Probabilities are read as exact decimals or fractions ("0.9", "1/3").
    ``uniform`` means uniform on [0, a) and needs ``a``.
    """
    spec = spec.strip()
    if spec == "uniform":
        if a is None:
            raise ValueError("'uniform' needs the modulus a")
        return EntryDistribution.uniform(int(a))
    kind, _, body = spec.partition(":")
    if kind == "bernoulli":
        q = Fraction(body.strip())
        if not 0 <= q <= 1:
            raise ValueError(f"bernoulli parameter {q} outside [0, 1]")
        return EntryDistribution.from_dict({0: q, 1: 1 - q}, spec)
    if kind == "table":
        probs: dict[int, Fraction] = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            v, _, w = item.partition("=")
            probs[int(v)] = probs.get(int(v), Fraction(0)) + Fraction(w.strip())
        if not probs:
            raise ValueError("empty support")
        if sum(probs.values()) != 1:
            raise ValueError(f"probabilities sum to {sum(probs.values())}, not 1")
        return EntryDistribution.from_dict(probs, spec)
    raise ValueError(f"unknown distribution spec {spec!r}")


# ---------------------------------------------------------------------------
# matrices

@dataclass(frozen=True, eq=False)
class MatrixModA:
    """n x m matrix with entries in Z/aZ (stored dense, int64)."""

    entries: np.ndarray
    modulus: Modulus

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64)
        if e.ndim != 2:
            raise ValueError("entries must be two-dimensional")
        if e.size and (e.min() < 0 or e.max() >= self.modulus.a):
            raise ValueError("entries must lie in [0, a)")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def of(cls, rows, a) -> "MatrixModA":
        m = as_modulus(a)
        return cls(np.asarray(rows, dtype=np.int64) % m.a, m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def permuted(self, rows, cols) -> "MatrixModA":
        return MatrixModA(self.entries[np.ix_(rows, cols)], self.modulus)

    def __eq__(self, other):
        return (isinstance(other, MatrixModA) and self.modulus == other.modulus
                and np.array_equal(self.entries, other.entries))

    __hash__ = None


def _draw_dtype(bound: int):
    for dt in (np.uint8, np.uint16, np.uint32):
        if bound - 1 <= np.iinfo(dt).max:
            return dt
    return np.uint64


def sample_entries(n: int, m: int, dist, a: int, gen: np.random.Generator) -> np.ndarray:
    """n x m residues; variates are consumed column by column.

    ``dist`` is one EntryDistribution, or an (n, m) object array of them for
    entries with differing laws.
    """
    if isinstance(dist, EntryDistribution):
        L = dist.denominator
        if L <= _TABLE_LIMIT:
            draws = gen.integers(0, L, size=n * m, dtype=_draw_dtype(L))
            flat = dist.lookup_table(a, L)[draws]
        else:
            draws = gen.integers(0, L, size=n * m, dtype=np.uint64) if L < 2**63 else \
                np.array([int(x) for x in gen.integers(0, L, size=n * m, dtype=object)])
            cdf = np.cumsum([int(w * L) for _, w in dist.support])
            vals = np.array([v % a for v, _ in dist.support], dtype=np.int64)
            flat = vals[np.searchsorted(cdf, draws, side="right")]
        return flat.reshape(m, n).T
    grid = np.asarray(dist, dtype=object)
    if grid.shape != (n, m):
        raise ValueError(f"distribution grid has shape {grid.shape}, expected {(n, m)}")
    laws = {id(d): d for d in grid.ravel()}
    L = math.lcm(*(d.denominator for d in laws.values()))
    if L > _TABLE_LIMIT:
        raise ValueError("common denominator of the entry laws is too large")
    draws = gen.integers(0, L, size=n * m, dtype=_draw_dtype(L)).reshape(m, n).T
    out = np.empty((n, m), dtype=np.int64)
    for key, d in laws.items():
        mask = np.vectorize(lambda x: id(x) == key, otypes=[bool])(grid)
        out[mask] = d.lookup_table(a, L)[draws[mask]]
    return out


def sample_matrix(n: int, u: int, dist, modulus, stream: RandomStream) -> MatrixModA:
    """Random n x (n+u) matrix mod a with independent entries drawn from ``dist``."""
    if n < 1 or u < 0:
        raise ValueError("need n >= 1 and u >= 0")
    mod = as_modulus(modulus)
    laws = [dist] if isinstance(dist, EntryDistribution) else set(np.asarray(dist, dtype=object).ravel())
    for d in laws:
        d.check_balanced(mod)
    entries = sample_entries(n, n + u, dist, mod.a, stream.generator())
    return MatrixModA(entries, mod)


# ---------------------------------------------------------------------------
# rank and Smith form

@dataclass(frozen=True)
class SnfDiagonal:
    p: int
    e: int
    valuations: tuple[int, ...]
    n: int
    m: int

    def partition(self) -> tuple[int, ...]:
        """Partition of cok (x) Z/p^eZ: positive valuations plus free Z/p^e summands."""
        parts = [v for v in self.valuations if v > 0] + [self.e] * max(0, self.n - self.m)
        return tuple(sorted(parts, reverse=True))


def _check_prime(M: MatrixModA, p: int) -> int:
    e = M.modulus.exponent_of(p)
    if e == 0:
        raise ValueError(f"{p} does not divide the modulus {M.modulus.a}")
    return e


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    n, m = bits.shape
    packed = np.packbits(bits.astype(np.uint8, copy=False), axis=1, bitorder="little")
    words = (m + 63) // 64
    buf = np.zeros((n, words * 8), dtype=np.uint8)
    buf[:, :packed.shape[1]] = packed
    return buf.view("<u8").astype(np.uint64)


def rank_mod_p(M: MatrixModA, p: int) -> int:
    _check_prime(M, p)
    A = M.entries if M.modulus.a == p else M.entries % p
    if p == 2:
        if A.shape[0] > A.shape[1]:
            A = A.T
        return int(_kernels.rank_gf2(_pack_bits(A), A.shape[1]))
    vals = _kernels.snf_valuations(np.array(A, dtype=np.int64, order="C"), p, 1)
    return int(np.count_nonzero(vals == 0))


def snf_mod_prime_power(M: MatrixModA, p: int, e: int | None = None) -> SnfDiagonal:
    e_full = _check_prime(M, p)
    if e is None:
        e = e_full
    if e != e_full:
        raise ValueError(f"p^e must be the full {p}-part of {M.modulus.a}")
    if e == 1:
        r = rank_mod_p(M, p)
        vals = (0,) * r + (1,) * (min(M.n, M.m) - r)
    else:
        A = np.array(M.entries % p**e, dtype=np.int64, order="C")
        vals = tuple(int(v) for v in _kernels.snf_valuations(A, p, e))
    return SnfDiagonal(p, e, vals, M.n, M.m)


def cokernel_group(M: MatrixModA) -> GroupType:
    """Isomorphism type of cok(M) (x) Z/aZ."""
    comps = {}
    for p, e in M.modulus.factorization:
        parts = snf_mod_prime_power(M, p, e).partition()
        if parts:
            comps[p] = parts
    return GroupType.from_dict(comps)


def cokernel_bruteforce(M: MatrixModA) -> GroupType:
    """Reference cokernel: build the column span in (Z/a)^n and census the quotient."""
    a = M.modulus.a
    n = M.n
    if a**n > 2**20:
        raise ValueError("ambient group too large for the brute-force oracle")
    strides = a ** np.arange(n - 1, -1, -1, dtype=np.int64)
    coords = (np.arange(a**n)[:, None] // strides) % a
    span = np.zeros(a**n, dtype=bool)
    span[0] = True
    for j in range(M.m):
        col = M.column(j)
        cur = np.flatnonzero(span)
        for k in range(1, a):
            shifted = ((coords[cur] + k * col) % a) @ strides
            span[shifted] = True
    # order of v + span in the quotient: least k >= 1 with k v in span
    order = np.zeros(a**n, dtype=np.int64)
    for k in range(a, 0, -1):
        order[span[((k * coords) % a) @ strides]] = k
    # every coset has |span| members sharing one order
    vals, counts = np.unique(order, return_counts=True)
    size = int(np.count_nonzero(span))
    return type_from_order_census(np.repeat(vals, counts // size))
