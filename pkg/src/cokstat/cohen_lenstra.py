"""Cohen-Lenstra distributions with parameter u.

For a prime p the random p-group Y_p takes the value B with probability
``prod_k (1 - p^(-k-u)) / (|B|^u |Aut B|)``; over a set of primes the
components are independent.  Everything here works with explicit truncation:
tables carry the probability mass they leave out instead of renormalizing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .groups import GroupType, aut_order_closed, enumerate_p_groups, group_order, partitions, sur_count
from .residues import as_modulus, is_prime
from .rng import RandomStream

PRODUCT_CUTOFF = 1e-16
MAX_CUTOFF_EXPONENT = 12


class _Overflow:
    """Outcome standing for every group beyond the enumeration cutoff."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OVERFLOW"

    label = "overflow"


OVERFLOW = _Overflow()


def product_terms(p: int, u: int) -> int:
    """Number of factors kept in prod_{k>=1} (1 - p^(-k-u))."""
    k = 1
    while float(p) ** (-k - u) >= PRODUCT_CUTOFF:
        k += 1
    return k


@lru_cache(maxsize=None)
def euler_product(p: int, u: int = 0) -> float:
    """prod_{k>=1} (1 - p^(-k-u)), truncated once p^(-k-u) < 1e-16."""
    return math.prod(1.0 - float(p) ** (-k - u) for k in range(1, product_terms(p, u)))


@dataclass(frozen=True)
class CLParams:
    u: int
    primes: tuple[int, ...]
    cutoff: int = 2**12

    def __post_init__(self):
        if self.u < 0:
            raise ValueError("u must be nonnegative")
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if not all(is_prime(p) for p in self.primes):
            raise ValueError(f"{self.primes} are not all prime")
        object.__setattr__(self, "primes", tuple(sorted(set(self.primes))))

    @classmethod
    def for_modulus(cls, a, u: int, cutoff: int = 2**12) -> "CLParams":
        return cls(u, as_modulus(a).primes, cutoff)

    def product_terms(self, p: int) -> int:
        return product_terms(p, self.u)


def cl_probability(B: GroupType, params: CLParams) -> float:
    outside = set(B.primes) - set(params.primes)
    if outside:
        raise ValueError(f"{B} has primes {sorted(outside)} outside {params.primes}")
    u = params.u
    c = math.prod(euler_product(p, u) for p in params.primes)
    return c / (float(group_order(B)) ** u * aut_order_closed(B))


def cl_rank_probability(k: int, u: int, p: int) -> float:
    """Limiting P(corank = k) for n x (n+u) matrices over F_p."""
    if k < 0:
        return 0.0
    q = 1.0 / p
    head = math.prod(1.0 - q**i for i in range(1, k + 1))
    head *= math.prod(1.0 - q**i for i in range(1, k + u + 1))
    return q ** (k * (k + u)) / head * euler_product(p, 0)


@dataclass
class CLTable:
    """Truncated list of (group, probability) pairs plus the omitted mass."""

    entries: list[tuple[GroupType, float]]
    tail_mass: float
    meta: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def as_dict(self) -> dict:
        return dict(self.entries)

    def probability(self, G: GroupType) -> float:
        return self.as_dict().get(G, 0.0)


def _cutoff_exponent(p: int, cutoff: int) -> int:
    N = 0
    while p ** (N + 1) <= cutoff:
        N += 1
    return N


def enumerate_cl_support(p: int, u: int, cutoff: int) -> CLTable:
    """All p-groups of order <= cutoff with their CL(u) probabilities."""
    N = _cutoff_exponent(p, cutoff)
    if p**N != cutoff:
        raise ValueError(f"cutoff {cutoff} is not a power of {p}")
    if N > MAX_CUTOFF_EXPONENT:
        raise ValueError(f"cutoff {p}^{N} exceeds {p}^{MAX_CUTOFF_EXPONENT}")
    return _p_table(p, u, N)


@lru_cache(maxsize=None)
def _p_table(p: int, u: int, N: int) -> CLTable:
    params = CLParams(u, (p,))
    entries = [(B, cl_probability(B, params)) for B in enumerate_p_groups(p, N)]
    return CLTable(entries, max(0.0, 1.0 - math.fsum(w for _, w in entries)),
                   {"p": p, "u": u, "cutoff": p**N})


def sample_cl_group(p: int, u: int, cutoff: int, stream: RandomStream):
    """Inverse-CDF draw from the truncated table; OVERFLOW with the tail's probability."""
    table = enumerate_cl_support(p, u, cutoff)
    x = stream.generator().random()
    acc = 0.0
    for B, w in table:
        acc += w
        if x < acc:
            return B
    return OVERFLOW


def cl_moment_check(G: GroupType, u: int, cutoff: int, primes=None) -> tuple[float, float]:
    """Truncated E #Sur(Y, G) over groups of order <= cutoff at each prime, and its
    distance from |G|^-u."""
    primes = tuple(primes) if primes is not None else G.primes
    if not primes:
        raise ValueError("no primes given for the trivial group")
    if set(G.primes) - set(primes):
        raise ValueError(f"{G} is not supported on {primes}")
    total = 1.0
    for p in primes:
        N = min(_cutoff_exponent(p, cutoff), MAX_CUTOFF_EXPONENT)
        Gp = G.p_part(p)
        total *= math.fsum(w * sur_count(B, Gp) for B, w in _p_table(p, u, N))
    return total, abs(total - float(group_order(G)) ** -u)


def cl_tensor_table(a, u: int, tail_target: float = 1e-7, max_weight: int = 40) -> CLTable:
    """Law of Y (x) Z/aZ: CL(u) pushed forward by capping parts at each e_p.

    Enumeration at each prime stops once the omitted mass is below
    ``tail_target`` (or at ``max_weight``); the overall omitted mass is reported.
    """
    mod = as_modulus(a)
    combined: dict[GroupType, float] = {GroupType(): 1.0}
    for p, e in mod.factorization:
        local, tail = _capped_p_table(p, u, e, tail_target, max_weight)
        nxt: dict[GroupType, float] = {}
        for H, w in combined.items():
            for B, v in local.items():
                key = H * B
                nxt[key] = nxt.get(key, 0.0) + w * v
        combined = nxt
    entries = sorted(combined.items(), key=lambda kv: (kv[0].order, kv[0].components))
    tail = max(0.0, 1.0 - math.fsum(w for _, w in entries))
    return CLTable(entries, tail, {"a": mod.a, "u": u})


@lru_cache(maxsize=None)
def _capped_p_table(p, u, e, tail_target, max_weight):
    params = CLParams(u, (p,))
    c = euler_product(p, u)
    out: dict[GroupType, float] = {}
    mass = 0.0
    for w in range(max_weight + 1):
        for lam in partitions(w):
            B = GroupType(((p, lam),)) if lam else GroupType()
            prob = c / (float(group_order(B)) ** u * aut_order_closed(B))
            H = B.tensor_mod(p**e)
            out[H] = out.get(H, 0.0) + prob
            mass += prob
        if 1.0 - mass < tail_target:
            break
    return out, max(0.0, 1.0 - mass)


def cl_rank_table(p: int, u: int, kmax: int = 40) -> CLTable:
    entries = [(k, cl_rank_probability(k, u, p)) for k in range(kmax + 1)]
    return CLTable(entries, max(0.0, 1.0 - math.fsum(w for _, w in entries)), {"p": p, "u": u})
