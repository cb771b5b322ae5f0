"""Finite abelian groups recorded as per-prime partitions.

Group isomorphism types are plain values (:class:`GroupType`).  When a concrete
group is needed (subgroup lattices, explicit homomorphisms) it is realized as a
product of cyclic groups by :class:`AbelianGroup`, whose elements are integer
indices in mixed radix.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .residues import as_modulus, factorize

LATTICE_ORDER_BOUND = 2**12
LATTICE_SIZE_BOUND = 200_000


class CapacityError(RuntimeError):
    """A computation would exceed a configured size bound."""


# ---------------------------------------------------------------------------
# partitions

def partitions(weight: int, max_part: int | None = None, max_len: int | None = None):
    """Yield partitions of ``weight`` as nonincreasing tuples."""
    if max_part is None:
        max_part = weight
    if weight == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(weight, max_part), 0, -1):
        for rest in partitions(weight - first, first, None if max_len is None else max_len - 1):
            yield (first,) + rest


def bounded_partitions(max_part: int, max_len: int):
    """All partitions with parts <= max_part and at most max_len parts."""
    for weight in range(max_part * max_len + 1):
        yield from partitions(weight, max_part, max_len)


def conjugate(parts) -> tuple[int, ...]:
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x >= k) for k in range(1, parts[0] + 1))


# ---------------------------------------------------------------------------
# group types

_LABEL_RE = re.compile(r"^\s*(\d+)\s*:\s*\[([\d,\s]*)\]\s*$")


@dataclass(frozen=True, order=True)
class GroupType:
    """Isomorphism class of a finite abelian group.

    ``components`` is a tuple of ``(p, partition)`` pairs with ascending primes
    and nonempty nonincreasing partitions.
    """

    components: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        primes = [p for p, _ in self.components]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")
        for p, parts in self.components:
            if not parts:
                raise ValueError(f"empty partition stored for prime {p}")
            if any(x <= 0 for x in parts) or list(parts) != sorted(parts, reverse=True):
                raise ValueError(f"bad partition {parts} for prime {p}")
            if factorize(p).factorization != ((p, 1),):
                raise ValueError(f"{p} is not prime")

    @classmethod
    def from_dict(cls, comps) -> "GroupType":
        items = []
        for p, parts in sorted(dict(comps).items()):
            parts = tuple(sorted((int(x) for x in parts if x), reverse=True))
            if parts:
                items.append((int(p), parts))
        return cls(tuple(items))

    @classmethod
    def trivial(cls) -> "GroupType":
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> "GroupType":
        return cls.from_dict({p: [e] for p, e in factorize(n).factorization})

    @classmethod
    def from_invariants(cls, orders) -> "GroupType":
        """Build from a list of cyclic factor orders, e.g. [2, 6] for Z/2 x Z/6."""
        comps: dict[int, list[int]] = {}
        for n in orders:
            for p, e in factorize(int(n)).factorization:
                comps.setdefault(p, []).append(e)
        return cls.from_dict(comps)

    @classmethod
    def parse(cls, label: str) -> "GroupType":
        label = label.strip()
        if label in ("1", ""):
            return cls.trivial()
        comps = {}
        for chunk in label.split(";"):
            m = _LABEL_RE.match(chunk)
            if not m:
                raise ValueError(f"cannot parse group label {label!r}")
            p = int(m.group(1))
            if p in comps:
                raise ValueError(f"prime {p} repeated in {label!r}")
            body = m.group(2).strip()
            comps[p] = [int(x) for x in body.split(",")] if body else []
        return cls.from_dict(comps)

    @property
    def label(self) -> str:
        if not self.components:
            return "1"
        return ";".join(f"{p}:[{','.join(map(str, parts))}]" for p, parts in self.components)

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"GroupType({self.label!r})"

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.components)

    def partition(self, p: int) -> tuple[int, ...]:
        for q, parts in self.components:
            if q == p:
                return parts
        return ()

    def p_part(self, p: int) -> "GroupType":
        parts = self.partition(p)
        return GroupType(((p, parts),)) if parts else GroupType()

    def rank(self, p: int | None = None) -> int:
        """p-rank, or the maximum p-rank over all primes when ``p`` is None."""
        if p is not None:
            return len(self.partition(p))
        return max((len(parts) for _, parts in self.components), default=0)

    @property
    def order(self) -> int:
        return group_order(self)

    @property
    def exponent(self) -> int:
        return math.prod(p ** parts[0] for p, parts in self.components)

    @property
    def is_trivial(self) -> bool:
        return not self.components

    def cyclic_orders(self) -> list[int]:
        return [p**x for p, parts in self.components for x in parts]

    def tensor_mod(self, a) -> "GroupType":
        """Isomorphism type of ``G (x) Z/aZ``."""
        m = as_modulus(a)
        return GroupType.from_dict(
            {p: [min(x, m.exponent_of(p)) for x in parts] for p, parts in self.components if m.exponent_of(p)}
        )

    def divides_exponent(self, a) -> bool:
        return as_modulus(a).a % self.exponent == 0

    def __mul__(self, other: "GroupType") -> "GroupType":
        comps = {p: list(parts) for p, parts in self.components}
        for p, parts in other.components:
            comps.setdefault(p, []).extend(parts)
        return GroupType.from_dict(comps)


def group_order(G: GroupType) -> int:
    return math.prod(p ** sum(parts) for p, parts in G.components)


def _aut_p_closed(p: int, parts) -> int:
    # e_1 <= ... <= e_r; d_k = max{l : e_l = e_k}, c_k = min{l : e_l = e_k}
    e = sorted(parts)
    r = len(e)
    total = 1
    for k in range(1, r + 1):
        ek = e[k - 1]
        d = max(l for l in range(1, r + 1) if e[l - 1] == ek)
        c = min(l for l in range(1, r + 1) if e[l - 1] == ek)
        total *= (p**d - p ** (k - 1)) * p ** (ek * (r - d)) * p ** ((ek - 1) * (r - c + 1))
    return total


def aut_order_closed(G: GroupType) -> int:
    return math.prod(_aut_p_closed(p, parts) for p, parts in G.components)


def aut_order_bruteforce(G: GroupType, max_homs: int = 2**20) -> int:
    """Count bijective endomorphisms one prime at a time by explicit enumeration."""
    total = 1
    for p, _ in G.components:
        Gp = G.p_part(p)
        if hom_count(Gp, Gp) > max_homs:
            raise CapacityError(f"End({Gp}) has more than {max_homs} elements")
        total *= count_maps(Gp, Gp, bijective=True)
    return total


def aut_order(G: GroupType) -> int:
    """|Aut(G)|.  Brute force for tiny p-parts, closed form otherwise."""
    total = 1
    for p, parts in G.components:
        Gp = G.p_part(p)
        if group_order(Gp) < LATTICE_ORDER_BOUND and hom_count(Gp, Gp) <= 4096:
            total *= count_maps(Gp, Gp, bijective=True)
        else:
            total *= _aut_p_closed(p, parts)
    return total


def hom_count(H: GroupType, G: GroupType) -> int:
    total = 1
    for p, lam in H.components:
        mu = G.partition(p)
        total *= p ** sum(min(x, y) for x in lam for y in mu)
    return total


# ---------------------------------------------------------------------------
# realized groups

class AbelianGroup:
    """Z/n_1 x ... x Z/n_r with elements encoded as mixed-radix integers."""

    def __init__(self, gtype: GroupType):
        self.type = gtype
        self.orders = np.array(gtype.cyclic_orders(), dtype=np.int64)
        self.rank = len(self.orders)
        self.size = int(np.prod(self.orders)) if self.rank else 1
        strides = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            strides[i] = strides[i + 1] * self.orders[i + 1]
        self.strides = strides
        idx = np.arange(self.size, dtype=np.int64)
        if self.rank:
            self.coords = (idx[:, None] // strides[None, :]) % self.orders[None, :]
        else:
            self.coords = np.zeros((1, 0), dtype=np.int64)
        self.element_orders = np.array([self._order_of(c) for c in self.coords], dtype=np.int64)

    def _order_of(self, c) -> int:
        o = 1
        for x, n in zip(c, self.orders):
            o = math.lcm(o, int(n) // math.gcd(int(x), int(n)))
        return o

    def encode(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64) % self.orders
        return c @ self.strides

    def add(self, x, y):
        return self.encode(self.coords[x] + self.coords[y])

    def scale(self, k, x):
        return self.encode(np.asarray(k)[..., None] * self.coords[x])

    def generators(self) -> list[int]:
        """Indices of the standard generators (one per cyclic factor)."""
        return [int(s) for s in self.strides]

    def span(self, gens) -> np.ndarray:
        """Sorted element indices of the subgroup generated by ``gens``."""
        elems = np.zeros(1, dtype=np.int64)
        for g in gens:
            g = int(g)
            if g == 0 or np.any(elems == g):
                continue
            mult = self.scale(np.arange(self.element_orders[g]), np.full(self.element_orders[g], g))
            elems = np.unique(self.add(elems[:, None], mult[None, :]).ravel())
        return elems

    def mask(self, elems) -> int:
        bits = np.zeros(self.size, dtype=bool)
        bits[np.asarray(elems, dtype=np.int64)] = True
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def members(self, mask: int) -> np.ndarray:
        raw = np.frombuffer(mask.to_bytes((self.size + 7) // 8, "little"), dtype=np.uint8)
        return np.flatnonzero(np.unpackbits(raw, bitorder="little")[: self.size])

    def subgroup_type(self, elems) -> GroupType:
        """Identify a subgroup (given by its elements) from its element-order census."""
        return type_from_order_census(self.element_orders[np.asarray(elems, dtype=np.int64)])


def type_from_order_census(orders) -> GroupType:
    """GroupType of a finite abelian group given the orders of all its elements."""
    orders = np.asarray(orders, dtype=np.int64)
    n = len(orders)
    comps = {}
    for p, e in factorize(n).factorization:
        # |G[p^k]| = p^(lambda'_1 + ... + lambda'_k)
        logs = [0]
        k = 0
        while logs[-1] < e:
            k += 1
            cnt = int(np.count_nonzero(p**k % orders == 0))
            logs.append(round(math.log(cnt, p)))
        comps[p] = list(conjugate(tuple(logs[i] - logs[i - 1] for i in range(1, len(logs)))))
    return GroupType.from_dict(comps)


# ---------------------------------------------------------------------------
# subgroup lattice

@dataclass(frozen=True)
class SubgroupLattice:
    """All subgroups of a realized group with Mobius values mu(C, G) to the top."""

    group: GroupType
    subgroups: tuple[int, ...]  # bitmasks over element indices
    types: tuple[GroupType, ...]
    moebius: dict  # subgroup index -> mu(C, top), only nonzero values stored

    def __len__(self):
        return len(self.subgroups)

    def moebius_by_type(self) -> dict[GroupType, int]:
        out: dict[GroupType, int] = {}
        for i, mu in self.moebius.items():
            out[self.types[i]] = out.get(self.types[i], 0) + mu
        return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=256)
def build_lattice(G: GroupType, order_bound: int = LATTICE_ORDER_BOUND,
                  size_bound: int = LATTICE_SIZE_BOUND) -> SubgroupLattice:
    if group_order(G) > order_bound:
        raise CapacityError(f"|{G}| = {group_order(G)} exceeds lattice bound {order_bound}")
    A = AbelianGroup(G)
    cyclic = {}
    for g in range(A.size):
        elems = A.span([g])
        cyclic.setdefault(A.mask(elems), elems)
    cyclic_items = list(cyclic.items())

    found = {1: np.zeros(1, dtype=np.int64)}
    frontier = [1]
    while frontier:
        nxt = []
        for S in frontier:
            s_elems = found[S]
            for Zm, z_elems in cyclic_items:
                if Zm & S == Zm:
                    continue
                T_elems = np.unique(A.add(s_elems[:, None], z_elems[None, :]).ravel())
                T = A.mask(T_elems)
                if T not in found:
                    found[T] = T_elems
                    nxt.append(T)
                    if len(found) > size_bound:
                        raise CapacityError(f"{G} has more than {size_bound} subgroups")
        frontier = nxt

    masks = sorted(found, key=lambda m: (len(found[m]), m))
    types = tuple(A.subgroup_type(found[m]) for m in masks)
    top = len(masks) - 1
    mu = {top: 1}
    for i in range(top - 1, -1, -1):
        C = masks[i]
        val = -sum(v for j, v in mu.items() if masks[j] & C == C)
        if val:
            mu[i] = val
    return SubgroupLattice(G, tuple(masks), types, mu)


@lru_cache(maxsize=4096)
def _sur_p(H: GroupType, G: GroupType) -> int:
    lat = build_lattice(G)
    return sum(mu * hom_count(H, C) for C, mu in lat.moebius_by_type().items())


def sur_count(H: GroupType, G: GroupType) -> int:
    """Number of surjections H -> G via Mobius inversion on the subgroup lattice of G."""
    total = 1
    for p, mu in G.components:
        lam = H.partition(p)
        # quotients cannot gain rank or exponent
        if len(lam) < len(mu) or not lam or lam[0] < mu[0]:
            return 0
        total *= _sur_p(H.p_part(p), G.p_part(p))
        if total == 0:
            return 0
    return total


# ---------------------------------------------------------------------------
# enumeration and explicit maps

def enumerate_groups(a, max_rank: int) -> list[GroupType]:
    """All groups of exponent dividing ``a`` with p-rank <= max_rank at every prime."""
    if max_rank < 0:
        raise ValueError("max_rank must be nonnegative")
    m = as_modulus(a)
    per_prime = [[(p, lam) for lam in bounded_partitions(e, max_rank)] for p, e in m.factorization]
    out = [GroupType.from_dict(dict(choice)) for choice in itertools.product(*per_prime)]
    return sorted(out, key=lambda g: (g.order, g.components))


def enumerate_p_groups(p: int, max_weight: int, max_part: int | None = None,
                       max_len: int | None = None) -> list[GroupType]:
    """p-groups of order <= p^max_weight, sorted by order."""
    out = []
    for w in range(max_weight + 1):
        for lam in partitions(w, max_part, max_len):
            out.append(GroupType.from_dict({p: lam}))
    return out


def homomorphisms(H: GroupType, G: GroupType):
    """All homomorphisms H -> G as an array of generator images, one row per map.

    Row ``i`` lists the image in ``AbelianGroup(G)`` of each standard generator of
    ``AbelianGroup(H)``.
    """
    AH, AG = AbelianGroup(H), AbelianGroup(G)
    cands = []
    for n in AH.orders:
        cands.append(np.flatnonzero(n % AG.element_orders == 0))
    if not cands:
        return AH, AG, np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*cands, indexing="ij")
    return AH, AG, np.stack([g.ravel() for g in grids], axis=1)


def count_maps(H: GroupType, G: GroupType, bijective: bool = False, batch: int = 1 << 14) -> int:
    """Count surjective (or bijective) homomorphisms by explicit enumeration."""
    AH, AG, maps = homomorphisms(H, G)
    if bijective and AH.size != AG.size:
        return 0
    count = 0
    gen_coords = AG.coords  # (|G|, s)
    for start in range(0, len(maps), batch):
        chunk = maps[start:start + batch]
        # image of h = sum_i h_i * F(e_i)
        imgs = np.einsum("hr,brs->bhs", AH.coords, gen_coords[chunk]) if AH.rank else \
            np.zeros((len(chunk), 1, AG.rank), dtype=np.int64)
        idx = (imgs % AG.orders) @ AG.strides
        srt = np.sort(idx, axis=1)
        distinct = 1 + np.count_nonzero(np.diff(srt, axis=1), axis=1)
        count += int(np.count_nonzero(distinct == AG.size))
    return count
