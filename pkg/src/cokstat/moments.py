"""Recovering a distribution on groups from its moments E #Sur(X, G).

Restricting to groups of exponent dividing ``a`` and p-rank <= R gives a square
system which is triangular once groups are ordered by size, because #Sur(H, G)
vanishes unless G is a quotient of H.  The solve is done in exact rationals.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .groups import GroupType, aut_order, enumerate_groups, group_order, sur_count
from .residues import Modulus, as_modulus

log = logging.getLogger(__name__)


def wedge2_order(G: GroupType) -> int:
    """|wedge^2 G| = prod_p p^(sum_{i<j} min(lambda_i, lambda_j))."""
    total = 1
    for p, parts in G.components:
        total *= p ** sum(min(parts[i], parts[j]) for i in range(len(parts)) for j in range(i + 1, len(parts)))
    return total


@dataclass
class MomentTable:
    modulus: Modulus
    entries: dict[GroupType, Fraction]
    provenance: dict[GroupType, str] = field(default_factory=dict)

    def __post_init__(self):
        self.modulus = as_modulus(self.modulus)
        self.entries = {G: Fraction(v) for G, v in self.entries.items()}
        for G in self.entries:
            if not G.divides_exponent(self.modulus):
                raise ValueError(f"{G} does not have exponent dividing {self.modulus.a}")
            self.provenance.setdefault(G, "theoretical")
            if self.entries[G] > wedge2_order(G):
                log.warning("moment of %s exceeds |wedge^2 G| = %d", G, wedge2_order(G))

    def __getitem__(self, G):
        return self.entries[G]

    def __contains__(self, G):
        return G in self.entries

    @classmethod
    def cohen_lenstra(cls, a, u: int, max_rank: int) -> "MomentTable":
        """M_G = |G|^-u for every G of exponent dividing a and rank <= max_rank."""
        return cls(a, {G: Fraction(1, group_order(G) ** u) for G in enumerate_groups(a, max_rank)})


@dataclass
class SolvedDistribution:
    probabilities: dict[GroupType, Fraction]
    truncation_rank: int
    residual: dict[GroupType, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.probabilities.values(), Fraction(0))

    @property
    def deficit(self) -> Fraction:
        return 1 - self.total

    def __getitem__(self, G):
        return self.probabilities[G]


def _check_quotient_rule(H: GroupType, G: GroupType, s: int) -> None:
    if s and (group_order(G) > group_order(H) or any(G.rank(p) > H.rank(p) for p in G.primes)):
        raise AssertionError(f"#Sur({H}, {G}) = {s} violates the quotient constraints")


def solve(moments: MomentTable, R: int) -> SolvedDistribution:
    """Exact back-substitution of sum_H P(H) #Sur(H, G) = M_G over rank <= R groups."""
    groups = enumerate_groups(moments.modulus, R)
    missing = [G for G in groups if G not in moments]
    if missing:
        raise KeyError(f"missing moments for {', '.join(G.label for G in missing)}")
    probs: dict[GroupType, Fraction] = {}
    # largest groups first: only strictly larger H contribute to the equation of G
    for G in reversed(groups):
        acc = moments[G]
        for H, pH in probs.items():
            if pH and group_order(H) > group_order(G):
                s = sur_count(H, G)
                _check_quotient_rule(H, G, s)
                acc -= pH * s
        diag = sur_count(G, G)
        assert diag == aut_order(G) and diag > 0, f"bad diagonal for {G}"
        probs[G] = acc / diag
    ordered = {G: probs[G] for G in groups}
    residual = {}
    for G, M in moments.entries.items():
        residual[G] = M - sum((pH * sur_count(H, G) for H, pH in ordered.items()), Fraction(0))
    return SolvedDistribution(ordered, R, residual)


def moments_from_distribution(dist: dict, a, R: int) -> MomentTable:
    """M_G = sum_H dist(H) #Sur(H, G) for all G of exponent dividing a, rank <= R."""
    mod = as_modulus(a)
    for H in dist:
        if H.rank() > R or not H.divides_exponent(mod):
            raise ValueError(f"{H} is outside the rank-{R} groups of exponent dividing {mod.a}")
    entries = {}
    for G in enumerate_groups(mod, R):
        entries[G] = sum((Fraction(w) * sur_count(H, G) for H, w in dist.items()), Fraction(0))
    return MomentTable(mod, entries, {G: "derived" for G in entries})


def tail_bound(solved: SolvedDistribution) -> float:
    return float(max(0, solved.deficit))
