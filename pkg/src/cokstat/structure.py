"""Exact small-n checks of the column estimates behind the moment computation.

A map F: (Z/a)^n -> G is stored by the images of the standard basis vectors.
For such maps this module computes code distance and depth by subset search,
the column probabilities P(FX = A) by enumeration and by Fourier inversion over
the characters of G, and checks the explicit bounds those probabilities obey.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import AbelianGroup, CapacityError, GroupType, build_lattice, group_order
from .matrices import EntryDistribution
from .residues import factorize

EXACT_CODE_LIMIT = 24
EXACT_DEPTH_LIMIT = 20
ENUMERATION_LIMIT = 10**7
AGREEMENT_TOL = 1e-12


class AgreementError(AssertionError):
    """The enumeration and Fourier routes disagree."""


@lru_cache(maxsize=None)
def realize(G: GroupType) -> AbelianGroup:
    return AbelianGroup(G)


def ell(D: int) -> int:
    """Number of prime factors of D counted with multiplicity."""
    if D < 1:
        raise ValueError("D must be positive")
    return sum(e for _, e in factorize(D).factorization)


@dataclass(frozen=True)
class HomVG:
    """A homomorphism (Z/a)^n -> G, given by the image of each basis vector."""

    G: GroupType
    images: tuple[int, ...]

    def __post_init__(self):
        size = group_order(self.G)
        if any(not 0 <= x < size for x in self.images):
            raise ValueError("images must be element indices of G")

    @classmethod
    def from_coords(cls, G: GroupType, coords) -> "HomVG":
        A = realize(G)
        return cls(G, tuple(int(x) for x in A.encode(np.asarray(coords).reshape(len(coords), -1))))

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def group(self) -> AbelianGroup:
        return realize(self.G)

    def image_size(self, keep=None) -> int:
        """|F(V_keep)| where V_keep is spanned by the basis vectors in ``keep``."""
        imgs = self.images if keep is None else [self.images[i] for i in keep]
        return _span_size(self.G, frozenset(imgs))

    def image_index(self, removed=()) -> int:
        removed = set(removed)
        keep = [i for i in range(self.n) if i not in removed]
        return group_order(self.G) // self.image_size(keep)

    @property
    def surjective(self) -> bool:
        return self.image_index() == 1


@lru_cache(maxsize=1 << 16)
def _span_size(G: GroupType, gens: frozenset) -> int:
    return len(realize(G).span(sorted(gens)))


# ---------------------------------------------------------------------------
# codes and depth

@dataclass(frozen=True)
class CodeDistance:
    value: int
    exact: bool
    method: str

    def __int__(self):
        return self.value


def code_distance(F: HomVG, exact_limit: int = EXACT_CODE_LIMIT) -> CodeDistance:
    """min |sigma| with F(V minus sigma) != G (0 if F is not onto, n+1 if G is trivial).

    Exhaustive subset search by increasing size for n <= ``exact_limit``.
    Beyond that the minimum is taken over maximal subgroups H of G of the number
    of coordinates whose image leaves H.
    """
    n = F.n
    if not F.surjective:
        return CodeDistance(0, True, "subset")
    if n <= exact_limit:
        for size in range(1, n + 1):
            for sigma in itertools.combinations(range(n), size):
                if F.image_index(sigma) != 1:
                    return CodeDistance(size, True, "subset")
        return CodeDistance(n + 1, True, "subset")
    return CodeDistance(code_distance_by_subgroups(F), True, "subgroup")


def _subgroup_members(G: GroupType):
    A = realize(G)
    lat = build_lattice(G)
    return [(set(A.members(m).tolist()), len(A.members(m))) for m in lat.subgroups]


def code_distance_by_subgroups(F: HomVG) -> int:
    """Same quantity as :func:`code_distance`, via the subgroup lattice of G."""
    if not F.surjective:
        return 0
    size = group_order(F.G)
    best = F.n + 1
    for members, order in _subgroup_members(F.G):
        if order < size:
            best = min(best, sum(1 for x in F.images if x not in members))
    return best


def is_code(F: HomVG, delta: float) -> bool:
    return code_distance(F).value >= delta * F.n


def depth(F: HomVG, delta: float, exact_limit: int = EXACT_DEPTH_LIMIT) -> int:
    """Largest D = [G : F(V minus sigma)] reachable with |sigma| < ell(D) delta n, else 1."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    n = F.n
    if n > exact_limit:
        return depth_by_subgroups(F, delta)
    size = group_order(F.G)
    reach = ell(size) * delta * n
    best = 1
    for k in range(0, n + 1):
        if k >= reach:
            break
        for sigma in itertools.combinations(range(n), k):
            D = F.image_index(sigma)
            if D > best and k < ell(D) * delta * n:
                best = D
    return best


def depth_by_subgroups(F: HomVG, delta: float) -> int:
    """Depth via subgroups: H is reachable exactly when the images lying in H generate
    H, and then the smallest sigma removes the images outside H."""
    A = realize(F.G)
    size = group_order(F.G)
    best = 1
    for members, order in _subgroup_members(F.G):
        inside = [x for x in F.images if x in members]
        if len(A.span(sorted(set(inside)))) != order:
            continue
        D = size // order
        if D > best and F.n - len(inside) < ell(D) * delta * F.n:
            best = D
    return best


# ---------------------------------------------------------------------------
# character sums and column probabilities

def _law_vector(dist: EntryDistribution, a: int) -> np.ndarray:
    vec = np.zeros(a)
    for r, w in dist.residue_law(a).items():
        vec[r] = float(w)
    return vec


def characteristic_table(laws: np.ndarray, a: int) -> np.ndarray:
    """phi[d, t] = E_d zeta^(t y) for laws[d] a probability vector on Z/a."""
    t = np.arange(a)
    zeta = np.exp(2j * np.pi * np.outer(t, t) / a)  # zeta^(t v)
    return np.asarray(laws) @ zeta.T


@dataclass(frozen=True)
class CharacterSumReport:
    distribution: str
    a: int
    epsilon: float
    magnitudes: dict
    bound: float

    @property
    def holds(self) -> bool:
        return all(v <= self.bound + 1e-15 for v in self.magnitudes.values())

    def to_dict(self) -> dict:
        return {"distribution": self.distribution, "a": self.a, "epsilon": self.epsilon,
                "magnitudes": {str(k): v for k, v in self.magnitudes.items()},
                "bound": self.bound, "pass": self.holds}


def character_sums(dist: EntryDistribution, a: int) -> CharacterSumReport:
    """|E zeta^(m y)| for every m with zeta^m != 1, against exp(-eps/a^2)."""
    dist.check_balanced(a)
    eps = float(dist.balance(a))
    phi = characteristic_table(_law_vector(dist, a)[None, :], a)[0]
    mags = {m: float(abs(phi[m])) for m in range(1, a)}
    return CharacterSumReport(str(dist), a, eps, mags, math.exp(-eps / a**2))


def _image_coords(F: HomVG) -> np.ndarray:
    return F.group.coords[list(F.images)]


def column_prob_dft(F: HomVG, A: int, dist_or_laws, a: int | None = None) -> np.ndarray | float:
    """P(FX = A) = |G|^-1 sum_C zeta^(-C(A)) prod_i E zeta^(C(F v_i) X_i).

    ``dist_or_laws`` may be a single distribution or a (D, a) array of
    probability vectors on Z/a, in which case an array of D values is returned.
    """
    a = a or F.G.exponent
    single = isinstance(dist_or_laws, EntryDistribution)
    laws = _law_vector(dist_or_laws, a)[None, :] if single else np.asarray(dist_or_laws)
    phi = characteristic_table(laws, a)  # (D, a)
    grp = F.group
    orders = grp.orders
    scale = a // orders if grp.rank else np.zeros(0, dtype=np.int64)
    chars = grp.coords  # character c pairs with x as sum c_j x_j a/n_j
    t_img = (_image_coords(F) * scale) @ chars.T % a  # (n, |G|)
    t_A = (grp.coords[A] * scale) @ chars.T % a  # (|G|,)
    prod = np.prod(phi[:, t_img], axis=1) if F.n else np.ones((len(laws), grp.size))
    shift = np.exp(-2j * np.pi * t_A / a)
    vals = (prod * shift[None, :]).sum(axis=1).real / grp.size
    return float(vals[0]) if single else vals


def column_prob_enumerate(F: HomVG, A: int, dist_or_laws, a: int | None = None,
                          limit: int = ENUMERATION_LIMIT, chunk: int = 1 << 16):
    """P(FX = A) by summing over every outcome of X."""
    a = a or F.G.exponent
    single = isinstance(dist_or_laws, EntryDistribution)
    if single:
        law = dist_or_laws.residue_law(a)
        values = np.array(sorted(law), dtype=np.int64)
        probs = np.array([[float(law[v]) for v in values]])
    else:
        values = np.arange(a)
        probs = np.asarray(dist_or_laws, dtype=float)
    k, n = len(values), F.n
    if k**n > limit:
        raise CapacityError(f"{k}^{n} outcomes exceed the enumeration limit {limit}")
    grp = F.group
    img = _image_coords(F)  # (n, r)
    total = np.zeros(len(probs))
    radix = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, k**n, chunk):
        idx = np.arange(start, min(start + chunk, k**n), dtype=np.int64)
        digits = (idx[:, None] // radix[None, :]) % k  # (c, n)
        fx = grp.encode(values[digits] @ img) if grp.rank else np.zeros(len(idx), dtype=np.int64)
        hit = digits[fx == A]
        if len(hit):
            total += np.prod(probs[:, hit], axis=2).sum(axis=1)
    return float(total[0]) if single else total


def exact_column_prob(F: HomVG, A: int, dist: EntryDistribution, a: int | None = None,
                      tol: float = AGREEMENT_TOL) -> float:
    """P(FX = A) by Fourier inversion, cross-checked by enumeration when feasible."""
    via_dft = column_prob_dft(F, A, dist, a)
    try:
        via_enum = column_prob_enumerate(F, A, dist, a)
    except CapacityError:
        return via_dft
    if abs(via_dft - via_enum) > tol:
        raise AgreementError(f"DFT {via_dft!r} vs enumeration {via_enum!r}")
    return via_dft


# ---------------------------------------------------------------------------
# bound verification

def verify_code_lemma(F: HomVG, dist: EntryDistribution, delta: float, a: int | None = None) -> dict:
    """|P(FX = A) - 1/|G|| <= exp(-eps delta n / a^2) for every A, for codes F."""
    a = a or F.G.exponent
    dist.check_balanced(a)
    eps = float(dist.balance(a))
    w = code_distance(F).value
    report = {"lemma": "code-column", "G": F.G.label, "n": F.n, "a": a, "delta": delta,
              "distribution": str(dist), "epsilon": eps, "code_distance": w}
    if w < delta * F.n:
        report.update(status="precondition-violation", passed=False, rows=[])
        return report
    bound = math.exp(-eps * delta * F.n / a**2)
    size = group_order(F.G)
    rows = []
    for A in range(size):
        p = exact_column_prob(F, A, dist, a)
        dev = abs(p - 1 / size)
        rows.append({"A": A, "probability": p, "deviation": dev, "bound": bound,
                     "pass": dev <= bound + 1e-15})
    report.update(status="checked", bound=bound, rows=rows, passed=all(r["pass"] for r in rows))
    return report


def depth_column_bound(F: HomVG, dist: EntryDistribution, delta: float, a: int | None = None) -> dict:
    """P(FX = 0) <= (1 - eps)(D/|G| + exp(-eps delta n / a^2)) for depth D > 1 with
    [G : F(V)] < D."""
    a = a or F.G.exponent
    eps = float(dist.balance(a))
    D = depth(F, delta)
    idx = F.image_index()
    report = {"lemma": "depth-column", "G": F.G.label, "n": F.n, "a": a, "delta": delta,
              "distribution": str(dist), "epsilon": eps, "depth": D, "image_index": idx}
    if not (D > 1 and idx < D):
        report.update(status="not-applicable", passed=True)
        return report
    p0 = exact_column_prob(F, 0, dist, a)
    bound = (1 - eps) * (D / group_order(F.G) + math.exp(-eps * delta * F.n / a**2))
    report.update(status="checked", probability=p0, bound=bound, passed=p0 <= bound + 1e-15)
    return report


def census_depth(n: int, G: GroupType, delta: float, limit: int = ENUMERATION_LIMIT) -> dict:
    """Count every F in Hom((Z/a)^n, G) by depth.

    Depth is invariant under permuting coordinates, so maps are grouped by the
    multiset of their images and weighted by the number of orderings.
    """
    size = group_order(G)
    if size**n > limit:
        raise CapacityError(f"|G|^n = {size ** n} exceeds {limit}")
    counts: dict[int, int] = {}
    codes = 0
    depth1_codes = 0
    total = 0
    for multiset in itertools.combinations_with_replacement(range(size), n):
        mult = math.factorial(n)
        for _, grp in itertools.groupby(multiset):
            mult //= math.factorial(len(list(grp)))
        F = HomVG(G, multiset)
        D = depth(F, delta)
        code = code_distance(F).value >= delta * n
        counts[D] = counts.get(D, 0) + mult
        codes += mult * code
        depth1_codes += mult * (code and D == 1)
        total += mult
    rows = []
    for D in sorted(counts):
        row = {"depth": D, "count": counts[D]}
        if D > 1:
            L = ell(D)
            factor = math.comb(n, math.ceil(L * delta * n) - 1) * size**n * D ** (-n + L * delta * n)
            row.update(bound_factor=factor, ratio=counts[D] / factor)
        rows.append(row)
    return {"G": G.label, "n": n, "delta": delta, "total_maps": total, "rows": rows,
            "codes": codes, "depth_one": counts.get(1, 0),
            "depth_one_implies_code": depth1_codes == counts.get(1, 0)}


def probability_grid(a: int, step: float = 0.05, balanced_only: bool = True):
    """All laws on {0, ..., a-1} whose weights are multiples of ``step``."""
    k = round(1 / step)
    laws = []
    for comp in itertools.product(range(k + 1), repeat=a - 1):
        rest = k - sum(comp)
        if rest < 0:
            continue
        w = np.array(comp + (rest,), dtype=float) / k
        laws.append(w)
    laws = np.array(laws)
    eps = grid_epsilon(laws, a)
    if balanced_only:
        laws, eps = laws[eps > 1e-12], eps[eps > 1e-12]
    return laws, eps


def grid_epsilon(laws: np.ndarray, a: int) -> np.ndarray:
    """Balance parameter of each law vector on Z/a."""
    eps = np.ones(len(laws))
    for p, _ in factorize(a).factorization:
        residues = np.arange(a) % p
        mass = np.stack([laws[:, residues == r].sum(axis=1) for r in range(p)], axis=1)
        eps = np.minimum(eps, 1 - mass.max(axis=1))
    return eps
