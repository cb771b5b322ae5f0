"""Monte Carlo experiments on cokernels and ranks of random matrices."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .cohen_lenstra import OVERFLOW, CLTable, cl_rank_table, cl_tensor_table
from .groups import GroupType, group_order, sur_count
from .matrices import EntryDistribution, MatrixModA, cokernel_group, parse_distribution, rank_mod_p, \
    sample_entries
from .residues import as_modulus, is_prime
from .rng import RandomStream

KINDS = ("cokernel-dist", "rank-dist", "moment", "universality-pair")
Z95 = NormalDist().inv_cdf(0.975)


@dataclass
class ExperimentConfig:
    n: int = 50
    u: int = 0
    a: int = 2
    dist: str = "uniform"
    trials: int = 1000
    seed: int = 0
    threads: int = 1
    kind: str = "cokernel-dist"
    group: str = "1"
    delta: float = 0.1
    entry_laws: object = field(default=None, repr=False)  # optional (n, n+u) grid of laws

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or self.u < 0:
            raise ValueError("need n >= 1 and u >= 0")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        for d in self.laws():
            d.check_balanced(self.a)

    @property
    def modulus(self):
        return as_modulus(self.a)

    @property
    def target(self) -> GroupType:
        return GroupType.parse(self.group)

    def distribution(self) -> EntryDistribution:
        return parse_distribution(self.dist, self.a)

    def laws(self):
        if self.entry_laws is None:
            return [self.distribution()]
        return list({id(d): d for d in np.asarray(self.entry_laws, dtype=object).ravel()}.values())

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        """Read a flat ``key = value`` file; keyword overrides win."""
        return cls(**{**read_config_file(path), **{k: v for k, v in overrides.items() if v is not None}})

    def describe(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "entry_laws"}
        out["heterogeneous"] = self.entry_laws is not None
        return out


_INT_KEYS = {"n", "u", "a", "trials", "seed", "threads"}


def read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key == "delta":
                out[key] = float(value)
            else:
                out[key] = value
    return out


# ---------------------------------------------------------------------------
# statistics

def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _sort_key(k):
    if isinstance(k, GroupType):
        return (0, k.order, k.components)
    if k is OVERFLOW:
        return (2,)
    return (1, k)


@dataclass
class EmpiricalDistribution:
    counts: dict
    trials: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.trials:
            raise ValueError("counts do not add up to the number of trials")
        self.counts = {k: self.counts[k] for k in sorted(self.counts, key=_sort_key)}

    def frequency(self, key) -> float:
        return self.counts.get(key, 0) / self.trials

    def interval(self, key) -> tuple[float, float]:
        return wilson_interval(self.counts.get(key, 0), self.trials)

    def probabilities(self) -> dict:
        return {k: c / self.trials for k, c in self.counts.items()}

    def rows(self):
        for k, c in self.counts.items():
            lo, hi = self.interval(k)
            yield k, c, c / self.trials, lo, hi


@dataclass
class MomentEstimate:
    target: GroupType
    mean: float
    stderr: float
    trials: int
    distribution: EmpiricalDistribution | None = None


# ---------------------------------------------------------------------------
# trial execution

class _Trials:
    """Per-experiment prepared state; trial t is a pure function of (seed, t)."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.mod = cfg.modulus
        self.m = cfg.n + cfg.u
        self.law = cfg.entry_laws if cfg.entry_laws is not None else cfg.distribution()

    def matrix(self, t: int) -> MatrixModA:
        gen = RandomStream(self.cfg.seed, t).generator()
        return MatrixModA(sample_entries(self.cfg.n, self.m, self.law, self.mod.a, gen), self.mod)


def _run(cfg: ExperimentConfig, observe) -> list:
    trials = _Trials(cfg)

    def work(bounds):
        lo, hi = bounds
        return [observe(trials.matrix(t)) for t in range(lo, hi)]

    step = max(1, math.ceil(cfg.trials / (cfg.threads * 8)))
    chunks = [(lo, min(lo + step, cfg.trials)) for lo in range(0, cfg.trials, step)]
    if cfg.threads == 1:
        parts = map(work, chunks)
        return [x for part in parts for x in part]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        # map() yields in submission order, so the reduction is by trial index
        return [x for part in pool.map(work, chunks) for x in part]


def _tally(values) -> dict:
    out: dict = {}
    for v in values:
        out[v] = out.get(v, 0) + 1
    return out


def run_cokernel_experiment(cfg: ExperimentConfig) -> EmpiricalDistribution:
    groups = _run(cfg, cokernel_group)
    return EmpiricalDistribution(_tally(groups), cfg.trials)


def run_rank_experiment(cfg: ExperimentConfig) -> EmpiricalDistribution:
    """Histogram of coranks n - rank(M mod p); requires a prime modulus."""
    if not is_prime(cfg.a):
        raise ValueError(f"rank experiments need a prime modulus, got {cfg.a}")
    p, n = cfg.a, cfg.n
    coranks = _run(cfg, lambda M: n - rank_mod_p(M, p))
    return EmpiricalDistribution(_tally(coranks), cfg.trials)


@lru_cache(maxsize=4096)
def _sur_cached(H: GroupType, G: GroupType) -> int:
    return sur_count(H, G)


def run_moment_experiment(cfg: ExperimentConfig, G: GroupType | None = None) -> MomentEstimate:
    """Sample mean of #Sur(cok M, G) with its standard error."""
    G = cfg.target if G is None else G
    if not G.divides_exponent(cfg.a):
        raise ValueError(f"{G} does not have exponent dividing {cfg.a}")
    dist = run_cokernel_experiment(cfg)
    keys = list(dist.counts)
    vals = np.array([float(_sur_cached(H, G)) for H in keys])
    cnts = np.array([dist.counts[H] for H in keys], dtype=float)
    T = cfg.trials
    mean = float((vals * cnts).sum() / T)
    var = float((cnts * (vals - mean) ** 2).sum() / (T - 1)) if T > 1 else 0.0
    return MomentEstimate(G, mean, math.sqrt(var / T), T, dist)


# ---------------------------------------------------------------------------
# comparisons

def _as_probabilities(d) -> dict:
    if isinstance(d, EmpiricalDistribution):
        return d.probabilities()
    if isinstance(d, CLTable):
        out = dict(d.entries)
        if d.tail_mass > 0:
            out[OVERFLOW] = d.tail_mass
        return out
    return dict(d)


def tv_distance(d1, d2) -> float:
    """Half the L1 distance on the union of the two supports."""
    p, q = _as_probabilities(d1), _as_probabilities(d2)
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def theoretical_table(cfg: ExperimentConfig) -> CLTable:
    if cfg.kind == "rank-dist":
        return cl_rank_table(cfg.a, cfg.u)
    return cl_tensor_table(cfg.a, cfg.u)


def universality_pair(cfg_a: ExperimentConfig, cfg_b: ExperimentConfig) -> dict:
    """Run two experiments differing only in their entry laws and compare them."""
    for attr in ("n", "u", "a"):
        if getattr(cfg_a, attr) != getattr(cfg_b, attr):
            raise ValueError(f"configs differ in {attr}")
    kind = cfg_a.kind if cfg_a.kind in ("rank-dist", "cokernel-dist") else "cokernel-dist"
    cfg_a, cfg_b = replace(cfg_a, kind=kind), replace(cfg_b, kind=kind)
    runner = run_rank_experiment if kind == "rank-dist" else run_cokernel_experiment
    da, db = runner(cfg_a), runner(cfg_b)
    theory = theoretical_table(cfg_a)
    return {
        "kind": kind,
        "config_a": cfg_a.describe(),
        "config_b": cfg_b.describe(),
        "a": da,
        "b": db,
        "theory": theory,
        "tv_ab": tv_distance(da, db),
        "tv_a_theory": tv_distance(da, theory),
        "tv_b_theory": tv_distance(db, theory),
    }
