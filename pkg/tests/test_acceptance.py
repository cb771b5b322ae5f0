"""Acceptance criteria at their stated sizes.

Each test prints one ``[PASS]`` or ``[FAIL]`` line naming the criterion and
the measured values, then asserts.  Run with ``pytest tests/test_acceptance.py``;
the lines appear even without ``-s``.
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from cokstat.cohen_lenstra import CLParams, cl_moment_check, cl_probability, cl_rank_probability, \
    enumerate_cl_support
from cokstat.experiments import ExperimentConfig, run_cokernel_experiment, run_moment_experiment, \
    run_rank_experiment, tv_distance
from cokstat.groups import GroupType, aut_order, count_maps, enumerate_groups, partitions, sur_count
from cokstat.matrices import MatrixModA, cokernel_bruteforce, cokernel_group
from cokstat.moments import MomentTable, moments_from_distribution, solve
from cokstat.residues import factorize
from cokstat.verify import check_character_grid, check_code_lemma, check_depth_bound

TRIALS = 100_000
SEED = 20240601
G = GroupType.parse
T = GroupType()
_cache = {}


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok
    return emit


def rank_run(n, dist):
    key = (n, dist)
    if key not in _cache:
        cfg = ExperimentConfig(n=n, a=2, dist=dist, trials=TRIALS, seed=SEED, kind="rank-dist")
        _cache[key] = run_rank_experiment(cfg)
    return _cache[key]


def groups_up_to(max_order):
    out = []
    for order in range(1, max_order + 1):
        per_prime = [[(p, lam) for lam in partitions(e)] for p, e in factorize(order).factorization]
        out += [GroupType.from_dict(dict(c)) for c in itertools.product(*per_prime)]
    return out


def test_criterion_01_rank_distribution(report):
    d = rank_run(100, "uniform")
    targets = {0: (0.28879, 0.010), 1: (0.57758, 0.010), 2: (0.12836, 0.007)}
    for k, (t, _) in targets.items():
        assert t == pytest.approx(cl_rank_probability(k, 0, 2), abs=1e-5)
    ok = all(abs(d.frequency(k) - t) <= tol for k, (t, tol) in targets.items())
    report(1, ok, "p=2 n=100 uniform corank freqs "
           + ", ".join(f"k={k}: {d.frequency(k):.5f} (target {t})" for k, (t, _) in targets.items()))
    assert ok


def test_criterion_02_universality(report):
    d = rank_run(200, "bernoulli:0.9")
    ref = rank_run(100, "uniform")
    targets = {0: 0.28879, 1: 0.57758, 2: 0.12836}
    tv = tv_distance(d, ref)
    ok = all(abs(d.frequency(k) - t) <= 0.015 for k, t in targets.items()) and tv < 0.02
    report(2, ok, "bernoulli:0.9 n=200 freqs "
           + ", ".join(f"k={k}: {d.frequency(k):.5f}" for k in targets) + f"; TV to uniform run {tv:.5f}")
    assert ok


def test_criterion_03_cokernel_distribution(report):
    # Z/9 is only visible in cok (x) Z/aZ when 9 | a; a = 27 separates Z/3, Z/9 and Z/27+
    cfg = ExperimentConfig(n=50, a=27, trials=TRIALS, seed=SEED)
    d = run_cokernel_experiment(cfg)
    params = CLParams(0, (3,))
    cases = [(T, 0.56013, 0.010), (G("3:[1]"), 0.28006, 0.010), (G("3:[2]"), None, 0.005),
             (G("3:[1,1]"), 0.01167, 0.004)]
    lines, ok = [], True
    for H, stated, tol in cases:
        target = cl_probability(H, params)
        if stated is not None:
            assert target == pytest.approx(stated, abs=1e-5)
        good = abs(d.frequency(H) - target) <= tol
        ok &= good
        lines.append(f"{H.label}: {d.frequency(H):.5f} (target {target:.5f})")
    # the listed value 0.03501 for Z/9 equals c_3/16; |Aut(Z/9)| = 6 gives c_3/6
    lines.append(f"listed Z/9 value 0.03501 vs c_3/|Aut(Z/9)| = {cl_probability(G('3:[2]'), params):.5f}")
    report(3, ok, "p=3 n=50 uniform, a=27: " + "; ".join(lines))
    assert ok


def test_criterion_04_u_shift(report):
    cfg = ExperimentConfig(n=100, u=1, a=2, trials=TRIALS, seed=SEED, kind="rank-dist")
    d = run_rank_experiment(cfg)
    target = math.prod(1 - 2.0 ** (-k - 1) for k in range(1, 80))
    ok = abs(d.frequency(0) - 0.57758) <= 0.010 and abs(target - 0.57758) < 1e-5
    report(4, ok, f"p=2 u=1 n=100 freq(trivial) {d.frequency(0):.5f} (target {target:.5f})")
    assert ok


def test_criterion_05_moments(report):
    runs = [(G("3:[1]"), 3, 0, 1.0, 0.05), (G("3:[1]"), 3, 1, 1 / 3, 0.02), (G("2:[1,1]"), 2, 0, 1.0, 0.10)]
    lines, ok = [], True
    for H, a, u, target, tol in runs:
        est = run_moment_experiment(ExperimentConfig(n=50, u=u, a=a, trials=TRIALS, seed=SEED), H)
        good = abs(est.mean - target) <= tol
        ok &= good
        lines.append(f"G={H.label} u={u}: {est.mean:.4f} +- {est.stderr:.4f} (target {target:.4f})")
    report(5, ok, "; ".join(lines))
    assert ok


def test_criterion_06_cl_moment_identity(report):
    lines, ok = [], True
    for u in (0, 1, 2):
        total, defect = cl_moment_check(G("2:[1]"), u, 2**8)
        tail = enumerate_cl_support(2, u, 2**8).tail_mass
        mass, _ = cl_moment_check(T, u, 2**8, primes=(2,))
        consistent = abs(mass - (1 - tail)) < 1e-12
        ok &= defect < 1e-2 and consistent
        lines.append(f"u={u}: sum {total:.6f} defect {defect:.2e} tail {tail:.2e}")
    report(6, ok, "G=Z/2 cutoff 2^8: " + "; ".join(lines))
    assert ok


def test_criterion_07_moment_inversion(report):
    sol = solve(MomentTable.cohen_lenstra(2, 0, 4), 4)
    lines, ok = [], True
    for k in range(3):
        H = GroupType.from_dict({2: (1,) * k}) if k else T
        # Y (x) Z/2 = (Z/2)^k exactly when Y has 2-rank k
        target = cl_rank_probability(k, 0, 2)
        ok &= abs(float(sol[H]) - target) <= 1e-3
        lines.append(f"{H.label}: {float(sol[H]):.6f} (target {target:.6f})")
    rng = np.random.default_rng(SEED)
    exact = True
    for a, R in [(2, 3), (3, 2), (4, 2), (6, 1), (9, 1)]:
        support = enumerate_groups(a, R)
        w = rng.integers(0, 7, len(support)) + (np.arange(len(support)) == 0)
        dist = {H: Fraction(int(x), int(w.sum())) for H, x in zip(support, w) if x}
        back = solve(moments_from_distribution(dist, a, R), R)
        exact &= {H: p for H, p in back.probabilities.items() if p} == dist
    ok &= exact
    report(7, ok, "a=2 u=0 R=4 solve " + "; ".join(lines) + f"; rational round trips exact: {exact}")
    assert ok


def test_criterion_08_snf_oracle(report):
    rng = np.random.default_rng(SEED)
    moduli = (2, 3, 4, 8, 9, 12)
    mismatches = 0
    for i in range(10_000):
        a = moduli[i % len(moduli)]
        n, m = rng.integers(1, 4, 2)
        M = MatrixModA.of(rng.integers(0, a, (n, m)), a)
        mismatches += cokernel_group(M) != cokernel_bruteforce(M)
    report(8, mismatches == 0, f"10000 matrices n,m<=3 a in {moduli}: {mismatches} mismatches")
    assert mismatches == 0


def test_criterion_09_surjection_oracle(report):
    small = groups_up_to(16)
    bad_sur = sum(sur_count(H, K) != count_maps(H, K) for H in small for K in small)
    medium = groups_up_to(64)
    bad_aut = sum(aut_order(K) != sur_count(K, K) for K in medium)
    ok = bad_sur == 0 and bad_aut == 0
    report(9, ok, f"sur_count vs enumeration on {len(small) ** 2} pairs: {bad_sur} mismatches; "
           f"aut = sur(G,G) on {len(medium)} groups: {bad_aut} mismatches")
    assert ok


def test_criterion_10_bound_verification(report):
    reports = [check_character_grid(a) for a in (2, 3, 4)]
    reports += [check_code_lemma(GroupType.cyclic(q), q, 8) for q in (2, 3, 4)]
    reports += [check_depth_bound(H, H.exponent, 8) for H in
                (GroupType.cyclic(2), GroupType.cyclic(3), GroupType.cyclic(4), G("2:[1,1]"))]
    gap = max(r.get("max_dft_enum_gap", 0.0) for r in reports)
    checks = sum(r["checks"] for r in reports)
    ok = all(r["passed"] for r in reports) and gap <= 1e-12
    report(10, ok, f"{len(reports)} exact checks, {checks} bound evaluations, "
           f"violations {sum(r['violations'] for r in reports)}, max DFT/enumeration gap {gap:.1e}")
    assert ok
