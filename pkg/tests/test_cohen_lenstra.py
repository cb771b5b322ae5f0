import math

import pytest
from hypothesis import given, strategies as st

from cokstat.cohen_lenstra import (OVERFLOW, CLParams, cl_moment_check, cl_probability, cl_rank_probability,
                                   cl_rank_table, cl_tensor_table, enumerate_cl_support, euler_product,
                                   sample_cl_group)
from cokstat.groups import GroupType, aut_order_bruteforce, group_order
from cokstat.rng import RandomStream

G = GroupType.parse


def product(p, u, terms=400):
    return math.prod(1 - p ** (-k - u) for k in range(1, terms))


@pytest.mark.parametrize("p,u", [(2, 0), (2, 1), (3, 0), (3, 2), (5, 0), (7, 3)])
def test_euler_product(p, u):
    assert euler_product(p, u) == pytest.approx(product(p, u), abs=1e-15)


def test_cl_probability_examples():
    assert cl_probability(GroupType(), CLParams(0, (3,))) == pytest.approx(0.560126, abs=1e-6)
    assert cl_probability(G("3:[1]"), CLParams(0, (3,))) == pytest.approx(0.280063, abs=1e-6)
    assert cl_probability(GroupType(), CLParams(1, (2,))) == pytest.approx(0.577576, abs=1e-6)
    with pytest.raises(ValueError):
        cl_probability(G("5:[1]"), CLParams(0, (2, 3)))


def test_cl_probability_over_several_primes_factors():
    params = CLParams(1, (2, 3))
    B = G("2:[2];3:[1]")
    p2 = cl_probability(G("2:[2]"), CLParams(1, (2,)))
    p3 = cl_probability(G("3:[1]"), CLParams(1, (3,)))
    assert cl_probability(B, params) == pytest.approx(p2 * p3, rel=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        CLParams(-1, (2,))
    with pytest.raises(ValueError):
        CLParams(0, (4,))
    with pytest.raises(ValueError):
        CLParams(0, (2,), cutoff=0)
    assert CLParams.for_modulus(12, 0).primes == (2, 3)


def test_rank_examples():
    assert cl_rank_probability(0, 0, 2) == pytest.approx(0.288788, abs=1e-6)
    assert cl_rank_probability(1, 0, 2) == pytest.approx(0.577576, abs=1e-6)
    assert cl_rank_probability(0, 1, 2) == pytest.approx(0.577576, abs=1e-6)
    assert cl_rank_probability(-1, 0, 2) == 0.0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("u", [0, 1, 2, 5])
def test_rank_probabilities_sum_to_one(p, u):
    assert math.fsum(cl_rank_probability(k, u, p) for k in range(41)) == pytest.approx(1.0, abs=1e-10)
    assert cl_rank_table(p, u).tail_mass < 1e-10


@pytest.mark.parametrize("u", [0, 1])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_rank_law_matches_group_enumeration(u, k):
    # P(rank Y = k) summed over groups up to order 2^10, plus the omitted tail as slack
    table = enumerate_cl_support(2, u, 2**10)
    mass = math.fsum(w for B, w in table if B.rank(2) == k)
    assert mass <= cl_rank_probability(k, u, 2) + 1e-12
    assert cl_rank_probability(k, u, 2) - mass <= table.tail_mass + 1e-12


def test_enumerate_examples():
    t = enumerate_cl_support(2, 0, 2)
    assert [B for B, _ in t] == [GroupType(), G("2:[1]")]
    assert [w for _, w in t] == pytest.approx([0.288788, 0.288788], abs=1e-6)
    t = enumerate_cl_support(3, 0, 1)
    assert [B for B, _ in t] == [GroupType()]
    assert t[0][1] == pytest.approx(0.560126, abs=1e-6)
    with pytest.raises(ValueError):
        enumerate_cl_support(2, 0, 6)
    with pytest.raises(ValueError):
        enumerate_cl_support(2, 0, 2**13)


@pytest.mark.parametrize("p,u", [(2, 0), (2, 1), (3, 0), (5, 2)])
def test_tail_decreases_with_cutoff(p, u):
    tails = [enumerate_cl_support(p, u, p**N).tail_mass for N in range(0, 9 if p == 2 else 6)]
    assert all(x >= y for x, y in zip(tails, tails[1:]))
    assert tails[-1] < tails[0]


def test_tail_mass_is_complement():
    t = enumerate_cl_support(3, 1, 3**5)
    assert t.tail_mass == pytest.approx(1 - sum(w for _, w in t), abs=1e-15)


def test_probabilities_use_true_automorphism_counts():
    params = CLParams(0, (2,))
    c = euler_product(2, 0)
    for B, w in enumerate_cl_support(2, 0, 2**4):
        assert w == pytest.approx(c / aut_order_bruteforce(B), rel=1e-12)


def test_sample_frequencies():
    draws = [sample_cl_group(2, 0, 2**12, RandomStream(9, t)) for t in range(100_000)]
    # the largest allowed cutoff leaves about 2.4e-4 of mass, far inside the tolerance
    assert enumerate_cl_support(2, 0, 2**12).tail_mass < 3e-4
    assert draws.count(GroupType()) / len(draws) == pytest.approx(0.2888, abs=0.01)
    assert draws.count(G("2:[1]")) / len(draws) == pytest.approx(0.2888, abs=0.01)


def test_sample_large_u_and_overflow():
    draws = [sample_cl_group(2, 8, 2**4, RandomStream(1, t)) for t in range(2000)]
    assert draws.count(GroupType()) / len(draws) > 0.99
    draws = [sample_cl_group(2, 0, 1, RandomStream(1, t)) for t in range(2000)]
    # only the trivial group is below the cutoff, so the rest is overflow
    assert set(draws) == {GroupType(), OVERFLOW}
    assert abs(draws.count(OVERFLOW) / 2000 - (1 - 0.288788)) < 0.04


def test_sample_deterministic():
    s = RandomStream(4, 17)
    assert sample_cl_group(3, 0, 3**6, s) == sample_cl_group(3, 0, 3**6, s)


@pytest.mark.parametrize("p,u,cutoff", [(3, 0, 3**12), (2, 1, 2**10), (2, 3, 2**10), (5, 0, 5**8)])
def test_moment_check_trivial(p, u, cutoff):
    total, defect = cl_moment_check(GroupType(), u, cutoff, primes=(p,))
    tail = enumerate_cl_support(p, u, cutoff).tail_mass
    assert tail < 1e-4
    assert total == pytest.approx(1 - tail, abs=1e-12)
    assert defect < 1e-3
    with pytest.raises(ValueError):
        cl_moment_check(GroupType(), u, p)


def test_moment_check_examples():
    assert cl_moment_check(G("2:[1]"), 0, 2**8)[1] < 1e-2
    total, _ = cl_moment_check(G("2:[1]"), 2, 2**12)
    assert total == pytest.approx(0.25, abs=1e-6)


@pytest.mark.parametrize("label,u", [("2:[1]", 0), ("2:[1,1]", 1), ("3:[1]", 0), ("2:[2]", 1), ("2:[1];3:[1]", 1)])
def test_moment_defect_shrinks_with_cutoff(label, u):
    g = G(label)
    defects = [cl_moment_check(g, u, c)[1] for c in (4, 16, 64, 256, 1024)]
    assert all(x >= y - 1e-12 for x, y in zip(defects, defects[1:]))
    assert defects[-1] < defects[0]


@given(st.sampled_from([2, 3, 4, 8, 9, 12, 27, 36]), st.integers(0, 3))
def test_tensor_table_is_a_law_on_capped_groups(a, u):
    t = cl_tensor_table(a, u)
    assert t.tail_mass < 1e-6
    for B, w in t:
        assert w > 0 and B.divides_exponent(a)


@pytest.mark.parametrize("u", [0, 1, 2])
def test_tensor_table_mod_prime_matches_ranks(u):
    t = cl_tensor_table(2, u)
    for B, w in t:
        assert w == pytest.approx(cl_rank_probability(B.rank(2), u, 2), abs=1e-7)


def test_tensor_table_mod_27_values():
    t = cl_tensor_table(27, 0)
    assert t.probability(GroupType()) == pytest.approx(0.560126, abs=1e-6)
    assert t.probability(G("3:[1]")) == pytest.approx(0.280063, abs=1e-6)
    assert t.probability(G("3:[2]")) == pytest.approx(0.560126 / 6, abs=1e-6)
    # Z/27 collects every cyclic group of order at least 27
    assert t.probability(G("3:[3]")) > 0.560126 / group_order(G("3:[3]")) / 2 * 1.0
