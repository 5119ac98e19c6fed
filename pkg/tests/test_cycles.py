from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from sunitgraph.cycles import (
    TARGET_ONE,
    TARGET_ZERO,
    UnitSequence,
    admissible_lengths,
    bezout_coefficients,
    build_induced_cycle,
    cycle_steps,
    find_power_separation,
    find_violating_set,
    has_suffix_property,
    induced_decomposition,
    is_ladder_reachable,
    ladder_decomposition,
    ladder_threshold,
    lex_last_refine,
    refine_steps,
    rewrite_step,
    rotate_to_induced,
    s_good_ladder,
    single_prime_sum,
    unit_subsums,
    verify_induced_condition,
    verify_nondegenerate,
    zero_sum_nondegenerate,
    zero_sum_plan,
    zero_sum_threshold,
)
from sunitgraph.equations import SearchConfig, has_zero_subsum_naive
from sunitgraph.errors import (
    BudgetError,
    DelegatedCaseError,
    InvalidInputError,
    ResidueError,
    ThresholdError,
)
from sunitgraph.srat import PrimeSet, is_s_unit

F = Fraction
S3, S5, S37, S35 = (PrimeSet.of(p) for p in ([3], [5], [3, 7], [3, 5]))


def brute_violating(units, S):
    """Smallest, then lexicographically first, non-suffix index set of size >= 2 with unit sum."""
    k = len(units)
    for size in range(2, k + 1):
        for I in combinations(range(k), size):
            if I != tuple(range(k - size, k)) and is_s_unit(sum(units[i] for i in I), S):
                return I
    return None


def assert_residue_law(seq):
    if seq.target == TARGET_ONE and all(u > 0 for u in seq.units):
        assert (len(seq) - 1) % seq.prime_set.modulus_m == 0


# the explicit single-prime sum

@pytest.mark.parametrize("p,k,expected", [
    (3, 5, [F(1, 9), F(1, 3), F(1, 3), F(1, 9), F(1, 9)]),
    (3, 3, [F(1, 3)] * 3),
    (5, 5, [F(1, 5)] * 5),
    (3, 1, [F(1)]),
])
def test_single_prime_sum(p, k, expected):
    assert list(single_prime_sum(p, k).units) == expected


def test_single_prime_sum_residue():
    with pytest.raises(ResidueError):
        single_prime_sum(5, 4)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_single_prime_sum_is_induced(p):
    for k in range(1, 40, p - 1):
        seq = single_prime_sum(p, k)
        assert sum(seq.units) == 1 and len(seq) == k
        assert verify_induced_condition(seq)
        assert_residue_law(seq)


# ladder

@pytest.mark.parametrize("primes,b", [([3, 5], (-1, 1)), ([3, 7], (-2, 1)), ([5, 7], (-1, 1)), ([5], (1,))])
def test_bezout(primes, b):
    S = PrimeSet.of(primes)
    assert bezout_coefficients(S) == b
    assert sum(bi * (p - 1) for bi, p in zip(b, S)) == S.modulus_m


@pytest.mark.parametrize("primes", [[3, 5], [3, 7], [5, 7], [3, 5, 7], [3, 11], [7, 13], [2, 3]])
def test_bezout_identity_general(primes):
    S = PrimeSet.of(primes)
    b = bezout_coefficients(S)
    assert sum(bi * (p - 1) for bi, p in zip(b, S)) == S.modulus_m


@pytest.mark.parametrize("primes,k0", [([3, 7], 11), ([3, 5], 7), ([5, 7], 21), ([5], 5)])
def test_threshold(primes, k0):
    assert ladder_threshold(PrimeSet.of(primes)) == k0


def test_ladder_base_identity():
    seq = s_good_ladder(S35, 7)
    assert list(seq.units) == [F(1, 3)] * 2 + [F(1, 15)] * 5


def test_ladder_single_prime_matches_sum():
    assert Counter(s_good_ladder(S3, 5).units) == Counter(single_prime_sum(3, 5).units)


def test_ladder_s37_k9():
    seq = s_good_ladder(S37, 9)
    assert len(seq) == 9 and sum(seq.units) == 1


@pytest.mark.parametrize("primes", [[3, 5], [3, 7], [5, 7], [3, 5, 7], [7, 13]])
def test_ladder_from_threshold(primes):
    S = PrimeSet.of(primes)
    m = S.modulus_m
    k0 = ladder_threshold(S)
    for k in range(k0, k0 + 12 * m + 1, m):
        a = ladder_decomposition(S, k)
        assert all(ai >= 0 for ai in a)
        assert sum(ai * (p - 1) for ai, p in zip(a, S)) + 1 == k
        seq = s_good_ladder(S, k)
        assert len(seq) == k and sum(seq.units) == 1
        assert all(u > 0 for u in seq.units)
        assert_residue_law(seq)


def test_ladder_errors():
    with pytest.raises(ResidueError):
        s_good_ladder(S37, 8)
    with pytest.raises(ThresholdError) as err:
        s_good_ladder(PrimeSet.of([5, 7]), 3)  # 2 = 4a + 6b has no solution
    assert err.value.minimum == 21
    assert not is_ladder_reachable(PrimeSet.of([5, 7]), 3)
    assert is_ladder_reachable(PrimeSet.of([5, 7]), 11)


# refinement

def test_refine_fixpoint():
    seq = UnitSequence((F(1, 3),) * 3, S3)
    assert lex_last_refine(seq).units == seq.units


def test_rewrite_step_by_hand():
    units = (F(1, 2), F(1, 4), F(1, 8), F(1, 8))
    # merge positions 2, 3 into 1/4; the first later position outside I does not exist,
    # so pick I = (1, 2) instead: v = 3/8 at position 1, position 3 splits
    out = rewrite_step(units, (1, 2))
    assert out == (F(1, 2), F(3, 8), F(1, 8) * F(1, 4) / F(3, 8), F(1, 8) * F(1, 8) / F(3, 8))
    assert sum(out) == 1 and out > units


def test_refine_single_prime_sum():
    seq = single_prime_sum(3, 7)
    out = lex_last_refine(seq)
    assert brute_violating(out.units, S3) is None
    assert verify_induced_condition(rotate_to_induced(out))


@pytest.mark.parametrize("primes,k", [([3, 7], 11), ([3, 7], 13), ([3, 5], 9), ([3, 5], 11), ([5, 7], 13)])
def test_refine_reaches_suffix_property(primes, k):
    S = PrimeSet.of(primes)
    steps = list(refine_steps(s_good_ladder(S, k)))
    for a, b in zip(steps, steps[1:]):
        assert b > a
        assert sum(b) == 1 and len(b) == k
    final = steps[-1]
    assert brute_violating(final, S) is None
    rotated = rotate_to_induced(UnitSequence(final, S))
    assert verify_induced_condition(rotated)


def test_refine_budget():
    with pytest.raises(BudgetError):
        lex_last_refine(s_good_ladder(S37, 15), SearchConfig(max_rewrites=1))


def test_refine_rejects_zero_target():
    seq = UnitSequence((F(1), F(-1)), PrimeSet.of([2]), TARGET_ZERO)
    with pytest.raises(InvalidInputError):
        lex_last_refine(seq)


positive_units = st.sampled_from([F(1), F(1, 2), F(1, 3), F(1, 4), F(2, 3), F(1, 6), F(3, 2), F(1, 9), F(1, 8)])


@settings(max_examples=200, deadline=None)
@given(st.lists(positive_units, min_size=2, max_size=10))
def test_violating_set_matches_brute_force(units):
    S = PrimeSet.of([2, 3])
    assert find_violating_set(units, S.primes) == brute_violating(units, S)


@settings(max_examples=100, deadline=None)
@given(st.lists(positive_units, min_size=2, max_size=9))
def test_unit_subsums_match_brute_force(units):
    S = PrimeSet.of([2, 3])
    found = unit_subsums(units, S.primes)
    for size, I in found:
        assert len(I) == size and is_s_unit(sum(units[i] for i in I), S)
    vectors = {
        tuple(sorted(Counter(units[i] for i in I).items()))
        for size in range(2, len(units) + 1)
        for I in combinations(range(len(units)), size)
        if is_s_unit(sum(units[i] for i in I), S)
    }
    assert len(found) == len(vectors)


def test_has_suffix_property():
    assert has_suffix_property([F(1, 3)] * 3, (3,))
    assert has_suffix_property([F(1, 2), F(1, 4), F(1, 4)], (2,))
    assert not has_suffix_property([F(1, 4), F(1, 4), F(1, 2)], (2,))


# rotation and verifiers

def test_rotate():
    seq = UnitSequence((F(1, 2), F(1, 4), F(1, 4)), PrimeSet.of([2]))
    assert rotate_to_induced(seq).units == (F(1, 4), F(1, 2), F(1, 4))
    assert Counter(rotate_to_induced(seq).units) == Counter(seq.units)


def test_rotate_refined_single_prime():
    out = rotate_to_induced(lex_last_refine(single_prime_sum(3, 5)))
    assert verify_induced_condition(out)


def test_induced_condition_examples():
    assert verify_induced_condition(UnitSequence((F(1, 3),) * 3, S3))
    assert verify_induced_condition(UnitSequence((F(1, 2), F(1, 2)), PrimeSet.of([2])))
    assert verify_induced_condition(UnitSequence((F(1, 9), F(1, 3), F(1, 3), F(1, 9), F(1, 9)), S3))
    bad = verify_induced_condition(UnitSequence((F(1, 2), F(1, 4), F(1, 4)), PrimeSet.of([2])))
    assert not bad and bad.violations == [(1, 2)]


def test_nondegenerate_examples():
    assert verify_nondegenerate(UnitSequence((1, 1, 1, 1, 1, -5), S5, TARGET_ZERO))
    report = verify_nondegenerate([1, -1, 2, -2])
    assert not report and report.witness == (0, 1)
    with pytest.raises(InvalidInputError):
        verify_nondegenerate([1, 2])


@given(st.lists(positive_units, min_size=1, max_size=10))
def test_positive_prefix_with_balancing_term_is_nondegenerate(units):
    seq = list(units) + [-sum(units)]
    assert verify_nondegenerate(seq)


def test_cycle_steps():
    steps = cycle_steps(single_prime_sum(3, 3))
    assert steps.units[-1] == -1 and steps.target == TARGET_ZERO
    assert verify_nondegenerate(steps)


# power separation

def test_power_separation_example():
    assert find_power_separation(7, 3, 1) == (1, 2)


@pytest.mark.parametrize("p,q", [(7, 3), (13, 5), (13, 3), (31, 7), (37, 13), (11, 3)])
def test_power_separation_exact(p, q):
    m = gcd(p - 1, q - 1)
    for r in range(1, m // 2 + 1):
        alpha, beta = find_power_separation(p, q, r)
        assert r * q**beta > p**alpha > (r - 1) * q**beta
        if r == 1:
            assert q ** (beta - 1) < p**alpha < q**beta
        else:
            assert q**beta <= p**alpha < q ** (beta + 1)


def test_power_separation_errors():
    with pytest.raises(InvalidInputError):
        find_power_separation(3, 7, 1)
    with pytest.raises(InvalidInputError):
        find_power_separation(13, 5, 3)


# zero sums

def test_zero_sum_s37_n6():
    plan = zero_sum_plan(S37, 6)
    assert (plan.r, plan.alpha, plan.beta, plan.s_r, plan.ell) == (1, 1, 2, 4, 1)
    seq = zero_sum_nondegenerate(S37, 6).units
    assert seq[:2] == (7, 1) and seq[-1] == -9
    assert sum(seq[2:5]) == 1 and len(seq) == 6
    assert not has_zero_subsum_naive(seq)


@pytest.mark.parametrize("primes", [[3, 7], [3, 11], [3, 5, 7], [5, 7]])
def test_zero_sums_from_threshold(primes):
    S = PrimeSet.of(primes)
    N = zero_sum_threshold(S)
    for n in range(N, N + 14, 2):
        seq = zero_sum_nondegenerate(S, n)
        assert len(seq) == n and sum(seq.units) == 0
        assert verify_nondegenerate(seq)


def test_zero_sum_naive_cross_check():
    seq = zero_sum_nondegenerate(S37, 10).units
    assert not has_zero_subsum_naive(seq)


def test_zero_sum_errors():
    with pytest.raises(DelegatedCaseError):
        zero_sum_nondegenerate(PrimeSet.of([2, 3]), 6)
    with pytest.raises(ResidueError):
        zero_sum_nondegenerate(S37, 5)
    with pytest.raises(ThresholdError) as err:
        zero_sum_nondegenerate(S37, 4)
    assert err.value.minimum == zero_sum_threshold(S37) == 6
    with pytest.raises(InvalidInputError):
        zero_sum_nondegenerate(S5, 6)


# cycles

@pytest.mark.parametrize("primes,expected", [([5], (4, 2)), ([2], (1, 0)), ([3, 7], (2, 0))])
def test_admissible_lengths(primes, expected):
    assert tuple(admissible_lengths(PrimeSet.of(primes))) == expected


def test_cycle_s3_n6():
    cyc = build_induced_cycle(S3, 6)
    assert len(set(cyc.vertices)) == 6
    assert all(is_s_unit(d, S3) for d in cyc.steps)


def test_cycle_residue():
    with pytest.raises(ResidueError):
        build_induced_cycle(S5, 4)


def test_cycle_base_shift():
    a = build_induced_cycle(S3, 6)
    b = build_induced_cycle(S3, 6, base=F(10))
    assert [v + 10 for v in a.vertices] == list(b.vertices)
    assert b.steps == a.steps


@pytest.mark.parametrize("primes,n", [([3, 7], 12), ([3, 5], 8), ([3, 5, 7], 10)])
def test_pipeline_cycle(primes, n):
    S = PrimeSet.of(primes)
    seq = induced_decomposition(S, n - 1)
    assert verify_induced_condition(seq)
    cyc = build_induced_cycle(S, n, units=seq)
    assert len(cyc.vertices) == n
    assert cyc.steps[-1] == -1
