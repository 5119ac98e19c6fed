"""Constructive unit sequences: decompositions of 1, refinement, rotation, zero sums.

A positive decomposition ``u_1 + ... + u_k = 1`` with no S-unit contiguous
subsum other than the whole sum gives the induced cycle
``a -> a+u_1 -> ... -> a+u_1+...+u_k = a+1 -> a`` of length k + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations_with_replacement, product
from math import gcd
from typing import Iterator, NamedTuple, Optional

from .equations import SearchConfig, find_zero_subsum, group_values
from .errors import (
    BudgetError,
    DelegatedCaseError,
    InvalidInputError,
    ResidueError,
    ThresholdError,
)
from .srat import PrimeSet, format_rational, is_prime, is_s_unit

TARGET_ONE = "one"
TARGET_ZERO = "zero"


@dataclass(frozen=True)
class UnitSequence:
    units: tuple
    prime_set: PrimeSet
    target: str = TARGET_ONE

    def __post_init__(self):
        units = tuple(Fraction(u) for u in self.units)
        object.__setattr__(self, "units", units)
        if self.target not in (TARGET_ONE, TARGET_ZERO):
            raise InvalidInputError(f"unknown target {self.target!r}")
        for u in units:
            if not is_s_unit(u, self.prime_set):
                raise InvalidInputError(f"{u} is not an S-unit for S={list(self.prime_set)}")
        expected = 1 if self.target == TARGET_ONE else 0
        if sum(units, Fraction(0)) != expected:
            raise InvalidInputError(f"units do not sum to {expected}")

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    def to_json(self) -> dict:
        return {
            "primes": self.prime_set.to_json(),
            "target": self.target,
            "units": [format_rational(u) for u in self.units],
        }


@dataclass(frozen=True)
class CycleRepresentation:
    base: Fraction
    vertices: tuple
    prime_set: PrimeSet

    def __post_init__(self):
        vertices = tuple(Fraction(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "base", Fraction(self.base))
        if len(set(vertices)) != len(vertices):
            raise InvalidInputError("cycle vertices must be pairwise distinct")
        n = len(vertices)
        for i in range(n):
            if not is_s_unit(vertices[(i + 1) % n] - vertices[i], self.prime_set):
                raise InvalidInputError(f"step {i} of the cycle is not an S-unit")

    @property
    def steps(self) -> tuple:
        n = len(self.vertices)
        return tuple(self.vertices[(i + 1) % n] - self.vertices[i] for i in range(n))

    def to_json(self) -> dict:
        return {
            "primes": self.prime_set.to_json(),
            "base": format_rational(self.base),
            "vertices": [format_rational(v) for v in self.vertices],
        }


# -- the explicit single-prime decomposition --------------------------------------


def single_prime_sum(p: int, k: int) -> UnitSequence:
    """1/p^d followed by p-1 copies of each of 1/p, ..., 1/p^d, where d = (k-1)/(p-1)."""
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    if k < 1 or (k - 1) % (p - 1):
        raise ResidueError(f"k = {k} must satisfy k = 1 (mod {p - 1}), i.e. n = k+1 = 2 (mod {p - 1})")
    d = (k - 1) // (p - 1)
    units = [Fraction(1, p**d)] if d else [Fraction(1)]
    for j in range(1, d + 1):
        units += [Fraction(1, p**j)] * (p - 1)
    return UnitSequence(tuple(units), PrimeSet.of([p]))


# -- the S+-good ladder -------------------------------------------------------------


def bezout_coefficients(S: PrimeSet) -> tuple:
    """Integers b with sum b_i (p_i - 1) = m.

    Among all such vectors we take one with no zero entry (when |S| >= 2) and
    the least sum |b_i| (p_i - 1), so the threshold built from it involves
    every prime.  Ties go to the lexicographically smallest b.
    """
    ds = [p - 1 for p in S]
    m = S.modulus_m
    if len(ds) == 1:
        return (1,)
    bound = 1
    while True:
        best = None
        for head in product(range(-bound, bound + 1), repeat=len(ds) - 1):
            rest = m - sum(b * d for b, d in zip(head, ds))
            if rest % ds[-1]:
                continue
            b = head + (rest // ds[-1],)
            key = (sum(1 for x in b if x == 0), sum(abs(x) * d for x, d in zip(b, ds)), b)
            if best is None or key < best:
                best = key
        # any vector outside the box costs more than bound * min(ds)
        if best is not None and best[0] == 0 and best[1] <= bound * min(ds):
            return best[2]
        bound *= 2


def ladder_threshold(S: PrimeSet) -> int:
    """k_0 = M|b_1|(p_1 - 1) + ... + M|b_d|(p_d - 1) + 1 with M = (p_1 - 1)/m."""
    b = bezout_coefficients(S)
    M = (S.primes[0] - 1) // S.modulus_m
    return sum(M * abs(bi) * (p - 1) for bi, p in zip(b, S)) + 1


def _direct_decomposition(S: PrimeSet, total: int) -> Optional[tuple]:
    """Some a >= 0 with sum a_i (p_i - 1) = total, preferring large a_1, then a_2, ..."""
    ds = [p - 1 for p in S]

    def rec(i, rest):
        if i == len(ds) - 1:
            return (rest // ds[i],) if rest % ds[i] == 0 else None
        for a in range(rest // ds[i], -1, -1):
            tail = rec(i + 1, rest - a * ds[i])
            if tail is not None:
                return (a,) + tail
        return None

    return rec(0, total)


def ladder_decomposition(S: PrimeSet, k: int) -> tuple:
    """Exponents a_i >= 0 with k = a_1(p_1 - 1) + ... + a_d(p_d - 1) + 1."""
    m = S.modulus_m
    if k < 1 or (k - 1) % m:
        raise ResidueError(f"k = {k} must satisfy k = 1 (mod {m})")
    k0 = ladder_threshold(S)
    if k < k0:
        a = _direct_decomposition(S, k - 1)
        if a is None:
            raise ThresholdError(f"k = {k} is below the threshold k0 = {k0} and not reachable", minimum=k0)
        return a
    b = bezout_coefficients(S)
    p1 = S.primes[0]
    M = (p1 - 1) // m
    q, r1 = divmod(k - k0, p1 - 1)
    r = r1 // m
    a = [M * abs(bi) + r * bi for bi in b]
    a[0] += q
    return tuple(a)


def is_ladder_reachable(S: PrimeSet, k: int) -> bool:
    try:
        ladder_decomposition(S, k)
    except (ResidueError, ThresholdError):
        return False
    return True


def _split_largest(units: list, p: int) -> None:
    j = max(range(len(units)), key=lambda i: (units[i], -i))
    u = units[j]
    units[j:j + 1] = [u / p] * p


def s_good_ladder(S: PrimeSet, k: int) -> UnitSequence:
    """Positive S-units summing to 1, of length k.

    Starts from [1], [1/p]*p, or (q-1) copies of 1/q plus p copies of 1/(pq)
    according to the decomposition of k - 1, then splits the largest term
    into p equal parts once per remaining unit of each a_i.
    """
    a = list(ladder_decomposition(S, k))
    used = [i for i, ai in enumerate(a) if ai > 0]
    if len(used) >= 2:
        i, j = used[0], used[1]
        q, p = S.primes[i], S.primes[j]
        units = [Fraction(1, q)] * (q - 1) + [Fraction(1, p * q)] * p
        a[i] -= 1
        a[j] -= 1
    elif used:
        p = S.primes[used[0]]
        units = [Fraction(1, p)] * p
        a[used[0]] -= 1
    else:
        units = [Fraction(1)]
    for p, ai in zip(S.primes, a):
        for _ in range(ai):
            _split_largest(units, p)
    return UnitSequence(tuple(units), S)


# -- refinement towards the suffix property ----------------------------------------


class _Groups:
    """Equal units grouped, with integer weights scaled by the common denominator."""

    def __init__(self, units, primes):
        self.k = len(units)
        self.primes = tuple(primes)
        distinct, self.indices = group_values(units)
        self.den = math.lcm(*(u.denominator for u in distinct))
        self.weights = [u.numerator * (self.den // u.denominator) for u in distinct]
        self.counts = [len(ix) for ix in self.indices]

    def witness(self, vec) -> tuple:
        """Earliest realization of a count vector as an index set."""
        return tuple(sorted(i for t, ix in zip(vec, self.indices) for i in ix[:t]))

    @cached_property
    def target_set(self) -> frozenset:
        return frozenset(self.smooth_targets())

    def unit_sets_of_size(self, size):
        """Earliest realizations of the size-``size`` count vectors with S-unit sums."""
        counts, g = self.counts, len(self.counts)
        targets = self.target_set
        weight = self.weights.__getitem__
        for combo in combinations_with_replacement(range(g), size):
            if sum(map(weight, combo)) in targets:
                vec = [0] * g
                for i in combo:
                    vec[i] += 1
                if all(t <= c for t, c in zip(vec, counts)):
                    yield self.witness(vec)

    def scan_cost(self, size) -> int:
        return math.comb(len(self.counts) + size - 1, size)

    def smooth_targets(self) -> list:
        """Every S-smooth integer up to the scaled total."""
        limit = sum(w * c for w, c in zip(self.weights, self.counts))
        targets = [1]
        for p in self.primes:
            grown = []
            for t in targets:
                while t <= limit:
                    grown.append(t)
                    t *= p
            targets = grown
        return sorted(targets)

    def all_unit_vectors(self):
        """Every count vector with an S-unit sum, by meet in the middle over the groups."""
        g = len(self.counts)
        total = sum(math.log(c + 1) for c in self.counts)
        acc, cut = 0.0, g
        for i, c in enumerate(self.counts):
            if acc + math.log(c + 1) > total / 2 and i > 0:
                cut = i
                break
            acc += math.log(c + 1)
        lcounts, rcounts = self.counts[:cut], self.counts[cut:]
        left = {}
        for idx, vec in enumerate(product(*(range(c + 1) for c in lcounts))):
            left.setdefault(sum(t * w for t, w in zip(vec, self.weights[:cut])), []).append(vec)
        right = {}
        for vec in product(*(range(c + 1) for c in rcounts)):
            right.setdefault(sum(t * w for t, w in zip(vec, self.weights[cut:])), []).append(vec)
        rkeys = right.keys()
        for t in self.smooth_targets():
            for l in rkeys & {t - x for x in left}:
                for lv in left[t - l]:
                    for rv in right[l]:
                        yield lv + rv


# below this many count vectors the size-ordered scan is used before falling back
# to the meet-in-the-middle sweep over all subsets
SIZE_SCAN_BUDGET = 1_000_000


def find_violating_set(units, primes) -> Optional[tuple]:
    """Smallest (then lexicographically first) I, |I| >= 2, with S-unit sum and I not a suffix.

    The earliest realization of a count vector is the suffix only when the
    vector takes every copy of each value it uses, so no other realization
    exists; otherwise the earliest realization is itself a candidate.  Sizes
    are scanned upward (only sizes = 1 mod m can carry an S-unit sum); once a
    size gets expensive, the remaining sizes are covered in one sweep.
    """
    grp = _Groups(units, primes)
    k = grp.k
    m = reduce(gcd, (p - 1 for p in primes))
    work = 0
    start = k + 1
    for size in range(2, k + 1):
        if (size - 1) % m:
            continue
        work += grp.scan_cost(size)
        if work > SIZE_SCAN_BUDGET:
            start = size
            break
        suffix = tuple(range(k - size, k))
        found = [w for w in grp.unit_sets_of_size(size) if w != suffix]
        if found:
            return min(found)
    if start > k:
        return None
    best = None
    for vec in grp.all_unit_vectors():
        size = sum(vec)
        if size < start:
            continue
        witness = grp.witness(vec)
        if witness == tuple(range(k - size, k)):
            continue
        if best is None or (size, witness) < best:
            best = (size, witness)
    return None if best is None else best[1]


def unit_subsums(units, primes) -> list:
    """(size, index set) for every count vector of size >= 2 with an S-unit sum.

    One index set per count vector is produced: the one using the earliest
    indices of every repeated value.
    """
    grp = _Groups(units, primes)
    out = []
    for vec in grp.all_unit_vectors():
        size = sum(vec)
        if size >= 2:
            out.append((size, grp.witness(vec)))
    return sorted(out)


def has_suffix_property(units, primes) -> bool:
    return find_violating_set(units, primes) is None


def rewrite_step(units: tuple, I: tuple) -> tuple:
    """Merge I into its first position and split the first later term outside I."""
    members = set(I)
    j = I[0]
    l = next(i for i in range(j + 1, len(units)) if i not in members)
    v = sum((units[i] for i in I), Fraction(0))
    out = []
    for pos, u in enumerate(units):
        if pos == j:
            out.append(v)
        elif pos in members:
            continue
        elif pos == l:
            out.extend(u * units[i] / v for i in I)
        else:
            out.append(u)
    return tuple(out)


def refine_steps(seq: UnitSequence, cfg: SearchConfig = SearchConfig()) -> Iterator[tuple]:
    """Yield the starting tuple and every rewritten tuple up to the fixpoint."""
    if seq.target != TARGET_ONE or any(u <= 0 for u in seq.units):
        raise InvalidInputError("refinement needs a positive decomposition of 1")
    primes = seq.prime_set.primes
    units = seq.units
    yield units
    for _ in range(cfg.max_rewrites):
        I = find_violating_set(units, primes)
        if I is None:
            return
        nxt = rewrite_step(units, I)
        if not nxt > units:
            raise AssertionError(f"rewrite of {I} did not move lexicographically forward")
        units = nxt
        yield units
    raise BudgetError(f"refinement did not reach a fixpoint within {cfg.max_rewrites} rewrites")


def lex_last_refine(seq: UnitSequence, cfg: SearchConfig = SearchConfig()) -> UnitSequence:
    """Rewrite until every index set with an S-unit sum (size >= 2) is a suffix."""
    units = seq.units
    for units in refine_steps(seq, cfg):
        pass
    return UnitSequence(units, seq.prime_set)


def rotate_to_induced(seq: UnitSequence) -> UnitSequence:
    """Move the last unit to the front."""
    units = seq.units
    return UnitSequence(units[-1:] + units[:-1], seq.prime_set, seq.target)


# -- verifiers ---------------------------------------------------------------------


class InducedReport(NamedTuple):
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed


def contiguous_violations(units, S: PrimeSet, exempt=()) -> list:
    """All 0-based inclusive (i, j), i < j, whose contiguous sum is an S-unit."""
    prefix = [Fraction(0)]
    for u in units:
        prefix.append(prefix[-1] + u)
    bad = []
    k = len(units)
    for i in range(k):
        for j in range(i + 1, k):
            if (i, j) in exempt:
                continue
            if is_s_unit(prefix[j + 1] - prefix[i], S):
                bad.append((i, j))
    return bad


def verify_induced_condition(seq: UnitSequence) -> InducedReport:
    """Contiguous-sum condition: a target-one sequence exempts the whole sum, a
    zero-sum cycle step sequence exempts the two sums that skip one end."""
    k = len(seq.units)
    if seq.target == TARGET_ONE:
        exempt = {(0, k - 1)}
    else:
        exempt = {(0, k - 2), (1, k - 1)}
    return InducedReport(contiguous_violations(seq.units, seq.prime_set, exempt))


class NondegeneracyReport(NamedTuple):
    nondegenerate: bool
    witness: Optional[tuple]

    def __bool__(self):
        return self.nondegenerate


def verify_nondegenerate(seq) -> NondegeneracyReport:
    units = seq.units if isinstance(seq, UnitSequence) else tuple(Fraction(u) for u in seq)
    if sum(units, Fraction(0)) != 0:
        raise InvalidInputError("nondegeneracy is defined for zero-sum sequences")
    witness = find_zero_subsum(units, proper=True)
    return NondegeneracyReport(witness is None, witness)


def cycle_steps(seq: UnitSequence) -> UnitSequence:
    """Step sequence of the cycle a -> a+u_1 -> ... -> a+1 -> a: the units and a final -1."""
    if seq.target != TARGET_ONE:
        raise InvalidInputError("expected a decomposition of 1")
    return UnitSequence(seq.units + (Fraction(-1),), seq.prime_set, TARGET_ZERO)


# -- zero sums with two or more primes -----------------------------------------------


def find_power_separation(p: int, q: int, r: int, max_alpha: int = 100_000) -> tuple:
    """Smallest alpha (then beta) with r*q**beta > p**alpha > (r-1)*q**beta."""
    if not (is_prime(p) and is_prime(q)) or not p > q >= 3:
        raise InvalidInputError(f"need primes p > q >= 3, got p={p}, q={q}")
    m = gcd(p - 1, q - 1)
    if not 1 <= r <= m // 2:
        raise InvalidInputError(f"r must lie in [1, {m // 2}], got {r}")
    pa = 1
    for alpha in range(1, max_alpha + 1):
        pa *= p
        # the least beta >= 1 with r*q**beta > p**alpha; a larger beta only
        # makes the lower inequality harder
        beta, qb = 1, q
        while r * qb <= pa:
            beta += 1
            qb *= q
        if pa > (r - 1) * qb:
            return alpha, beta
    raise BudgetError(f"no separating exponents with alpha <= {max_alpha}")


class ZeroSumPlan(NamedTuple):
    p: int
    q: int
    r: int
    alpha: int
    beta: int
    s_r: int
    ell: int


def _separation_table(S: PrimeSet) -> dict:
    p, q = S.primes[-1], S.primes[-2]
    m = S.modulus_m
    table = {}
    for r in range(1, m // 2 + 1):
        alpha, beta = find_power_separation(p, q, r)
        table[r] = (alpha, beta, r + 1 + (r * q**beta - p**alpha))
    return table


def _check_zero_sum_primes(S: PrimeSet) -> None:
    if 2 in S:
        raise DelegatedCaseError("2 in S: zero-sum sequences of every length are known by older explicit constructions; not handled here")
    if len(S) < 2:
        raise InvalidInputError("nondegenerate zero sums of every even length need |S| >= 2")


def _min_ell(S: PrimeSet, s_r: int) -> int:
    """Least ell >= 1 such that the ladder reaches ell*m + 1 and every larger ell."""
    m = S.modulus_m
    ell = max(1, -(-(ladder_threshold(S) - 1) // m))
    while ell > 1 and is_ladder_reachable(S, (ell - 1) * m + 1):
        ell -= 1
    return ell


def zero_sum_threshold(S: PrimeSet) -> int:
    """Least even N such that zero_sum_nondegenerate succeeds for every even n >= N."""
    _check_zero_sum_primes(S)
    m = S.modulus_m
    return max(s + _min_ell(S, s) * m for _, _, s in _separation_table(S).values())


def zero_sum_plan(S: PrimeSet, n: int) -> ZeroSumPlan:
    _check_zero_sum_primes(S)
    if n % 2:
        raise ResidueError(f"n = {n} is odd; only even lengths are constructed when 2 is not in S")
    m = S.modulus_m
    p, q = S.primes[-1], S.primes[-2]
    r = (n % m) // 2 or m // 2
    alpha, beta, s_r = _separation_table(S)[r]
    ell, rem = divmod(n - s_r, m)
    assert rem == 0
    if ell < 1 or not is_ladder_reachable(S, ell * m + 1):
        minimum = s_r + _min_ell(S, s_r) * m
        raise ThresholdError(f"n = {n} is below the constructive threshold {minimum} for its class", minimum=minimum)
    return ZeroSumPlan(p, q, r, alpha, beta, s_r, ell)


def zero_sum_nondegenerate(S: PrimeSet, n: int) -> UnitSequence:
    """p^alpha, then r q^beta - p^alpha - 1 ones, then a ladder for 1 of length ell*m + 1,
    then r copies of -q^beta."""
    plan = zero_sum_plan(S, n)
    pa, qb = plan.p**plan.alpha, plan.q**plan.beta
    ladder = s_good_ladder(S, plan.ell * S.modulus_m + 1)
    units = (
        [Fraction(pa)]
        + [Fraction(1)] * (plan.r * qb - pa - 1)
        + list(ladder.units)
        + [Fraction(-qb)] * plan.r
    )
    return UnitSequence(tuple(units), S, TARGET_ZERO)


# -- induced cycles --------------------------------------------------------------------


class AdmissibleLengths(NamedTuple):
    modulus: int
    residue: int

    def admits(self, n: int) -> bool:
        return n % self.modulus == self.residue


def admissible_lengths(S: PrimeSet) -> AdmissibleLengths:
    m = S.modulus_m
    return AdmissibleLengths(m, 2 % m)


def induced_decomposition(S: PrimeSet, k: int, cfg: SearchConfig = SearchConfig()) -> UnitSequence:
    """Ladder, refinement and rotation: a decomposition of 1 with no S-unit contiguous subsum."""
    refined = lex_last_refine(s_good_ladder(S, k), cfg)
    out = rotate_to_induced(refined)
    report = verify_induced_condition(out)
    if not report:
        raise AssertionError(f"refined sequence still has S-unit contiguous sums at {report.violations}")
    return out


def build_induced_cycle(S: PrimeSet, n: int, base=0, cfg: SearchConfig = SearchConfig(),
                        units: Optional[UnitSequence] = None) -> CycleRepresentation:
    """Vertices base, base+u_1, ..., base+u_1+...+u_{n-1} = base+1 of an induced cycle of length n."""
    if n < 3:
        raise InvalidInputError("cycles have length at least 3")
    adm = admissible_lengths(S)
    if not adm.admits(n):
        raise ResidueError(f"n = {n} violates n = 2 (mod {adm.modulus})")
    if units is None:
        if len(S) == 1:
            # the explicit single-prime sum already has the required property
            units = single_prime_sum(S.primes[0], n - 1)
        else:
            units = induced_decomposition(S, n - 1, cfg)
    base = Fraction(base)
    vertices = [base]
    for u in units.units:
        vertices.append(vertices[-1] + u)
    # the last vertex is base + 1, so the closing step is -1
    return CycleRepresentation(base, tuple(vertices), S)
