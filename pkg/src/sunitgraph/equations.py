"""Bounded enumeration of S-unit equations and the zero-subsum oracle.

The finiteness theorems behind these equations are ineffective, so every
search here runs inside an exponent box: an S-unit is searched as
``+-prod p**e`` with ``|e| <= H`` for each prime.  Completeness is always
relative to that box, and every result set remembers ``(S, H)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import NamedTuple, Optional, Sequence

from .errors import BudgetError, InvalidInputError
from .srat import PrimeSet, from_exponents, is_s_unit

DEFAULT_BOUND = 6
MAX_ZERO_SUBSUM_LENGTH = 64
# largest half table built by the meet-in-the-middle zero-subsum search (2**20 = 40 distinct values)
MAX_HALF_TABLE = 2**20

TAG_NONE = "none"
TAG_X1X = "x1x"
TAG_XX1 = "xx1"
TAG_MINUS1 = "minus1"


@dataclass(frozen=True)
class SearchConfig:
    """Exponent box and budgets shared by all bounded searches."""

    bound: int = DEFAULT_BOUND
    max_candidates: int = 10**7
    max_rewrites: int = 100_000
    deterministic_order: bool = True

    def __post_init__(self):
        if self.bound < 0:
            raise InvalidInputError(f"exponent bound must be >= 0, got {self.bound}")
        if self.max_candidates < 1 or self.max_rewrites < 1:
            raise InvalidInputError("budgets must be positive")
        if not self.deterministic_order:
            raise InvalidInputError("only deterministic ordering is supported")

    def with_bound(self, bound: int) -> "SearchConfig":
        return SearchConfig(bound, self.max_candidates, self.max_rewrites)


class SolutionSet(list):
    """A sorted list of solutions stamped with the box it is complete for."""

    def __init__(self, items, prime_set: PrimeSet, bound: int, equation: str):
        super().__init__(items)
        self.prime_set = prime_set
        self.bound = bound
        self.equation = equation

    def header(self) -> dict:
        return {
            "primes": self.prime_set.to_json(),
            "bound_H": self.bound,
            "equation": self.equation,
            "evertse_bound": evertse_bound(self.prime_set),
        }


class ThreeTermSolution(NamedTuple):
    x: Fraction
    y: Fraction
    z: Fraction
    tag: str


def unit_count(S: PrimeSet, bound: int, positive_only: bool = False) -> int:
    n = (2 * bound + 1) ** len(S)
    return n if positive_only else 2 * n


def check_budget(size: int, cfg: SearchConfig, what: str) -> None:
    if size > cfg.max_candidates:
        raise BudgetError(
            f"{what}: search space of {size} candidates exceeds budget {cfg.max_candidates}",
            size=size,
        )


def enumerate_s_units(S: PrimeSet, cfg: SearchConfig, positive_only: bool = False) -> list:
    """All S-units in the exponent box, ascending."""
    check_budget(unit_count(S, cfg.bound, positive_only), cfg, "unit enumeration")
    H = cfg.bound
    positives = [from_exponents(e, S) for e in product(range(-H, H + 1), repeat=len(S))]
    if positive_only:
        return sorted(positives)
    return sorted(positives + [-u for u in positives])


def units_by_height(S: PrimeSet, cfg: SearchConfig, positive_only: bool = False) -> list:
    """Units of the box ordered by largest absolute exponent, then by value."""
    H = cfg.bound
    check_budget(unit_count(S, H, positive_only), cfg, "unit enumeration")
    keyed = []
    for exps in product(range(-H, H + 1), repeat=len(S)):
        h = max((abs(e) for e in exps), default=0)
        u = from_exponents(exps, S)
        keyed.append((h, u))
        if not positive_only:
            keyed.append((h, -u))
    keyed.sort()
    return [u for _, u in keyed]


def evertse_bound(S: PrimeSet) -> int:
    """Upper bound 3 * 7**(2|S| + 3) on the number of solutions of ax + by = 1."""
    return 3 * 7 ** (2 * len(S) + 3)


def solve_two_term(a, b, S: PrimeSet, cfg: SearchConfig) -> SolutionSet:
    """All (x, y) in the box with a*x + b*y = 1."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise InvalidInputError("coefficients of a*x + b*y = 1 must be nonzero")
    units = enumerate_s_units(S, cfg)
    box = set(units)
    sols = []
    for x in units:
        y = (1 - a * x) / b
        if y in box:
            sols.append((x, y))
    sols.sort()
    return SolutionSet(sols, S, cfg.bound, f"{a}*x + {b}*y = 1")


def three_term_tag(x, y, z) -> str:
    """Degeneracy class of a solution of 1 + x = y + z; (x,1,x) wins ties."""
    if y == 1 and z == x:
        return TAG_X1X
    if y == x and z == 1:
        return TAG_XX1
    if x == -1 and z == -y:
        return TAG_MINUS1
    return TAG_NONE


def solve_three_term(S: PrimeSet, cfg: SearchConfig) -> SolutionSet:
    """All ordered triples (x, y, z) in the box with 1 + x = y + z, tagged."""
    units = enumerate_s_units(S, cfg)
    check_budget(len(units) ** 2, cfg, "three-term scan")
    box = set(units)
    sols = []
    for x in units:
        lhs = 1 + x
        for y in units:
            z = lhs - y
            if z in box:
                sols.append(ThreeTermSolution(x, y, z, three_term_tag(x, y, z)))
    sols.sort()
    return SolutionSet(sols, S, cfg.bound, "1 + x = y + z")


def count_representations(x, S: PrimeSet, cfg: SearchConfig) -> int:
    """Number of ordered pairs (y, z) in the box with 1 + x = y + z."""
    x = Fraction(x)
    if not is_s_unit(x, S):
        raise InvalidInputError(f"{x} is not an S-unit")
    units = enumerate_s_units(S, cfg)
    box = set(units)
    target = 1 + x
    return sum(1 for y in units if target - y in box)


def solve_unit_sum(S: PrimeSet, k: int, cfg: SearchConfig, positive_only: bool = False,
                   nondegenerate_only: bool = True) -> SolutionSet:
    """Ordered k-tuples of box units summing to 1 (the last unit is solved for)."""
    if not 1 <= k <= 6:
        raise InvalidInputError("unit-sum search supports 1 <= k <= 6")
    units = enumerate_s_units(S, cfg, positive_only)
    check_budget(len(units) ** (k - 1), cfg, "unit-sum scan")
    box = set(units)
    sols = []
    for head in product(units, repeat=k - 1):
        last = 1 - sum(head, Fraction(0))
        if last not in box:
            continue
        sol = head + (last,)
        if nondegenerate_only and k > 1 and find_zero_subsum(sol, proper=True) is not None:
            continue
        sols.append(sol)
    sols.sort()
    return SolutionSet(sols, S, cfg.bound, f"u_1 + ... + u_{k} = 1")


# -- zero subsums ---------------------------------------------------------------


def _scaled(values: Sequence[Fraction]) -> list:
    den = math.lcm(*(v.denominator for v in values))
    return [v.numerator * (den // v.denominator) for v in values]


def _half_table(weights, counts):
    """Sums and sizes of every count vector over one half, in mixed-radix order."""
    sums, sizes = [0], [0]
    for w, c in zip(weights, counts):
        sums = [s + t * w for s in sums for t in range(c + 1)]
        sizes = [z + t for z in sizes for t in range(c + 1)]
    return sums, sizes


def _decode(index, counts):
    vec = []
    for c in reversed(counts):
        index, t = divmod(index, c + 1)
        vec.append(t)
    return vec[::-1]


def group_values(seq: Sequence) -> tuple:
    """Distinct values in first-occurrence order, each with its index list."""
    groups = {}
    for i, v in enumerate(seq):
        groups.setdefault(v, []).append(i)
    return list(groups), list(groups.values())


def find_zero_subsum(seq: Sequence, proper: bool = True) -> Optional[tuple]:
    """Return a sorted tuple of 0-based indices whose values sum to 0, or None.

    With ``proper`` the witness is neither empty nor the whole sequence.
    Equal values are grouped and count vectors enumerated, split over the
    groups meet-in-the-middle, so long sequences with few distinct values are
    cheap.  The returned witness has the fewest possible elements.
    """
    n = len(seq)
    if n == 0:
        raise InvalidInputError("empty sequence")
    if n > MAX_ZERO_SUBSUM_LENGTH:
        raise InvalidInputError(f"length {n} exceeds the supported {MAX_ZERO_SUBSUM_LENGTH}")
    values = [Fraction(v) for v in seq]
    distinct, indices = group_values(values)
    weights = _scaled(distinct)
    counts = [len(ix) for ix in indices]

    # split the groups so both half tables are about the same size
    total = sum(math.log(c + 1) for c in counts)
    acc, cut = 0.0, len(counts)
    for g, c in enumerate(counts):
        if acc + math.log(c + 1) > total / 2 and g > 0:
            cut = g
            break
        acc += math.log(c + 1)
    left_counts, right_counts = counts[:cut], counts[cut:]
    if max(math.prod(c + 1 for c in left_counts), math.prod(c + 1 for c in right_counts)) > MAX_HALF_TABLE:
        raise InvalidInputError(f"too many distinct values ({len(counts)}) for the zero-subsum search")

    lsums, lsizes = _half_table(weights[:cut], left_counts)
    rsums, rsizes = _half_table(weights[cut:], right_counts)
    lfull, rfull = len(lsums) - 1, len(rsums) - 1

    # per sum, the two smallest right vectors (a match excludes at most one of them)
    right = {}
    for i, (s, z) in enumerate(zip(rsums, rsizes)):
        slot = right.setdefault(s, [])
        if len(slot) < 2:
            slot.append((z, i))
            slot.sort()
        elif z < slot[1][0]:
            slot[1] = (z, i)
            slot.sort()

    best = None
    for li, (s, lz) in enumerate(zip(lsums, lsizes)):
        for rz, ri in right.get(-s, ()):
            size = lz + rz
            if size == 0 or (proper and li == lfull and ri == rfull):
                continue
            if best is not None and size > best[0]:
                break
            vec = _decode(li, left_counts) + _decode(ri, right_counts)
            witness = tuple(sorted(i for t, ix in zip(vec, indices) for i in ix[:t]))
            if best is None or (size, witness) < best:
                best = (size, witness)
            break
    return None if best is None else best[1]


def has_zero_subsum_naive(seq: Sequence, proper: bool = True) -> bool:
    """Plain 2**n scan, kept as the reference the grouped search is tested against."""
    n = len(seq)
    values = [Fraction(v) for v in seq]
    for mask in range(1, 1 << n):
        if proper and mask == (1 << n) - 1:
            continue
        if sum((values[i] for i in range(n) if mask >> i & 1), Fraction(0)) == 0:
            return True
    return False


# -- necessity oracle for single-prime cycles ------------------------------------


def normalize_zero_sequence(seq: Sequence) -> tuple:
    """Scale so a smallest-magnitude entry becomes 1; that 1 first, the rest ascending."""
    values = [Fraction(v) for v in seq]
    pivot = min(range(len(values)), key=lambda i: abs(values[i]))
    scale = values[pivot]
    rest = sorted(v / scale for i, v in enumerate(values) if i != pivot)
    return (Fraction(1),) + tuple(rest)


def brute_force_zero_sequences(S: PrimeSet, n: int, cfg: SearchConfig,
                               nondegenerate_only: bool = True) -> SolutionSet:
    """Zero-sum unit sequences of length n, one normalized representative per multiset.

    Only sequences whose smallest entry in absolute value is 1 are listed; any
    zero-sum sequence can be scaled into that form.
    """
    if n < 3:
        raise InvalidInputError("cycles have length at least 3")
    units = [u for u in enumerate_s_units(S, cfg) if abs(u) >= 1]
    check_budget(math.comb(len(units) + n - 2, n - 1), cfg, "zero-sequence scan")
    scale = math.prod(p**cfg.bound for p in S)
    ints = [int(u * scale) for u in units]
    results = []
    for combo in combinations_with_replacement(range(len(units)), n - 1):
        if sum(ints[i] for i in combo) != -scale:
            continue
        seq = (Fraction(1),) + tuple(units[i] for i in combo)
        if nondegenerate_only and find_zero_subsum(seq, proper=True) is not None:
            continue
        results.append(seq)
    results.sort()
    return SolutionSet(results, S, cfg.bound, f"u_1 + ... + u_{n} = 0")
