"""Exact rationals with S-adic structure.

Rationals are plain :class:`fractions.Fraction` values; ``Fraction`` already
keeps numerator and denominator coprime with a positive denominator, which is
exactly the canonical form we need.  This module adds the S-specific layer:
valuations, S-unit / S-integer predicates, the prime set itself and the
modulus ``m = gcd{p - 1 : p in S}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Optional, Union

from .errors import InvalidInputError

SRational = Fraction
RationalLike = Union[int, Fraction]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2**64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def make_srational(num: int, den: int = 1) -> Fraction:
    if den == 0:
        raise InvalidInputError("zero denominator")
    return Fraction(num, den)


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a bare integer string."""
    match = _RATIONAL_RE.match(str(text))
    if match is None:
        raise InvalidInputError(f"cannot parse rational {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    return make_srational(num, den)


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PrimeSet:
    """The finite set S, kept sorted, together with its modulus m."""

    primes: tuple
    modulus_m: int = field(init=False)

    def __post_init__(self):
        primes = tuple(sorted(int(p) for p in self.primes))
        if not primes:
            raise InvalidInputError("S must contain at least one prime")
        if len(set(primes)) != len(primes):
            raise InvalidInputError(f"duplicate primes in {list(self.primes)}")
        for p in primes:
            if p >= 2**64:
                raise InvalidInputError(f"{p} exceeds the 64-bit primality range")
            if not is_prime(p):
                raise InvalidInputError(f"{p} is not prime")
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "modulus_m", reduce(gcd, (p - 1 for p in primes)))

    @classmethod
    def of(cls, primes: Iterable[int]) -> "PrimeSet":
        return cls(tuple(primes))

    @classmethod
    def parse(cls, text: str) -> "PrimeSet":
        try:
            return cls(tuple(int(tok) for tok in str(text).split(",") if tok.strip()))
        except ValueError as exc:
            raise InvalidInputError(f"bad prime list {text!r}: {exc}") from exc

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, p):
        return p in self.primes

    def to_json(self) -> list:
        return list(self.primes)


def modulus_m(S: PrimeSet) -> int:
    return S.modulus_m


def _strip(n: int, primes) -> int:
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def p_valuation(x: RationalLike, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise InvalidInputError("valuation of 0 is undefined")
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_s_unit(x: RationalLike, S: PrimeSet) -> bool:
    x = Fraction(x)
    if x == 0:
        return False
    return _strip(abs(x.numerator), S.primes) == 1 and _strip(x.denominator, S.primes) == 1


def is_s_integer(x: RationalLike, S: PrimeSet) -> bool:
    return _strip(Fraction(x).denominator, S.primes) == 1


def is_s_unit_int(n: int, primes) -> bool:
    """S-unit test for a nonzero integer; the fast path used by the enumeration kernels."""
    return n != 0 and _strip(abs(n), primes) == 1


def s_exponents(x: RationalLike, S: PrimeSet) -> Optional[tuple]:
    """Exponent vector of an S-unit (one entry per prime of S), or None."""
    if not is_s_unit(x, S):
        return None
    return tuple(p_valuation(x, p) for p in S.primes)


def height(x: RationalLike, S: PrimeSet) -> Optional[int]:
    """Largest absolute exponent of an S-unit, None for non-units."""
    exps = s_exponents(x, S)
    if exps is None:
        return None
    return max((abs(e) for e in exps), default=0)


def from_exponents(exps, S: PrimeSet, sign: int = 1) -> Fraction:
    num = den = 1
    for p, e in zip(S.primes, exps):
        if e >= 0:
            num *= p**e
        else:
            den *= p ** (-e)
    return Fraction(sign * num, den)
