"""Primes, gcd bookkeeping and the linear Diophantine collision analysis.

Code parameters are built from a run of consecutive primes plus one even
number, and two logical states can only share a Dicke weight when
``x * g_d = y * g_e + s`` has a solution.  Everything here is plain integer
arithmetic on Python ints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from permcodes.code_builder import CodeParameters

_TRIAL_DIVISION_LIMIT = 1 << 32
# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class CoprimalityViolation(ArithmeticError):
    """Two members of a supposedly coprime sequence share a factor."""


class CollisionFound(ArithmeticError):
    """A pair of spacings violates the lcm/gcd identities of the construction."""

    def __init__(self, message: str, records: list[PairRecord] | None = None):
        super().__init__(message)
        self.records = records or []


def _strong_probable_prime(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(x: int) -> bool:
    """Return True iff ``x`` is prime.

    Trial division below 2**32, deterministic strong-probable-prime bases
    above.  No randomness is involved.
    """
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0 or x % 3 == 0:
        return False
    if x < _TRIAL_DIVISION_LIMIT:
        f = 5
        while f * f <= x:
            if x % f == 0 or x % (f + 2) == 0:
                return False
            f += 6
        return True
    return all(_strong_probable_prime(x, b) for b in _MR_BASES if b % x)


def primes() -> Iterator[int]:
    """Yield 2, 3, 5, 7, ... forever."""
    yield 2
    for n in itertools.count(3, 2):
        if is_prime(n):
            yield n


def nth_prime(k: int) -> int:
    """The k-th prime, 1-indexed (``nth_prime(1) == 2``)."""
    if k < 1:
        raise ValueError(f"prime index must be >= 1, got {k}")
    return next(itertools.islice(primes(), k - 1, None))


def prime_index(p: int) -> int:
    """Inverse of :func:`nth_prime`; raises ValueError if ``p`` is not prime."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sum(1 for _ in itertools.takewhile(lambda x: x <= p, primes()))


def pairwise_coprime(values: list[int] | tuple[int, ...]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(values, 2))


@dataclass(frozen=True)
class CoprimeSequence:
    values: tuple[int, ...]
    product: int

    def __post_init__(self) -> None:
        if list(self.values) != sorted(self.values):
            raise ValueError(f"values not sorted: {self.values}")
        if math.prod(self.values) != self.product:
            raise ValueError("product does not match values")
        for a, b in itertools.combinations(self.values, 2):
            if math.gcd(a, b) != 1:
                raise CoprimalityViolation(f"gcd({a}, {b}) = {math.gcd(a, b)}")

    @property
    def is_even(self) -> bool:
        return self.product % 2 == 0


def build_coprime_sequence(k: int, D: int) -> CoprimeSequence:
    """Coprime sequence ``(p_k, p_k + 1, p_{k+1}, ..., p_{k+D-2})``.

    ``k`` is a prime index; ``p_k`` must be at least 5.  With ``D == 2``
    only ``(p_k, p_k + 1)`` is returned.
    """
    if D < 2:
        raise ValueError(f"need D >= 2, got {D}")
    run = list(itertools.islice(primes(), k - 1, k - 1 + max(D - 1, 1)))
    p_k = run[0]
    if p_k < 5:
        raise ValueError(f"p_k must be >= 5, got p_{k} = {p_k}")
    values = [p_k, p_k + 1, *run[1 : D - 1]]
    for a, b in itertools.combinations(values, 2):
        if math.gcd(a, b) != 1:
            raise CoprimalityViolation(f"gcd({a}, {b}) = {math.gcd(a, b)}")
    values.sort()
    return CoprimeSequence(tuple(values), math.prod(values))


def coprime_sequence_from_prime(p: int, D: int) -> CoprimeSequence:
    """Same as :func:`build_coprime_sequence` but starting from the prime value."""
    return build_coprime_sequence(prime_index(p), D)


def diophantine_solvable(g: int, g2: int, s: int) -> bool:
    """Whether ``x*g = y*g2 + s`` has an integer solution."""
    if g < 1 or g2 < 1:
        raise ValueError("g and g2 must be positive")
    return s % math.gcd(g, g2) == 0


def min_positive_solution(g: int, g2: int) -> tuple[int, int]:
    """Smallest positive ``(x, y)`` with ``x*g == y*g2``."""
    if g < 1 or g2 < 1:
        raise ValueError("g and g2 must be positive")
    h = math.gcd(g, g2)
    return g2 // h, g // h


@dataclass(frozen=True)
class PairRecord:
    d: int
    d2: int
    g: int
    g2: int
    gcd: int
    expected_gcd: int
    lcm: int
    N: int

    @property
    def ok(self) -> bool:
        return self.lcm == self.N and self.gcd == self.expected_gcd and self.gcd > 1


def verify_no_interior_collision(params: CodeParameters) -> list[PairRecord]:
    """Check lcm(g_d, g_e) == N and gcd(g_d, g_e) == N/(n_d n_e) > 1 for every pair.

    Returns one record per unordered pair; raises CollisionFound (carrying
    all records) if any pair fails.
    """
    records = []
    for (d, gd), (e, ge) in itertools.combinations(enumerate(params.g, start=1), 2):
        x, _ = min_positive_solution(gd, ge)
        records.append(
            PairRecord(
                d=d,
                d2=e,
                g=gd,
                g2=ge,
                gcd=math.gcd(gd, ge),
                expected_gcd=params.N // (params.n[d - 1] * params.n[e - 1]),
                lcm=x * gd,
                N=params.N,
            )
        )
    bad = [r for r in records if not r.ok]
    if bad:
        desc = ", ".join(f"({r.g},{r.g2}): gcd={r.gcd} lcm={r.lcm}" for r in bad)
        raise CollisionFound(f"pair identities violated: {desc}", records)
    return records
