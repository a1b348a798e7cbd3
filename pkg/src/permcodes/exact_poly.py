"""Exact rational polynomials in the damping rate gamma.

Coefficients are :class:`fractions.Fraction`; the constant term comes first.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Union

Number = Union[int, Fraction]

#: digits used when a polynomial is evaluated at a float
FLOAT_EVAL_DIGITS = 50


class IdentityViolation(ArithmeticError):
    """A closed-form identity disagreed with its direct evaluation."""


def binomial(n: int, k: int) -> int:
    """C(n, k), zero when k > n or k < 0."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def _moment_closed_form(n: int, r: int) -> Fraction:
    if r == 0:
        return Fraction(2**n)
    if r == 1:
        return Fraction(n * 2**n, 2)
    if r == 2:
        return Fraction(n * (n + 1) * 2**n, 4)
    if r == 3:
        return Fraction(n * n * (n + 3) * 2**n, 8)
    raise ValueError(f"moment order must be 0..3, got {r}")


def moment_sum(n: int, r: int) -> Fraction:
    """Sum over t of t**r * C(n, t), checked against its closed form."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    closed = _moment_closed_form(n, r)
    direct = sum(t**r * math.comb(n, t) for t in range(n + 1))
    if direct != closed:
        raise IdentityViolation(f"moment r={r}, n={n}: direct {direct} != closed form {closed}")
    return Fraction(direct)


def _frac(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"exact coefficient required, got {type(x).__name__}")


class GammaPolynomial:
    """Polynomial in gamma with exact rational coefficients.

    Immutable; trailing zeros are trimmed so the zero polynomial has an
    empty coefficient tuple.
    """

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, value: Number) -> GammaPolynomial:
        return cls([value])

    @classmethod
    def gamma(cls) -> GammaPolynomial:
        return cls([0, 1])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, j: int) -> Fraction:
        if j < 0:
            raise ValueError("negative power")
        return self.coeffs[j] if j < len(self.coeffs) else Fraction(0)

    def truncate(self, max_degree: int) -> GammaPolynomial:
        return GammaPolynomial(self.coeffs[: max_degree + 1])

    def shift(self, k: int = 1) -> GammaPolynomial:
        """Multiply by gamma**k."""
        if self.is_zero():
            return self
        return GammaPolynomial((Fraction(0),) * k + self.coeffs)

    def __add__(self, other: GammaPolynomial | Number) -> GammaPolynomial:
        if not isinstance(other, GammaPolynomial):
            other = GammaPolynomial.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return GammaPolynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> GammaPolynomial:
        return GammaPolynomial(-x for x in self.coeffs)

    def __sub__(self, other: GammaPolynomial | Number) -> GammaPolynomial:
        if not isinstance(other, GammaPolynomial):
            other = GammaPolynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other: Number) -> GammaPolynomial:
        return GammaPolynomial.constant(other) - self

    def scale(self, factor: Number) -> GammaPolynomial:
        f = _frac(factor)
        return GammaPolynomial(x * f for x in self.coeffs)

    def __mul__(self, other: GammaPolynomial | Number) -> GammaPolynomial:
        if not isinstance(other, GammaPolynomial):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return GammaPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return GammaPolynomial(out)

    def __rmul__(self, other: Number) -> GammaPolynomial:
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GammaPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == GammaPolynomial.constant(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"GammaPolynomial([{', '.join(str(c) for c in self.coeffs)}])"

    @cached_property
    def _integer_form(self) -> tuple[tuple[int, ...], int]:
        # integer numerators over one common denominator, for fast Horner
        den = math.lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        return tuple(c.numerator * (den // c.denominator) for c in self.coeffs), den

    def evaluate(self, gamma: Number | float) -> Fraction | Decimal:
        """Value at ``gamma``.

        Exact for int/Fraction arguments.  A float argument is converted to
        its exact binary value, evaluated exactly and rounded to
        ``FLOAT_EVAL_DIGITS`` significant digits.
        """
        if isinstance(gamma, float):
            exact = self.evaluate(Fraction(gamma))
            with localcontext() as ctx:
                ctx.prec = FLOAT_EVAL_DIGITS
                return Decimal(exact.numerator) / Decimal(exact.denominator)
        g = _frac(gamma)
        nums, den = self._integer_form
        if not nums:
            return Fraction(0)
        p, q = g.numerator, g.denominator
        # Horner on sum c_i p^i q^(deg-i), then divide by den * q^deg
        acc = 0
        qpow = 1
        for c in reversed(nums):
            acc = acc * p + c * qpow
            qpow *= q
        return Fraction(acc, den * (qpow // q))

    __call__ = evaluate


def one_minus_gamma_pow(e: int, max_degree: int | None = None) -> GammaPolynomial:
    """Expansion of (1 - gamma)**e, optionally truncated after ``max_degree``."""
    if e < 0:
        raise ValueError(f"exponent must be non-negative, got {e}")
    top = e if max_degree is None else min(e, max_degree)
    return GammaPolynomial((-1) ** k * math.comb(e, k) for k in range(top + 1))


def format_fraction(x: Number) -> str:
    """Render as ``"p/q"``, always with an explicit denominator."""
    f = _frac(x)
    return f"{f.numerator}/{f.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)
