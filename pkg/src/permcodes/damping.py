"""Amplitude-damping expectations on code states as exact gamma polynomials.

Three operator pairs matter on a permutation-invariant state: the no-decay
operator ``K0 = A0^{(x)m}`` and the single-decay operators ``F_j``.  On a
Dicke state of weight ``w`` their expectations are

* ``<K0^+ K0>  = (1-g)^w``
* ``<F1^+ F1>  = g (1-g)^(w-1) w/m``
* ``<F1^+ Fm>  = g (1-g)^(w-1) w(m-w)/(m(m-1))``

and a logical state averages these with its squared amplitudes.  The
Fourier-recombined operators ``K_l`` are diagonal with values built from the
last two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

from permcodes.code_builder import (
    CodeParameters,
    colliding_weights,
    exact_sqrt,
    index_set,
    logical_state,
)
from permcodes.exact_poly import GammaPolynomial, binomial, format_fraction, one_minus_gamma_pow


class Pair(str, enum.Enum):
    K0K0 = "K0K0"
    F1F1 = "F1F1"
    F1FM = "F1Fm"


def _cut(p: GammaPolynomial, max_degree: int | None) -> GammaPolynomial:
    return p if max_degree is None else p.truncate(max_degree)


def dicke_pair_expectation(w: int, m: int, pair: Pair | str, max_degree: int | None = None) -> GammaPolynomial:
    """Expectation of one operator pair on the Dicke state ``|D^m_w>``."""
    pair = Pair(pair)
    if not 0 <= w <= m:
        raise ValueError(f"weight {w} outside [0, {m}]")
    if pair is Pair.K0K0:
        return one_minus_gamma_pow(w, max_degree)
    if w == 0:
        return GammaPolynomial()
    decay = one_minus_gamma_pow(w - 1, max_degree).shift(1)
    if pair is Pair.F1F1:
        return _cut(decay.scale(Fraction(w, m)), max_degree)
    if m < 2:
        raise ValueError("F1^+ Fm needs at least two qubits")
    return _cut(decay.scale(Fraction(w * (m - w), m * (m - 1))), max_degree)


def _weighted_sum(d: int, params: CodeParameters, factor, exponent_offset: int, max_degree: int | None):
    # sum_t C(n_d,t)/2^(n_d-1) * (1-g)^(g_d t - offset) * factor(g_d t)
    n_d, g_d = params.n[d - 1], params.g[d - 1]
    total = GammaPolynomial()
    for t in index_set(n_d):
        weight = Fraction(binomial(n_d, t), 2 ** (n_d - 1))
        total = total + one_minus_gamma_pow(g_d * t - exponent_offset, max_degree).scale(weight * factor(g_d * t))
    return total


@lru_cache(maxsize=None)
def k0_expectation(d: int, params: CodeParameters, max_degree: int | None = None) -> GammaPolynomial:
    """<d_L| K0^+ K0 |d_L>."""
    return _weighted_sum(d, params, lambda w: 1, 0, max_degree)


@lru_cache(maxsize=None)
def f1f1_expectation(d: int, params: CodeParameters, max_degree: int | None = None) -> GammaPolynomial:
    """<d_L| F1^+ F1 |d_L>."""
    m = params.m
    inner = _weighted_sum(d, params, lambda w: Fraction(w, m), 1, max_degree)
    return _cut(inner.shift(1), max_degree)


@lru_cache(maxsize=None)
def f1fm_expectation(d: int, params: CodeParameters, max_degree: int | None = None) -> GammaPolynomial:
    """<d_L| F1^+ Fm |d_L>."""
    m = params.m
    inner = _weighted_sum(d, params, lambda w: Fraction(w * (m - w), m * (m - 1)), 1, max_degree)
    return _cut(inner.shift(1), max_degree)


def fourier_diagonal(d: int, params: CodeParameters, first: bool, max_degree: int | None = None) -> GammaPolynomial:
    """Diagonal value of ``K_l^+ K_l`` on ``d``: l == 1 if ``first`` else l >= 2."""
    f11 = f1f1_expectation(d, params, max_degree)
    f1m = f1fm_expectation(d, params, max_degree)
    return f11 + f1m.scale(params.m - 1) if first else f11 - f1m


def fourier_expectation(d: int, l: int, l2: int, params: CodeParameters, max_degree: int | None = None) -> GammaPolynomial:
    """<d_L| K_l^+ K_l2 |d_L> for 1 <= l, l2 <= m."""
    for x in (l, l2):
        if not 1 <= x <= params.m:
            raise ValueError(f"Fourier index {x} outside 1..{params.m}")
    if l != l2:
        return GammaPolynomial()
    return fourier_diagonal(d, params, l == 1, max_degree)


@dataclass(frozen=True)
class DampingReport:
    d: int
    k0k0: GammaPolynomial
    f1f1: GammaPolynomial
    f1fm: GammaPolynomial
    fourier_diag_l1: GammaPolynomial
    fourier_diag_lgt1: GammaPolynomial

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"d": self.d}
        for name in ("k0k0", "f1f1", "f1fm", "fourier_diag_l1", "fourier_diag_lgt1"):
            out[name] = [format_fraction(c) for c in getattr(self, name).coeffs]
        return out


def damping_report(d: int, params: CodeParameters, max_degree: int | None = None) -> DampingReport:
    return DampingReport(
        d=d,
        k0k0=k0_expectation(d, params, max_degree),
        f1f1=f1f1_expectation(d, params, max_degree),
        f1fm=f1fm_expectation(d, params, max_degree),
        fourier_diag_l1=fourier_diagonal(d, params, True, max_degree),
        fourier_diag_lgt1=fourier_diagonal(d, params, False, max_degree),
    )


def state_expectation(d: int, params: CodeParameters, pair: Pair | str, max_degree: int | None = None) -> GammaPolynomial:
    """Squared-amplitude average of the per-weight kernel over state ``d``."""
    total = GammaPolynomial()
    for w, a2 in logical_state(d, params).support:
        total = total + dicke_pair_expectation(w, params.m, pair, max_degree).scale(a2)
    return total


# --------------------------------------------------------------------------
# cross terms between different logical states

#: weight shift s in g_d t = g_d2 t2 + s for <d| A^+ B |d2>
PAIR_SHIFTS = {("K0", "K0"): 0, ("K0", "F"): -1, ("F", "K0"): 1, ("F", "F"): 0}


@dataclass(frozen=True)
class CrossTermVerdict:
    d: int
    d2: int
    shift: int
    vanishes: bool
    diophantine_solvable: bool
    witness: tuple[int, int, int] | None  # (t, t2, weight)


def cross_term_vanishes(d: int, d2: int, shift: int, params: CodeParameters) -> CrossTermVerdict:
    """Decide whether <d_L| A^+ B |d2_L> is forced to zero by weight bookkeeping.

    ``shift`` is the net weight change, 0 for weight-preserving pairs and
    +-1 when exactly one side carries a single decay (see PAIR_SHIFTS).
    """
    if d == d2:
        raise ValueError("cross terms need distinct logical states")
    from permcodes.number_theory import diophantine_solvable

    g1, g2 = params.g[d - 1], params.g[d2 - 1]
    solvable = diophantine_solvable(g1, g2, shift)
    hits = colliding_weights(d, d2, params, shift) if solvable else []
    return CrossTermVerdict(d, d2, shift, not hits, solvable, hits[0] if hits else None)


@dataclass(frozen=True)
class SupportGap:
    shift: int  # smallest nonzero |w - w2| between supports of distinct states
    d: int
    d2: int
    weights: tuple[int, int]
    threshold: Fraction  # min_d g_d / 2

    @property
    def max_safe_qubits(self) -> int:
        # A^+ B on k qubits moves weight by at most 2k
        return (self.shift - 1) // 2


def support_gap(params: CodeParameters) -> SupportGap:
    """Smallest weight shift that connects two different logical states.

    Brute force over the supports, kept apart from the Diophantine route.
    Operators A, B on fewer than ``shift / 2`` qubits cannot couple states.
    """
    if params.D < 2:
        raise ValueError("need at least two logical states")
    best = None
    for d in range(1, params.D + 1):
        for d2 in range(d + 1, params.D + 1):
            for w in logical_state(d, params).weights:
                for w2 in logical_state(d2, params).weights:
                    if w != w2 and (best is None or abs(w - w2) < best[0]):
                        best = (abs(w - w2), d, d2, (w, w2))
    return SupportGap(*best, Fraction(min(params.g), 2))


def _collision_sum(d: int, d2: int, params: CodeParameters, kernel) -> GammaPolynomial:
    a, b = logical_state(d, params).as_dict(), logical_state(d2, params).as_dict()
    total = GammaPolynomial()
    for _, _, w in colliding_weights(d, d2, params):
        root = exact_sqrt(a[w] * b[w])
        if root is None:
            raise ValueError(f"irrational amplitude product at weight {w}")
        total = total + kernel(w).scale(root)
    return total


def cross_expectation(d: int, d2: int, pair: Pair | str, params: CodeParameters, max_degree: int | None = None) -> GammaPolynomial:
    """<d_L| A^+ A |d2_L> for a weight-preserving pair; nonzero only on shared weights."""
    return _collision_sum(d, d2, params, lambda w: dicke_pair_expectation(w, params.m, pair, max_degree))


def cross_fourier_expectation(
    d: int, d2: int, l: int, l2: int, params: CodeParameters, max_degree: int | None = None
) -> GammaPolynomial:
    """<d_L| K_l^+ K_l2 |d2_L>, exact, including weight-N collisions."""
    if l != l2:
        return GammaPolynomial()
    m = params.m

    def kernel(w: int) -> GammaPolynomial:
        f11 = dicke_pair_expectation(w, m, Pair.F1F1, max_degree)
        f1m = dicke_pair_expectation(w, m, Pair.F1FM, max_degree)
        return f11 + f1m.scale(m - 1) if l == 1 else f11 - f1m

    return _collision_sum(d, d2, params, kernel)
