"""Code parameters and logical states in the Dicke-weight basis.

Logical state ``d`` is a superposition of Dicke states ``|D^m_{g_d j}>`` for
odd ``j`` with squared amplitude ``C(n_d, j) / 2**(n_d - 1)``.  Only the
squared amplitudes are stored, so everything stays rational.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Sequence, Union

from permcodes.exact_poly import format_fraction, parse_fraction
from permcodes.number_theory import min_positive_solution

# --------------------------------------------------------------------------
# errors


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class InvalidParameters(ValueError):
    """Parameter validation failed; ``violations`` lists every problem found."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotCoprime(InvalidParameters):
    pass


class TooSmall(InvalidParameters):
    pass


class BadExponent(InvalidParameters):
    pass


class NotSorted(InvalidParameters):
    pass


class OddProduct(InvalidParameters):
    pass


class TooFewStates(InvalidParameters):
    pass


class WeightOverflow(ValueError):
    pass


_ERROR_TYPES = {
    cls.__name__: cls for cls in (NotCoprime, TooSmall, BadExponent, NotSorted, OddProduct, TooFewStates)
}

# --------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class CodeParameters:
    """A validated code instance.

    ``q`` is None for toy parameters whose length ``m`` was given directly.
    """

    n: tuple[int, ...]
    g: tuple[int, ...]
    N: int
    q: int | None
    m: int
    legacy: bool = False

    @property
    def D(self) -> int:
        return len(self.n)

    def label(self) -> str:
        base = ",".join(map(str, self.n))
        return f"({base}; q={self.q})" if self.q is not None else f"({base}; g={self.g}, m={self.m})"


def validate(
    n: Sequence[int],
    q: int,
    *,
    legacy: bool = False,
    allow_odd_N: bool = False,
) -> CodeParameters:
    """Check the construction constraints and derive ``N``, ``g`` and ``m``.

    With ``legacy=True`` the size constraints, ``q >= 3``, ``D >= 3`` and
    even ``N`` are relaxed; coprimality and ordering are always enforced.
    """
    n = tuple(int(x) for x in n)
    violations: list[Violation] = []
    if not n or any(x < 1 for x in n):
        raise TooSmall([Violation("TooSmall", f"n must be positive integers, got {n}")])
    if list(n) != sorted(n):
        violations.append(Violation("NotSorted", f"{n}"))
    for a, b in itertools.combinations(n, 2):
        if math.gcd(a, b) != 1:
            violations.append(Violation("NotCoprime", f"({a},{b})"))
    N = math.prod(n)
    g = tuple(N // x for x in n)
    if not legacy:
        if len(n) < 3:
            violations.append(Violation("TooFewStates", f"D={len(n)} < 3 requires legacy mode"))
        small_n = [x for x in n if x < 4]
        if small_n:
            violations.append(Violation("TooSmall", f"n_d < 4: {tuple(small_n)}"))
        small_g = [x for x in g if x < 3]
        if small_g:
            violations.append(Violation("TooSmall", f"g_d < 3: {tuple(small_g)}"))
        if q < 3:
            violations.append(Violation("BadExponent", f"q={q} < 3"))
        if N % 2 and not allow_odd_N:
            violations.append(Violation("OddProduct", f"N={N} is odd"))
    elif q < 1:
        violations.append(Violation("BadExponent", f"q={q} < 1"))
    if violations:
        raise _ERROR_TYPES[violations[0].kind](violations)
    return CodeParameters(n=n, g=g, N=N, q=q, m=N**q, legacy=legacy)


def toy_parameters(n: Sequence[int], g: Sequence[int], m: int) -> CodeParameters:
    """Legacy parameters with free spacings and length, for dense-oracle checks.

    None of the construction constraints are imposed; only that every
    supported weight fits in ``m`` qubits.
    """
    n, g = tuple(n), tuple(g)
    if len(n) != len(g) or not n:
        raise ValueError("n and g must be non-empty and of equal length")
    for nd, gd in zip(n, g):
        if nd < 1 or gd < 1:
            raise ValueError("n and g entries must be positive")
        if gd * index_set(nd)[-1] > m:
            raise WeightOverflow(f"weight {gd * index_set(nd)[-1]} exceeds m={m}")
    return CodeParameters(n=n, g=g, N=math.prod(n), q=None, m=m, legacy=True)


# --------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class DickeVector:
    """Permutation-invariant state as weight -> squared amplitude."""

    m: int
    support: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        for w, a2 in self.support:
            if not 0 <= w <= self.m:
                raise WeightOverflow(f"weight {w} outside [0, {self.m}]")
            if a2 <= 0:
                raise ValueError(f"non-positive squared amplitude at weight {w}")
        if sum(a2 for _, a2 in self.support) != 1:
            raise ValueError("squared amplitudes do not sum to 1")

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w for w, _ in self.support)

    @property
    def squared_amplitudes(self) -> tuple[Fraction, ...]:
        return tuple(a2 for _, a2 in self.support)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.support)


def index_set(n_d: int) -> list[int]:
    """Odd integers 1, 3, ..., 2*floor((n_d - 1)/2) + 1."""
    if n_d < 1:
        raise ValueError(f"n_d must be >= 1, got {n_d}")
    return list(range(1, 2 * ((n_d - 1) // 2) + 2, 2))


def _check_index(d: int, params: CodeParameters) -> None:
    if not 1 <= d <= params.D:
        raise IndexError(f"logical index {d} outside 1..{params.D}")


@lru_cache(maxsize=None)
def logical_state(d: int, params: CodeParameters) -> DickeVector:
    """Logical basis state ``d`` (1-indexed)."""
    _check_index(d, params)
    n_d, g_d = params.n[d - 1], params.g[d - 1]
    idx = index_set(n_d)
    if g_d * idx[-1] > params.m:
        raise WeightOverflow(f"weight {g_d * idx[-1]} exceeds m={params.m}")
    norm = 2 ** (n_d - 1)
    return DickeVector(params.m, tuple((g_d * j, Fraction(math.comb(n_d, j), norm)) for j in idx))


def colliding_weights(d: int, d2: int, params: CodeParameters, shift: int = 0) -> list[tuple[int, int, int]]:
    """Supported weight pairs with ``g_d t == g_d2 t2 + shift``.

    Returns ``(t, t2, weight)`` triples where ``weight = g_d t``.  For
    ``shift == 0`` only multiples of lcm(g_d, g_d2) are examined; otherwise
    solutions exist only when gcd(g_d, g_d2) divides the shift, and the
    (few) candidates are scanned directly.
    """
    _check_index(d, params)
    _check_index(d2, params)
    g1, g2 = params.g[d - 1], params.g[d2 - 1]
    I1, I2 = set(index_set(params.n[d - 1])), set(index_set(params.n[d2 - 1]))
    if shift % math.gcd(g1, g2):
        return []
    out = []
    if shift == 0:
        step = min_positive_solution(g1, g2)[0] * g1
        top = min(g1 * max(I1), g2 * max(I2))
        for w in range(step, top + 1, step):
            t, t2 = w // g1, w // g2
            if t in I1 and t2 in I2:
                out.append((t, t2, w))
        return out
    for t in sorted(I1):
        rest = g1 * t - shift
        if rest > 0 and rest % g2 == 0 and rest // g2 in I2:
            out.append((t, rest // g2, g1 * t))
    return out


# --------------------------------------------------------------------------
# overlaps


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a non-negative rational if it is rational, else None."""
    if x < 0:
        raise ValueError("negative radicand")
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


@dataclass(frozen=True)
class Surd:
    """``rational + sum(sqrt(r) for r in radicands)``, kept unevaluated."""

    rational: Fraction
    radicands: tuple[Fraction, ...] = field(default_factory=tuple)

    def __float__(self) -> float:
        return float(self.rational) + sum(math.sqrt(r) for r in self.radicands)

    def __str__(self) -> str:
        parts = [format_fraction(self.rational)] if self.rational else []
        parts += [f"sqrt({format_fraction(r)})" for r in self.radicands]
        return " + ".join(parts) or "0/1"


ExactValue = Union[Fraction, Surd]


def overlap(d: int, d2: int, params: CodeParameters) -> ExactValue:
    """Exact inner product <d_L|d2_L>.

    A Fraction whenever every colliding amplitude product is rational
    (always the case for the construction's parameters), otherwise a Surd.
    """
    a, b = logical_state(d, params).as_dict(), logical_state(d2, params).as_dict()
    rational, radicands = Fraction(0), []
    for t, t2, w in colliding_weights(d, d2, params):
        prod = a[w] * b[w]
        root = exact_sqrt(prod)
        if root is None:
            radicands.append(prod)
        else:
            rational += root
    return Surd(rational, tuple(radicands)) if radicands else rational


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple[tuple[ExactValue, ...], ...]
    max_off_diagonal: ExactValue
    argmax: tuple[int, int] | None


def gram_matrix(params: CodeParameters) -> GramMatrix:
    D = params.D
    rows = [[Fraction(1) if i == j else Fraction(0) for j in range(D)] for i in range(D)]
    best: ExactValue = Fraction(0)
    where = None
    for i, j in itertools.combinations(range(1, D + 1), 2):
        v = overlap(i, j, params)
        rows[i - 1][j - 1] = rows[j - 1][i - 1] = v
        if float(v) > float(best):
            best, where = v, (i, j)
    return GramMatrix(tuple(tuple(r) for r in rows), best, where)


# --------------------------------------------------------------------------
# descriptor I/O


def exact_str(v: ExactValue) -> str:
    return format_fraction(v) if isinstance(v, Fraction) else str(v)


def descriptor(params: CodeParameters) -> dict[str, Any]:
    """Serializable description of the code; exact values only, no floats."""
    gram = gram_matrix(params)
    return {
        "n": list(params.n),
        "q": params.q,
        "N": params.N,
        "g": list(params.g),
        "m": params.m,
        "legacy": params.legacy,
        "states": [
            {
                "d": d,
                "weights": list(logical_state(d, params).weights),
                "squared_amplitudes": [format_fraction(a) for a in logical_state(d, params).squared_amplitudes],
            }
            for d in range(1, params.D + 1)
        ],
        "gram_off_diagonal": [
            {"d": i, "d2": j, "overlap": exact_str(gram.entries[i - 1][j - 1])}
            for i, j in itertools.combinations(range(1, params.D + 1), 2)
        ],
    }


def dump_descriptor(params: CodeParameters, path: str | Path) -> None:
    Path(path).write_text(json.dumps(descriptor(params), indent=2) + "\n")


def parameters_from_descriptor(doc: dict[str, Any]) -> CodeParameters:
    """Rebuild parameters from a descriptor and check its stored states."""
    if doc.get("q") is None:
        params = toy_parameters(doc["n"], doc["g"], doc["m"])
    else:
        params = validate(doc["n"], doc["q"], legacy=doc.get("legacy", False), allow_odd_N=True)
    if [params.N, list(params.g), params.m] != [doc["N"], doc["g"], doc["m"]]:
        raise ValueError("descriptor N/g/m inconsistent with n and q")
    for entry in doc.get("states", []):
        state = logical_state(entry["d"], params)
        stored = [parse_fraction(s) for s in entry["squared_amplitudes"]]
        if list(state.weights) != entry["weights"] or list(state.squared_amplitudes) != stored:
            raise ValueError(f"descriptor state {entry['d']} does not match the construction")
    return params


def load_descriptor(path: str | Path) -> CodeParameters:
    return parameters_from_descriptor(json.loads(Path(path).read_text()))
