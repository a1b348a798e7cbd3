"""Lower bound on the recovered entanglement fidelity and its Taylor coefficients.

For the corrected set ``{K0, K1, ..., Km}`` the bound is
``lambda_K0 + lambda_K1 + (m - 1) lambda_Kl`` where each ``lambda`` is the
smallest expectation over logical states (all ``l >= 2`` share one value).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from permcodes.code_builder import CodeParameters, gram_matrix
from permcodes.damping import f1f1_expectation, f1fm_expectation, fourier_diagonal, k0_expectation
from permcodes.exact_poly import GammaPolynomial

LABELS = ("K0", "K1", "Kl")


class GridOutOfRange(ValueError):
    pass


def lambda_polynomials(params: CodeParameters, max_degree: int | None = None) -> dict[str, list[GammaPolynomial]]:
    """Per-operator list of per-state expectation polynomials (index d-1)."""
    ds = range(1, params.D + 1)
    return {
        "K0": [k0_expectation(d, params, max_degree) for d in ds],
        "K1": [fourier_diagonal(d, params, True, max_degree) for d in ds],
        "Kl": [fourier_diagonal(d, params, False, max_degree) for d in ds],
    }


def multiplicities(params: CodeParameters) -> dict[str, int]:
    return {"K0": 1, "K1": 1, "Kl": params.m - 1}


def _min_with_index(values: Sequence[Fraction]) -> tuple[Fraction, int]:
    # ties go to the smaller d
    best = min(range(len(values)), key=lambda i: (values[i], i))
    return values[best], best + 1


def lambda_min(label: str, params: CodeParameters, gamma: Fraction | float) -> tuple[Fraction, int]:
    """Smallest expectation of ``label`` over logical states at ``gamma``, and its d.

    ``label`` is one of K0, K1, Kl (any l >= 2), F1F1 or F1Fm.
    """
    g = Fraction(gamma)
    if not 0 <= g < 1:
        raise GridOutOfRange(f"gamma={gamma} outside [0, 1)")
    if label in LABELS:
        polys = lambda_polynomials(params)[label]
    elif label in ("F1F1", "F1Fm"):
        fn = f1f1_expectation if label == "F1F1" else f1fm_expectation
        polys = [fn(d, params) for d in range(1, params.D + 1)]
    else:
        raise ValueError(f"unknown operator label {label!r}")
    return _min_with_index([p.evaluate(g) for p in polys])


@dataclass(frozen=True)
class BoundRow:
    gamma: Fraction
    raw: Fraction
    discounted: Fraction
    lambdas: dict[str, Fraction]
    argmin: dict[str, int]


@dataclass
class FidelityReport:
    params: CodeParameters
    lambda_polys: dict[str, list[GammaPolynomial]]
    rows: list[BoundRow]
    max_overlap: float
    discount_factor: Fraction | float
    argmin_switches: list[tuple[str, Fraction, int, int]] = field(default_factory=list)

    @property
    def bound_values(self) -> list[tuple[Fraction, Fraction]]:
        return [(r.gamma, r.raw) for r in self.rows]


def _discount(params: CodeParameters) -> tuple[float, Fraction | float]:
    gm = gram_matrix(params)
    worst = gm.max_off_diagonal
    if isinstance(worst, Fraction):
        return float(worst), 1 - params.D * worst
    return float(worst), 1 - params.D * float(worst)


def bound_row(params: CodeParameters, gamma: Fraction | float, polys=None, discount=None) -> BoundRow:
    g = Fraction(gamma)
    if not 0 <= g < 1:
        raise GridOutOfRange(f"gamma={gamma} outside [0, 1)")
    polys = polys or lambda_polynomials(params)
    if discount is None:
        discount = _discount(params)[1]
    mult = multiplicities(params)
    lambdas, argmin = {}, {}
    for label in LABELS:
        lambdas[label], argmin[label] = _min_with_index([p.evaluate(g) for p in polys[label]])
    raw = sum(mult[k] * lambdas[k] for k in LABELS)
    disc = raw * discount if isinstance(discount, Fraction) else Fraction(float(raw) * discount)
    return BoundRow(g, raw, disc, lambdas, argmin)


def fidelity_lower_bound(params: CodeParameters, gamma_grid: Sequence[Fraction | float]) -> FidelityReport:
    """Evaluate the bound exactly at every grid point.

    Grid points must lie in [0, 1); gamma = 0 gives exactly 1.
    """
    for g in gamma_grid:
        if not 0 <= Fraction(g) < 1:
            raise GridOutOfRange(f"gamma={g} outside [0, 1)")
    polys = lambda_polynomials(params)
    worst, discount = _discount(params)
    rows = [bound_row(params, g, polys, discount) for g in gamma_grid]
    switches = []
    for prev, cur in itertools.pairwise(rows):
        for label in LABELS:
            if prev.argmin[label] != cur.argmin[label]:
                switches.append((label, cur.gamma, prev.argmin[label], cur.argmin[label]))
    return FidelityReport(params, polys, rows, worst, discount, switches)


# --------------------------------------------------------------------------
# Taylor coefficients


def closed_form_constants(params: CodeParameters) -> dict[str, Fraction]:
    """Closed-form targets: first-order slope, c, c' and the q-scaled slope."""
    N, m = params.N, params.m
    g1, gD = params.g[0], params.g[-1]
    c_prime = 1 + Fraction(2 * gD - g1, N) - Fraction(2, N) + Fraction(4 * g1, N)
    c = c_prime + Fraction(3 * g1, m)
    out = {
        "first_order": -Fraction(N * g1, 4 * m),
        "c": c,
        "c_prime": c_prime,
        "second_order": -c * N * N / 8,
        "second_order_prime": -c_prime * N * N / 8,
    }
    if params.q is not None and params.q >= 2:
        out["first_order_q_scaled"] = -Fraction(1, 4 * N ** (params.q - 2))
    return out


def _lexmin(polys: Sequence[GammaPolynomial], order: int) -> tuple[GammaPolynomial, int]:
    key = lambda i: (tuple(polys[i].coefficient(j) for j in range(order + 1)), i)  # noqa: E731
    best = min(range(len(polys)), key=key)
    return polys[best], best + 1


@dataclass(frozen=True)
class OrderComparison:
    order: int
    extracted: Fraction  # small-gamma expansion of the pointwise-min bound
    uniform: Fraction  # one worst-case d for the whole bound
    per_coefficient: Fraction  # each coefficient minimized independently
    closed_form: Fraction
    delta: Fraction  # extracted - closed_form
    argmin: dict[str, int]

    @property
    def agrees(self) -> bool:
        return self.delta == 0


@dataclass(frozen=True)
class TaylorComparison:
    params: CodeParameters
    constant: Fraction
    orders: tuple[OrderComparison, ...]
    constants: dict[str, Fraction]

    @property
    def first_order_ok(self) -> bool:
        """Extracted slope no worse than the closed-form slope."""
        return self.orders[0].extracted >= self.constants["first_order"]


def taylor_comparison(params: CodeParameters, order: int = 2) -> TaylorComparison:
    """Exact low-order coefficients of the assembled bound versus the closed forms.

    Differences are reported, never corrected.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    polys = lambda_polynomials(params, max_degree=order)
    mult = multiplicities(params)
    lex = {k: _lexmin(polys[k], order) for k in LABELS}
    assembled = sum((lex[k][0].scale(mult[k]) for k in LABELS), GammaPolynomial())
    per_d = [sum((polys[k][i].scale(mult[k]) for k in LABELS), GammaPolynomial()) for i in range(params.D)]
    uniform, _ = _lexmin(per_d, order)
    consts = closed_form_constants(params)
    targets = {1: consts["first_order"], 2: consts["second_order"]}
    rows = []
    for j in range(1, order + 1):
        per_coef = sum(mult[k] * min(p.coefficient(j) for p in polys[k]) for k in LABELS)
        rows.append(
            OrderComparison(
                order=j,
                extracted=assembled.coefficient(j),
                uniform=uniform.coefficient(j),
                per_coefficient=per_coef,
                closed_form=targets[j],
                delta=assembled.coefficient(j) - targets[j],
                argmin={k: lex[k][1] for k in LABELS},
            )
        )
    return TaylorComparison(params, assembled.coefficient(0), tuple(rows), consts)


# --------------------------------------------------------------------------
# formatting


def round_sig(x: Fraction, digits: int) -> Decimal:
    """Round an exact value to ``digits`` significant digits, half-even."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        return Decimal(x.numerator) / Decimal(x.denominator)


def format_sig(x: Fraction, digits: int = 12) -> str:
    """Scientific notation with ``digits`` significant digits, e.g. ``9.99e-01``."""
    d = round_sig(x, digits)
    if d == 0:
        return f"{0:.{digits - 1}e}"
    sign, mantissa, _ = d.as_tuple()
    text = "".join(map(str, mantissa)).ljust(digits, "0")[:digits]
    return f"{'-' if sign else ''}{text[0]}.{text[1:]}e{d.adjusted():+03d}"


def _fmt(x: Fraction) -> str:
    return format_sig(x, 12)


def table_rows(report: FidelityReport, discounted: bool = False) -> list[list[str]]:
    """CSV rows, header first."""
    header = ["gamma", "raw_bound"]
    if discounted:
        header.append("discounted_bound")
    header += ["lambda_K0", "lambda_K1", "lambda_Kl", "argmin_K0", "argmin_K1", "argmin_Kl"]
    out = [header]
    for r in report.rows:
        row = [format_sig(r.gamma, 6), _fmt(r.raw)]
        if discounted:
            row.append(_fmt(r.discounted))
        row += [_fmt(r.lambdas[k]) for k in LABELS]
        row += [str(r.argmin[k]) for k in LABELS]
        out.append(row)
    return out

