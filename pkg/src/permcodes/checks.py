"""Named pass/fail checks comparing independent computations.

Two suites: ``oracle_suite`` pits the dense simulator against the exact
kernels on small ``m``; ``code_checks`` runs the weight/Diophantine
bookkeeping for one code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from permcodes import oracle
from permcodes.code_builder import (
    CodeParameters,
    exact_str,
    gram_matrix,
    logical_state,
    toy_parameters,
)
from permcodes.damping import (
    Pair,
    cross_fourier_expectation,
    cross_term_vanishes,
    dicke_pair_expectation,
    support_gap,
)
from permcodes.exact_poly import format_fraction
from permcodes.fidelity import bound_row
from permcodes.number_theory import CollisionFound, verify_no_interior_collision

DEFAULT_TOLERANCES = {
    "kernel": 1e-12,
    "fourier": 1e-10,
    "cross": 1e-12,
    "permutation": 1e-12,
    "completeness": 1e-10,
    "linearity": 1e-12,
    "recovery": 1e-9,
}

#: toy codes with pairwise-orthogonal corrupted spaces, as (n, g); need m >= 6
TOY_CODES = (((2, 3), (4, 2)), ((2, 4), (4, 2)), ((4,), (2,)))


@dataclass(frozen=True)
class CheckResult:
    name: str
    computed: str
    reference: str
    delta: str
    tolerance: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"check={self.name} computed={self.computed} reference={self.reference} "
            f"delta={self.delta} tol={self.tolerance} status={status}"
        )


def _num(x: float) -> str:
    return format(x, ".15g")


def _close(name: str, computed: complex, reference: float, tol: float) -> CheckResult:
    delta = abs(computed - reference)
    shown = computed.real if isinstance(computed, complex) and abs(computed.imag) <= tol else computed
    return CheckResult(name, _num(shown) if not isinstance(shown, complex) else str(shown), _num(reference), _num(delta), _num(tol), delta <= tol)


def _join(xs) -> str:
    return "none" if xs is None else "-".join(map(str, xs))


def format_report(results: list[CheckResult]) -> str:
    failed = [r.name for r in results if not r.passed]
    lines = [r.line() for r in results]
    lines.append(f"summary passed={len(results) - len(failed)} failed={len(failed)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# dense oracle suite


def kernel_checks(m: int, gamma: float, tol: float) -> list[CheckResult]:
    out = []
    g = Fraction(gamma)
    K0 = oracle.kraus_dense("K0", m, gamma)
    F = [oracle.kraus_dense("F", m, gamma, j) for j in range(1, m + 1)]
    for w in range(m + 1):
        psi = oracle.dicke_dense(m, w)
        pairs = [(Pair.K0K0, K0, K0), (Pair.F1F1, F[0], F[0])]
        if m >= 2:
            pairs.append((Pair.F1FM, F[0], F[-1]))
        for pair, A, B in pairs:
            ref = float(dicke_pair_expectation(w, m, pair).evaluate(g))
            out.append(_close(f"kernel/{pair.value}/m={m}/w={w}", oracle.expectation_dense(psi, A, B), ref, tol))
        diag = [oracle.expectation_dense(psi, f, f).real for f in F]
        out.append(_close(f"kernel/Fj-invariance/m={m}/w={w}", max(diag) - min(diag), 0.0, tol))
    return out


def fourier_checks(psi: oracle.DenseState, gamma: float, tol: float, tag: str) -> list[CheckResult]:
    """<psi|K_l^+ K_l'|psi> against the diagonal closed form, all l, l'."""
    m = psi.m
    K = [oracle.kraus_dense("K", m, gamma, l).apply(psi) for l in range(1, m + 1)]
    F1, Fm = oracle.kraus_dense("F", m, gamma, 1), oracle.kraus_dense("F", m, gamma, m)
    f11 = oracle.expectation_dense(psi, F1, F1)
    f1m = oracle.expectation_dense(psi, F1, Fm)
    worst_off, worst_diag = 0.0, 0.0
    for l, l2 in itertools.product(range(m), repeat=2):
        v = K[l].inner(K[l2])
        if l != l2:
            worst_off = max(worst_off, abs(v))
        else:
            closed = f11 + (m * (l == 0) - 1) * f1m
            worst_diag = max(worst_diag, abs(v - closed))
    return [
        _close(f"fourier/off-diagonal/{tag}", worst_off, 0.0, tol),
        _close(f"fourier/diagonal/{tag}", worst_diag, 0.0, tol),
    ]


def recovery_checks(m: int, gamma: float, tol: float) -> list[CheckResult]:
    """Dense F_e of the recovered channel versus the analytic sum of lambdas."""
    out = []
    damping = oracle.full_damping_kraus(m, gamma)
    omega = oracle.corrected_set(m, gamma)
    for n, g in TOY_CODES:
        params = toy_parameters(n, g, m)
        basis = [
            oracle.code_state_dense(s.weights, s.squared_amplitudes, m)
            for s in (logical_state(d, params) for d in range(1, params.D + 1))
        ]
        rec = oracle.recovery_map(basis, omega)
        lam = float(bound_row(params, Fraction(gamma)).raw)
        k = len(basis)
        tag = f"n={_join(n)}/g={_join(g)}/m={m}/gamma={gamma}"
        out.append(_close(f"recovery/completeness/{tag}", rec.completeness_deviation(), 0.0, DEFAULT_TOLERANCES["completeness"]))
        states = {"mixed": np.eye(k) / k}
        for i in range(k):
            e = np.zeros((k, k))
            e[i, i] = 1
            states[f"basis{i + 1}"] = e
        for name, rc in states.items():
            rho = oracle.code_density(rec.basis, rc)
            fe = oracle.composed_fidelity(rho, rec.operators(), damping)
            margin = fe - lam
            out.append(CheckResult(f"recovery/bound/{tag}/{name}", _num(fe), _num(lam), _num(margin), _num(-tol), margin >= -tol))
    return out


def oracle_suite(m: int, gamma: float, seed: int, tolerances: dict[str, float] | None = None) -> list[CheckResult]:
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    rng = np.random.default_rng(seed)
    out = kernel_checks(m, gamma, tol["kernel"])
    psi = oracle.random_symmetric_state(m, rng)
    out += fourier_checks(psi, gamma, tol["fourier"], f"m={m}/random")
    out += fourier_checks(oracle.dicke_dense(m, m // 2), gamma, tol["fourier"], f"m={m}/dicke")
    even = oracle.random_symmetric_state(m, rng, range(0, m + 1, 2))
    K0 = oracle.kraus_dense("K0", m, gamma)
    worst = max(abs(oracle.expectation_dense(even, K0, oracle.kraus_dense("F", m, gamma, j))) for j in range(1, m + 1))
    out.append(_close(f"cross/K0-Fj/m={m}", worst, 0.0, tol["cross"]))
    out.append(_close(f"permutation/dicke/m={m}", oracle.permutation_invariance_check(oracle.dicke_dense(m, m // 2), 20, seed), 0.0, tol["permutation"]))
    out.append(_close(f"permutation/random/m={m}", oracle.permutation_invariance_check(psi, 20, seed), 0.0, tol["permutation"]))
    full = oracle.full_damping_kraus(m, gamma)
    out.append(_close(f"completeness/full-damping/m={m}", oracle.completeness_deviation(full, rng), 0.0, tol["completeness"]))
    K = oracle.corrected_set(m, gamma)[1:]
    F = [oracle.kraus_dense("F", m, gamma, j) for j in range(1, m + 1)]
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    lhs = sum(k.adjoint_action(k.action(v)) for k in K)
    rhs = sum(f.adjoint_action(f.action(v)) for f in F)
    out.append(_close(f"fourier/rotation-sum/m={m}", float(np.max(np.abs(lhs - rhs))), 0.0, tol["completeness"]))
    out.append(_close(f"linearity/K1/m={m}", oracle.linearity_deviation(K[0], rng), 0.0, tol["linearity"]))
    if 6 <= m <= 10:
        out += recovery_checks(m, gamma, tol["recovery"])
    return out


# --------------------------------------------------------------------------
# code bookkeeping


def code_checks(params: CodeParameters) -> list[CheckResult]:
    out = []
    try:
        records = verify_no_interior_collision(params)
    except CollisionFound as exc:
        records = exc.records
    for r in records:
        out.append(
            CheckResult(
                f"pair/{r.d},{r.d2}/gcd-lcm",
                f"gcd={r.gcd};lcm={r.lcm}",
                f"gcd={r.expected_gcd};lcm={r.N}",
                "0" if r.ok else "nonzero",
                "exact",
                r.ok,
            )
        )
    gram = gram_matrix(params)
    for d, d2 in itertools.combinations(range(1, params.D + 1), 2):
        for shift in (-1, 1):
            v = cross_term_vanishes(d, d2, shift, params)
            out.append(
                CheckResult(
                    f"diophantine/{d},{d2}/s={shift:+d}",
                    f"solvable={v.diophantine_solvable};witness={_join(v.witness)}",
                    "vanishes",
                    "0" if v.vanishes else "collision",
                    "exact",
                    v.vanishes,
                )
            )
        v = cross_term_vanishes(d, d2, 0, params)
        interior = v.witness is not None and v.witness[2] != params.N
        out.append(
            CheckResult(
                f"overlap/{d},{d2}",
                exact_str(gram.entries[d - 1][d2 - 1]),
                "collision only at weight N",
                f"witness={_join(v.witness)}",
                "exact",
                not interior,
            )
        )
        if v.witness is not None and params.m > 1:
            for label, l in (("K1", 1), ("Kl", 2)):
                poly = cross_fourier_expectation(d, d2, l, l, params, max_degree=2)
                out.append(
                    CheckResult(
                        f"fourier-cross/{d},{d2}/{label}",
                        "[" + ";".join(format_fraction(c) for c in poly.coeffs) + "]",
                        "reported",
                        "n/a",
                        "report",
                        True,
                    )
                )
    gap = support_gap(params)
    out.append(
        CheckResult(
            "support-gap",
            f"shift={gap.shift};pair={gap.d},{gap.d2};weights={_join(gap.weights)};safe_qubits={gap.max_safe_qubits}",
            f"min_g/2={format_fraction(gap.threshold)}",
            f"threshold_holds={gap.max_safe_qubits + 1 >= gap.threshold}",
            "report",
            True,
        )
    )
    bound = Fraction(1, 2 ** (params.n[0] - 1))
    worst = gram.max_off_diagonal
    ok = float(worst) <= bound if not isinstance(worst, Fraction) else worst <= bound
    out.append(CheckResult("gram/max-off-diagonal", exact_str(worst), f"<={format_fraction(bound)}", "n/a", "exact", ok))
    return out
