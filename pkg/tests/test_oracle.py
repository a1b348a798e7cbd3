import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcodes import oracle
from permcodes.code_builder import logical_state, toy_parameters
from permcodes.damping import fourier_diagonal
from permcodes.fidelity import bound_row


def test_dicke_examples():
    psi = oracle.dicke_dense(3, 1)
    expected = np.zeros(8)
    expected[[1, 2, 4]] = 1 / math.sqrt(3)
    assert np.allclose(psi.amplitudes, expected)
    assert np.allclose(oracle.dicke_dense(4, 0).amplitudes, oracle.basis_state("0000").amplitudes)
    assert np.allclose(oracle.dicke_dense(5, 5).amplitudes, oracle.basis_state("11111").amplitudes)
    with pytest.raises(oracle.TooLarge):
        oracle.dicke_dense(15, 2)


def test_kraus_examples():
    K0 = oracle.kraus_dense("K0", 3, 0.0)
    assert np.allclose(K0.matrix(), np.eye(8))
    F1 = oracle.kraus_dense("F", 2, 0.36, 1)
    assert np.allclose(F1(oracle.basis_state("10")).amplitudes, 0.6 * oracle.basis_state("00").amplitudes)
    assert np.allclose(F1(oracle.basis_state("01")).amplitudes, 0)
    with pytest.raises(oracle.TooLarge):
        oracle.kraus_dense("K0", 15, 0.1)


def test_fourier_rotation_preserves_sum():
    m, gamma = 4, 0.1
    K = [oracle.kraus_dense("K", m, gamma, l).matrix() for l in range(1, m + 1)]
    F = [oracle.kraus_dense("F", m, gamma, j).matrix() for j in range(1, m + 1)]
    lhs = sum(k.conj().T @ k for k in K)
    rhs = sum(f.conj().T @ f for f in F)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_adjoint_consistent_with_matrix():
    rng = np.random.default_rng(3)
    for op in [oracle.kraus_dense("K", 4, 0.3, 3), oracle.kraus_dense("A", 4, 0.3, 0b0110)]:
        M = op.matrix()
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        assert np.allclose(op.adjoint_action(v), M.conj().T @ v)
        assert oracle.linearity_deviation(op, rng) < 1e-12


def test_full_kraus_completeness_as_matrices():
    ops = oracle.full_damping_kraus(3, 0.4)
    total = sum(o.matrix().conj().T @ o.matrix() for o in ops)
    assert np.max(np.abs(total - np.eye(8))) < 1e-10


def test_expectation_examples():
    gamma = 0.1
    F1 = oracle.kraus_dense("F", 3, gamma, 1)
    assert abs(oracle.expectation_dense(oracle.dicke_dense(3, 1), F1, F1) - 1 / 30) < 1e-12
    F1, F4 = oracle.kraus_dense("F", 4, 0.2, 1), oracle.kraus_dense("F", 4, 0.2, 4)
    assert abs(oracle.expectation_dense(oracle.dicke_dense(4, 2), F1, F4) - 4 / 75) < 1e-12
    psi = oracle.random_symmetric_state(6, np.random.default_rng(1))
    K2, K5 = oracle.kraus_dense("K", 6, 0.3, 2), oracle.kraus_dense("K", 6, 0.3, 5)
    assert abs(oracle.expectation_dense(psi, K2, K5)) < 1e-10
    with pytest.raises(oracle.DimensionMismatch):
        oracle.expectation_dense(psi, oracle.kraus_dense("K0", 5, 0.1), K2)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 8), st.floats(0.01, 0.9), st.integers(0, 2**32 - 1))
def test_fourier_orthogonality_property(m, gamma, seed):
    psi = oracle.random_symmetric_state(m, np.random.default_rng(seed))
    K = [oracle.kraus_dense("K", m, gamma, l).apply(psi) for l in range(1, m + 1)]
    F1, Fm = oracle.kraus_dense("F", m, gamma, 1), oracle.kraus_dense("F", m, gamma, m)
    f11, f1m = oracle.expectation_dense(psi, F1, F1), oracle.expectation_dense(psi, F1, Fm)
    for l in range(m):
        for l2 in range(m):
            v = K[l].inner(K[l2])
            ref = (f11 + (m * (l == 0) - 1) * f1m) if l == l2 else 0
            assert abs(v - ref) < 1e-10


def test_permutation_invariance_examples():
    assert oracle.permutation_invariance_check(oracle.dicke_dense(4, 2), 20, seed=0) <= 1e-12
    swapped = oracle.permute_qubits(oracle.basis_state("01"), [1, 0])
    assert np.allclose(swapped.amplitudes, oracle.basis_state("10").amplitudes)
    assert oracle.permutation_invariance_check(oracle.basis_state("01"), 20, seed=0) == pytest.approx(math.sqrt(2))
    toy = toy_parameters((2, 3), (4, 2), 8)
    s = logical_state(2, toy)
    psi = oracle.code_state_dense(s.weights, s.squared_amplitudes, 8)
    assert psi.norm() == pytest.approx(1, abs=1e-12)
    assert oracle.permutation_invariance_check(psi, 20, seed=7) <= 1e-12


def test_permutation_moves_qubits():
    psi = oracle.basis_state("100")
    assert np.allclose(oracle.permute_qubits(psi, [2, 0, 1]).amplitudes, oracle.basis_state("001").amplitudes)


def test_recovery_identity_channel():
    m = 3
    basis = [oracle.dicke_dense(m, 0), oracle.dicke_dense(m, 3)]
    ident = oracle.DenseOperator(m, "I", lambda v: v.copy(), lambda v: v.copy())
    rec = oracle.recovery_map(basis, [ident])
    assert rec.completeness_deviation() < 1e-10
    rho = oracle.code_density(rec.basis, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert oracle.composed_fidelity(rho, rec.operators(), [ident]) == pytest.approx(1, abs=1e-12)


def test_recovery_repetition_toy():
    m, gamma = 4, 0.05
    basis = [oracle.dicke_dense(m, 0), oracle.dicke_dense(m, 4)]
    rec = oracle.recovery_map(basis, oracle.corrected_set(m, gamma))
    assert rec.dropped == []
    assert rec.completeness_deviation() < 1e-10


def test_recovery_drops_annihilating_operators():
    m, gamma = 4, 0.05
    # every single-decay operator kills |0000>
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rec = oracle.recovery_map([oracle.dicke_dense(m, 0)], oracle.corrected_set(m, gamma))
    assert rec.dropped == ["K1", "K2", "K3", "K4"]
    assert caught and all(issubclass(w.category, oracle.RankDeficient) for w in caught)
    assert rec.completeness_deviation() < 1e-10


def test_recovery_refuses_overlapping_images():
    m, gamma = 4, 0.2
    basis = [oracle.dicke_dense(m, 2)]
    F1 = oracle.kraus_dense("F", m, gamma, 1)
    F2 = oracle.kraus_dense("F", m, gamma, 2)
    with pytest.raises(oracle.NotCorrectable):
        oracle.recovery_map(basis, [F1, F2])


def test_entanglement_fidelity_examples():
    rho = np.eye(2) / 2
    assert oracle.entanglement_fidelity(rho, [np.eye(2)]) == pytest.approx(1)
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    assert oracle.entanglement_fidelity(rho, [p / 2 for p in paulis]) == pytest.approx(0.25)
    with pytest.raises(oracle.BadDensity):
        oracle.entanglement_fidelity(np.eye(2), [np.eye(2)])
    with pytest.raises(oracle.BadDensity):
        oracle.entanglement_fidelity(np.diag([1.5, -0.5]), [np.eye(2)])


def test_composed_fidelity_matches_explicit_products():
    m, gamma = 4, 0.1
    toy = toy_parameters((2,), (2,), m)
    basis = [oracle.code_state_dense(logical_state(1, toy).weights, logical_state(1, toy).squared_amplitudes, m), oracle.dicke_dense(m, 0)]
    rec = oracle.recovery_map(basis[:1], oracle.corrected_set(m, gamma)[:2])
    damping = oracle.full_damping_kraus(m, gamma)
    rho = oracle.code_density(rec.basis, np.eye(1))
    explicit = [R @ A.matrix() for R in rec.operators() for A in damping]
    assert oracle.composed_fidelity(rho, rec.operators(), damping) == pytest.approx(oracle.entanglement_fidelity(rho, explicit), abs=1e-12)


@pytest.mark.parametrize("n, g", [((2, 3), (4, 2)), ((2, 4), (4, 2)), ((4,), (2,))])
def test_recovery_bound_toy(n, g):
    m, gamma = 8, 0.05
    params = toy_parameters(n, g, m)
    basis = [oracle.code_state_dense(logical_state(d, params).weights, logical_state(d, params).squared_amplitudes, m) for d in range(1, params.D + 1)]
    omega = oracle.corrected_set(m, gamma)
    rec = oracle.recovery_map(basis, omega)
    assert rec.completeness_deviation() < 1e-10
    analytic = float(bound_row(params, Fraction(gamma)).raw)
    dense_lambdas = sum(oracle.dense_lambda(rec.basis, op) for op in omega)
    assert dense_lambdas == pytest.approx(analytic, abs=1e-12)
    k = params.D
    rho = oracle.code_density(rec.basis, np.eye(k) / k)
    damping = oracle.full_damping_kraus(m, gamma)
    with_completion = oracle.composed_fidelity(rho, rec.operators(), damping)
    without = oracle.composed_fidelity(rho, rec.operators(with_completion=False), damping)
    assert with_completion >= without >= analytic - 1e-9


def test_dense_lambda_matches_fourier_diagonal():
    m, gamma = 8, 0.1
    params = toy_parameters((2, 3), (4, 2), m)
    s = logical_state(2, params)
    psi = oracle.code_state_dense(s.weights, s.squared_amplitudes, m)
    V = psi.amplitudes[:, None]
    for l, first in ((1, True), (3, False)):
        dense = oracle.dense_lambda(V, oracle.kraus_dense("K", m, gamma, l))
        assert dense == pytest.approx(float(fourier_diagonal(2, params, first).evaluate(Fraction(gamma))), abs=1e-12)
