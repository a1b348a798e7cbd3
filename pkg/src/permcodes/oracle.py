"""Brute-force state-vector checks on at most 14 qubits.

Everything here works on explicit ``2**m`` amplitude vectors and shares no
code with the exact polynomial path, so agreement between the two is a real
check.  Qubit 1 is the most significant bit of the basis index, i.e. the
leftmost symbol of ``|b_1 b_2 ... b_m>``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_QUBITS = 14
SVD_CUTOFF = 1e-10


class TooLarge(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotCorrectable(ValueError):
    """The corrupted code spaces are not pairwise orthogonal."""


class BadDensity(ValueError):
    pass


class RankDeficient(UserWarning):
    """An operator annihilates the code space and was dropped from the recovery."""


def _check_size(m: int) -> None:
    if m > MAX_QUBITS:
        raise TooLarge(f"m={m} exceeds the dense limit of {MAX_QUBITS} qubits")
    if m < 1:
        raise ValueError("need at least one qubit")


@lru_cache(maxsize=None)
def _popcounts(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)
    out = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        out += (idx >> b) & 1
    return out


def qubit_mask(m: int, j: int) -> int:
    """Bit mask of qubit ``j`` (1-indexed, qubit 1 is the most significant)."""
    if not 1 <= j <= m:
        raise ValueError(f"qubit {j} outside 1..{m}")
    return 1 << (m - j)


# --------------------------------------------------------------------------
# states and operators


@dataclass
class DenseState:
    m: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.m,):
            raise DimensionMismatch(f"expected {1 << self.m} amplitudes, got {self.amplitudes.shape}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: DenseState) -> complex:
        if other.m != self.m:
            raise DimensionMismatch(f"{self.m} vs {other.m} qubits")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def basis_state(bits: str) -> DenseState:
    """Computational basis state from a bit string such as ``"01"``."""
    m = len(bits)
    _check_size(m)
    amps = np.zeros(1 << m, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return DenseState(m, amps)


def dicke_dense(m: int, w: int) -> DenseState:
    """Uniform superposition of all weight-``w`` strings on ``m`` qubits."""
    _check_size(m)
    if not 0 <= w <= m:
        raise ValueError(f"weight {w} outside [0, {m}]")
    amps = np.where(_popcounts(m) == w, 1.0 / math.sqrt(math.comb(m, w)), 0.0).astype(complex)
    return DenseState(m, amps)


def symmetric_state(m: int, coefficients: dict[int, complex]) -> DenseState:
    """``sum_w c_w |D^m_w>`` with the coefficients taken as given (no normalization)."""
    amps = np.zeros(1 << m, dtype=complex)
    for w, c in coefficients.items():
        amps += c * dicke_dense(m, w).amplitudes
    return DenseState(m, amps)


def random_symmetric_state(m: int, rng: np.random.Generator, weights: Iterable[int] | None = None) -> DenseState:
    """Normalized random superposition of Dicke states (all weights by default)."""
    ws = list(range(m + 1)) if weights is None else list(weights)
    c = rng.normal(size=len(ws)) + 1j * rng.normal(size=len(ws))
    c /= np.linalg.norm(c)
    return symmetric_state(m, dict(zip(ws, c)))


@dataclass
class DenseOperator:
    """Matrix-free linear operator on ``m`` qubits."""

    m: int
    label: str
    action: Callable[[np.ndarray], np.ndarray]
    adjoint_action: Callable[[np.ndarray], np.ndarray]

    def apply(self, state: DenseState) -> DenseState:
        if state.m != self.m:
            raise DimensionMismatch(f"operator on {self.m} qubits applied to {state.m}")
        return DenseState(self.m, self.action(state.amplitudes))

    __call__ = apply

    def apply_adjoint(self, state: DenseState) -> DenseState:
        if state.m != self.m:
            raise DimensionMismatch(f"operator on {self.m} qubits applied to {state.m}")
        return DenseState(self.m, self.adjoint_action(state.amplitudes))

    def apply_columns(self, mat: np.ndarray) -> np.ndarray:
        return np.stack([self.action(mat[:, k]) for k in range(mat.shape[1])], axis=1)

    def matrix(self) -> np.ndarray:
        return self.apply_columns(np.eye(1 << self.m, dtype=complex))


def _decay_operator(m: int, gamma: float, mask: int, label: str) -> DenseOperator:
    # A_1 on every qubit in ``mask``, A_0 elsewhere
    idx = np.arange(1 << m, dtype=np.int64)
    pops = _popcounts(m)
    k = bin(mask).count("1")
    sel = (idx & mask) == mask
    src = idx[sel]
    dst = src ^ mask
    factor = math.sqrt(gamma) ** k * np.sqrt(1.0 - gamma) ** (pops[sel] - k)

    def action(psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi, dtype=complex)
        out[dst] = factor * psi[src]
        return out

    def adjoint(psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi, dtype=complex)
        out[src] = factor * psi[dst]
        return out

    return DenseOperator(m, label, action, adjoint)


def _linear_combination(m: int, label: str, ops: Sequence[DenseOperator], coeffs: np.ndarray) -> DenseOperator:
    def action(psi: np.ndarray) -> np.ndarray:
        return sum(c * op.action(psi) for c, op in zip(coeffs, ops))

    def adjoint(psi: np.ndarray) -> np.ndarray:
        return sum(np.conj(c) * op.adjoint_action(psi) for c, op in zip(coeffs, ops))

    return DenseOperator(m, label, action, adjoint)


def kraus_dense(label: str, m: int, gamma: float, index: int | None = None) -> DenseOperator:
    """One amplitude-damping operator.

    ``label`` is ``"K0"`` (no decay), ``"F"`` (decay of qubit ``index``),
    ``"K"`` (Fourier combination with index ``l`` in 1..m) or ``"A"``
    (tensor-product operator decaying every qubit in the bit mask ``index``).
    """
    _check_size(m)
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma={gamma} outside [0, 1]")
    if label == "K0":
        return _decay_operator(m, gamma, 0, "K0")
    if label == "F":
        return _decay_operator(m, gamma, qubit_mask(m, index), f"F{index}")
    if label == "A":
        if not 0 <= index < (1 << m):
            raise ValueError(f"mask {index} outside the {m}-qubit range")
        return _decay_operator(m, gamma, index, f"A{index:0{m}b}")
    if label == "K":
        if not 1 <= index <= m:
            raise ValueError(f"Fourier index {index} outside 1..{m}")
        js = np.arange(m)
        coeffs = np.exp(2j * np.pi * (index - 1) * js / m) / math.sqrt(m)
        fs = [kraus_dense("F", m, gamma, j) for j in range(1, m + 1)]
        return _linear_combination(m, f"K{index}", fs, coeffs)
    raise ValueError(f"unknown Kraus label {label!r}")


def full_damping_kraus(m: int, gamma: float) -> list[DenseOperator]:
    """All ``2**m`` tensor-product amplitude-damping operators."""
    return [kraus_dense("A", m, gamma, mask) for mask in range(1 << m)]


def corrected_set(m: int, gamma: float) -> list[DenseOperator]:
    """``[K0, K1, ..., Km]``."""
    return [kraus_dense("K0", m, gamma)] + [kraus_dense("K", m, gamma, l) for l in range(1, m + 1)]


def expectation_dense(psi: DenseState, A: DenseOperator, B: DenseOperator) -> complex:
    """<psi| A^+ B |psi>."""
    if not psi.m == A.m == B.m:
        raise DimensionMismatch("state and operators act on different qubit counts")
    return A.apply(psi).inner(B.apply(psi))


def completeness_deviation(ops: Sequence[DenseOperator], rng: np.random.Generator, trials: int = 3) -> float:
    """Max |sum_k A_k^+ A_k v - v| over random unit vectors."""
    m = ops[0].m
    worst = 0.0
    for _ in range(trials):
        v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
        v /= np.linalg.norm(v)
        acc = sum(op.adjoint_action(op.action(v)) for op in ops)
        worst = max(worst, float(np.max(np.abs(acc - v))))
    return worst


def linearity_deviation(op: DenseOperator, rng: np.random.Generator) -> float:
    n = 1 << op.m
    u, v = (rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(2))
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    return float(np.max(np.abs(op.action(a * u + b * v) - a * op.action(u) - b * op.action(v))))


def permute_qubits(state: DenseState, perm: Sequence[int]) -> DenseState:
    """Move qubit ``i`` to position ``perm[i]`` (0-indexed)."""
    m = state.m
    tensor = state.amplitudes.reshape((2,) * m)
    return DenseState(m, np.transpose(tensor, np.argsort(perm)).reshape(-1))


def permutation_invariance_check(psi: DenseState, trials: int, seed: int) -> float:
    """Largest ``|P psi - psi|`` over random qubit permutations."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        perm = rng.permutation(psi.m)
        worst = max(worst, float(np.linalg.norm(permute_qubits(psi, perm).amplitudes - psi.amplitudes)))
    return worst


def code_state_dense(weights: Sequence[int], squared_amplitudes: Sequence[float], m: int) -> DenseState:
    """Dense logical state from its Dicke weights and squared amplitudes."""
    return symmetric_state(m, {w: math.sqrt(float(a2)) for w, a2 in zip(weights, squared_amplitudes)})


# --------------------------------------------------------------------------
# recovery and fidelity


@dataclass
class Recovery:
    basis: np.ndarray  # orthonormal code basis as columns
    kraus: list[np.ndarray]  # one per kept operator of the corrected set
    labels: list[str]
    completion: np.ndarray
    dropped: list[str]

    def operators(self, with_completion: bool = True) -> list[np.ndarray]:
        return self.kraus + ([self.completion] if with_completion else [])

    def completeness_deviation(self) -> float:
        n = self.completion.shape[0]
        total = sum(r.conj().T @ r for r in self.operators())
        return float(np.max(np.abs(total - np.eye(n))))


def recovery_map(code_basis: Sequence[DenseState], omega: Sequence[DenseOperator], tol: float = 1e-8) -> Recovery:
    """Truncated recovery built from the polar factors of ``A Pi``.

    For each ``A`` the isometric factor of ``A V`` (``V`` an orthonormal code
    basis) is inverted back onto the code; a completion operator
    ``sqrt(1 - sum R^+ R)`` makes the map trace preserving.
    """
    m = code_basis[0].m
    raw = np.stack([s.amplitudes for s in code_basis], axis=1)
    V, _ = np.linalg.qr(raw)
    images = [op.apply_columns(V) for op in omega]
    for (i, a), (j, b) in itertools.combinations(enumerate(images), 2):
        dev = float(np.max(np.abs(a.conj().T @ b)))
        if dev > tol:
            raise NotCorrectable(f"{omega[i].label} and {omega[j].label} images overlap by {dev:.3e}")
    kraus, labels, dropped = [], [], []
    for op, img in zip(omega, images):
        W, s, Xh = np.linalg.svd(img, full_matrices=False)
        keep = s > SVD_CUTOFF
        if not keep.any():
            warnings.warn(f"{op.label} annihilates the code space; dropped", RankDeficient, stacklevel=2)
            dropped.append(op.label)
            continue
        # R = V X W^+ maps A V back to V sqrt(V^+ A^+ A V)
        kraus.append(V @ Xh[keep].conj().T @ W[:, keep].conj().T)
        labels.append(op.label)
    n = 1 << m
    S = sum(r.conj().T @ r for r in kraus)
    evals, evecs = np.linalg.eigh(np.eye(n) - S)
    completion = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    return Recovery(V, kraus, labels, completion, dropped)


def _check_density(rho: np.ndarray) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise BadDensity("density operator must be square")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise BadDensity(f"trace {np.trace(rho)} != 1")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise BadDensity("not Hermitian")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise BadDensity("not positive semidefinite")


def entanglement_fidelity(rho: np.ndarray, kraus: Iterable[np.ndarray]) -> float:
    """``sum_k |tr(rho E_k)|**2``."""
    rho = np.asarray(rho, dtype=complex)
    _check_density(rho)
    total = 0.0
    for E in kraus:
        if E.shape != rho.shape:
            raise DimensionMismatch(f"Kraus operator {E.shape} vs density {rho.shape}")
        total += abs(np.trace(rho @ E)) ** 2
    return float(total)


def composed_fidelity(rho: np.ndarray, outer: Sequence[np.ndarray], inner: Sequence[DenseOperator]) -> float:
    """Entanglement fidelity of ``outer o inner`` without forming the products.

    Uses ``tr(rho R A) = sum_k p_k <phi_k| R A |phi_k>`` over the spectral
    decomposition of ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_density(rho)
    p, phi = np.linalg.eigh(rho)
    keep = p > 1e-14
    p, phi = p[keep], phi[:, keep]
    total = 0.0
    for A in inner:
        aphi = A.apply_columns(phi)
        for R in outer:
            total += abs(np.sum(p * np.einsum("ik,ik->k", phi.conj(), R @ aphi))) ** 2
    return float(total)


def code_density(basis: np.ndarray, rho_code: np.ndarray) -> np.ndarray:
    """Embed a ``k x k`` density matrix on the code into the full space."""
    return basis @ rho_code @ basis.conj().T


def dense_lambda(basis: np.ndarray, op: DenseOperator) -> float:
    """Smallest eigenvalue of ``V^+ A^+ A V`` (min over normalized code states)."""
    img = op.apply_columns(basis)
    return float(np.min(np.linalg.eigvalsh(img.conj().T @ img)))
