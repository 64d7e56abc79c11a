"""Renyi-2 entropies of excited eigenstates of the periodic harmonic chain.

The ground state is ``psi_0(q) ~ exp(-q^T W q / 2)`` with ``W`` the circulant
matrix of frequencies ``omega_k = sqrt(m^2 + 4 sin^2(pi k / L))``.  Exciting
distinct momenta multiplies ``psi_0`` by the Wick-ordered product of linear
forms ``f_k(q) = sqrt(2 omega_k / L) sum_j exp(2 pi i j k / L) q_j``.

``tr rho_A^2`` is a Gaussian integral over two copies of the subsystem and two
copies of its complement carrying four wavefunction factors.  The polynomial
prefactors are evaluated by Wick's theorem: a hafnian over all ``4 |K|``
insertions, where pairs within one factor carry the replica covariance minus
the single-copy covariance that defines the Wick ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CapExceeded, ModeSet, SpecError
from .entropy import EntropyResult, NumericalError
from .hafnian import hafnian

HARMONIC_CAP = 6


@dataclass(frozen=True)
class HarmonicModel:
    L: int
    m: float

    def __post_init__(self):
        if self.L < 1:
            raise SpecError(f"chain length must be positive, got {self.L}")
        if not self.m > 0:
            raise SpecError(f"mass must be strictly positive, got {self.m}")

    @property
    def omega(self) -> np.ndarray:
        k = np.arange(self.L)
        return np.sqrt(self.m**2 + 4.0 * np.sin(np.pi * k / self.L) ** 2)

    def frequency_matrix(self, power: float = 1.0) -> np.ndarray:
        """Circulant ``W^power`` with ``W = sum_k omega_k |k><k|``."""
        L = self.L
        d = np.arange(L)
        k = np.arange(L)
        kernel = (np.cos(2 * np.pi * np.outer(d, k) / L) @ self.omega**power) / L
        return kernel[(d[:, None] - d[None, :]) % L]

    def covariances(self) -> tuple[np.ndarray, np.ndarray]:
        """Ground-state ``<q_i q_j>`` and ``<p_i p_j>``."""
        return 0.5 * self.frequency_matrix(-1.0), 0.5 * self.frequency_matrix(1.0)


def harmonic_ground_renyi2(model: HarmonicModel, L_A: int) -> EntropyResult:
    """Ground-state Renyi-2 from the reduced position and momentum covariances."""
    L = model.L
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    if L_A in (0, L):
        return EntropyResult(2.0, L, L_A, 0.0, "gaussian_wick", {"symplectic": []})
    X, P = model.covariances()
    XA, PA = X[:L_A, :L_A], P[:L_A, :L_A]
    for name, mat in (("position", XA), ("momentum", PA)):
        if np.linalg.eigvalsh(mat).min() <= 0:
            raise NumericalError(f"reduced {name} covariance is not positive definite")
    nu = np.sqrt(np.clip(np.linalg.eigvals(XA @ PA).real, 0.25, None))
    value = float(np.sum(np.log(2.0 * nu)))
    return EntropyResult(2.0, L, L_A, max(value, 0.0), "gaussian_wick", {"symplectic": nu.tolist()})


@dataclass
class ReplicaMoment:
    """Two-copy Gaussian measure and the linear insertions of the excited factors.

    Integration variables are ``y = (q_A, q_A', q_B, q_B')``.  ``factors[f]``
    maps ``y`` onto the full-chain coordinates of wavefunction factor ``f``;
    factors 0 and 2 are ``psi``, factors 1 and 3 are ``psi*``.
    """

    covariance: np.ndarray
    single_copy: np.ndarray
    factors: list[np.ndarray]
    insertions: list[tuple[int, np.ndarray]]
    log_gaussian_weight: float

    def matching_matrix(self) -> np.ndarray:
        n = len(self.insertions)
        M = np.zeros((n, n), dtype=complex)
        lifted = [self.factors[f].T @ v for f, v in self.insertions]
        for a in range(n):
            fa, va = self.insertions[a]
            for b in range(a + 1, n):
                fb, vb = self.insertions[b]
                w = lifted[a] @ self.covariance @ lifted[b]
                if fa == fb:
                    w -= va @ self.single_copy @ vb
                M[a, b] = M[b, a] = w
        return M


def _mode_vector(L: int, k: int, omega: float, conjugate: bool) -> np.ndarray:
    j = np.arange(1, L + 1)
    phase = np.exp((-2j if conjugate else 2j) * np.pi * j * k / L)
    return np.sqrt(2.0 * omega / L) * phase


def replica_moment(model: HarmonicModel, K: ModeSet, L_A: int) -> ReplicaMoment:
    L = model.L
    L_B = L - L_A
    dim = 2 * L
    blocks = {"A": 0, "A'": L_A, "B": 2 * L_A, "B'": 2 * L_A + L_B}

    def embed(a_key: str, b_key: str) -> np.ndarray:
        E = np.zeros((L, dim))
        E[np.arange(L_A), blocks[a_key] + np.arange(L_A)] = 1.0
        E[L_A + np.arange(L_B), blocks[b_key] + np.arange(L_B)] = 1.0
        return E

    factors = [embed("A", "B"), embed("A'", "B"), embed("A'", "B'"), embed("A", "B'")]
    W = model.frequency_matrix(1.0)
    Q = sum(E.T @ W @ E for E in factors)
    sign_q, logdet_q = np.linalg.slogdet(Q)
    sign_w, logdet_w = np.linalg.slogdet(W)
    if sign_q <= 0 or sign_w <= 0:
        raise NumericalError("replica quadratic form is not positive definite")
    log_z = logdet_w + L * np.log(2.0) - 0.5 * logdet_q
    omega = model.omega
    insertions = []
    for f in range(4):
        for k in K.K:
            insertions.append((f, _mode_vector(L, k, omega[k], conjugate=bool(f % 2))))
    return ReplicaMoment(np.linalg.inv(Q), 0.5 * np.linalg.inv(W), factors, insertions, float(log_z))


def excited_norm(model: HarmonicModel, K: ModeSet) -> complex:
    """``<psi|psi>`` of the Wick-ordered excitation, by the same matching sum."""
    L = model.L
    C = 0.5 * model.frequency_matrix(-1.0)
    omega = model.omega
    vecs = [(0, _mode_vector(L, k, omega[k], False)) for k in K.K]
    vecs += [(1, _mode_vector(L, k, omega[k], True)) for k in K.K]
    n = len(vecs)
    M = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            if vecs[a][0] != vecs[b][0]:
                M[a, b] = M[b, a] = vecs[a][1] @ C @ vecs[b][1]
    return hafnian(M)


def harmonic_excited_renyi2(model: HarmonicModel, K, L_A: int, cap: int = HARMONIC_CAP) -> EntropyResult:
    """Renyi-2 of ``prod_{k in K} a_k^dag |0>`` on the first ``L_A`` sites."""
    L = model.L
    if not isinstance(K, ModeSet):
        K = ModeSet(L, tuple(K))
    if K.L != L:
        raise SpecError(f"mode set built for L={K.L}, model has L={L}")
    if len(K) > cap:
        raise CapExceeded(
            f"{len(K)} excitations exceed the cap of {cap} ({4 * len(K)} Wick insertions)"
        )
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    if L_A in (0, L):
        return EntropyResult(2.0, L, L_A, 0.0, "gaussian_wick", {"norm": 1.0})
    rep = replica_moment(model, K, L_A)
    moment = hafnian(rep.matching_matrix()) if len(K) else 1.0 + 0j
    norm = excited_norm(model, K) if len(K) else 1.0 + 0j
    ratio = moment / norm**2
    diag = {
        "norm": complex(norm),
        "moment": complex(moment),
        "log_gaussian_weight": rep.log_gaussian_weight,
    }
    if ratio.real <= 0 or abs(ratio.imag) > 1e-8 * max(1.0, abs(ratio.real)):
        raise NumericalError(f"replica moment ratio {ratio} is not a positive real number: {diag}")
    value = -(rep.log_gaussian_weight + np.log(ratio.real))
    return EntropyResult(2.0, L, L_A, float(max(value, 0.0)), "gaussian_wick", diag)
