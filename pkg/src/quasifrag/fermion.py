"""Free-fermion pattern states: correlation-matrix entropies and predictions.

A state ``|K>`` is ``prod_{k in K} b_k^dag |0>`` with
``b_k^dag = L^{-1/2} sum_j exp(2 pi i j k / L) a_j^dag``.  The subsystem is
always the first ``L_A`` sites of the ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .core import CapExceeded, ModeSet, OccupancySpec, SpecError, UnitPattern, cell_coords, expand, repetition_ratios
from .entropy import EntropyResult, binary_entropy_sum, clip_unit_interval, renyi_from_probabilities

FOCK_CAP = 14


def _modes(L: int, K) -> np.ndarray:
    if isinstance(K, ModeSet):
        if K.L != L:
            raise SpecError(f"mode set built for L={K.L}, used with L={L}")
        return np.asarray(K.K, dtype=float)
    return np.asarray(ModeSet(L, tuple(K)).K, dtype=float)


def correlation_value(L: int, j: int, K) -> complex:
    """Two-point function ``<a_1^dag a_{1+j}>`` of the state ``|K>``."""
    k = _modes(L, K)
    return complex(np.sum(np.exp(2j * np.pi * j * k / L)) / L)


def correlation_matrix(L: int, L_A: int, K) -> np.ndarray:
    """Hermitian Toeplitz matrix ``C[j1, j2] = h(j2 - j1)`` on the first ``L_A`` sites."""
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    k = _modes(L, K)
    j = np.arange(L_A)
    h = np.exp(2j * np.pi * np.outer(j, k) / L).sum(axis=1) / L
    # toeplitz(c, r): first column holds h(-j) = conj(h(j)), first row h(j)
    return toeplitz(np.conj(h), h)


def entropy_from_correlation(C: np.ndarray, n: float, L: int | None = None) -> EntropyResult:
    C = np.asarray(C)
    L_A = C.shape[0]
    if L_A == 0 or L_A == L:
        # the whole ring is in a pure state
        return EntropyResult(float(n), L if L is not None else 0, L_A, 0.0, "correlation", {"clipped": 0})
    nu = np.linalg.eigvalsh(C)
    nu, clipped = clip_unit_interval(nu, what="correlation-matrix eigenvalue")
    value = binary_entropy_sum(nu, n)
    return EntropyResult(
        float(n), L if L is not None else -1, L_A, value, "correlation", {"clipped": clipped}
    )


def fermion_entropy(L: int, L_A: int, K, n: float) -> float:
    """Entropy of ``|K>`` on ``L_A`` contiguous sites via the correlation matrix."""
    return entropy_from_correlation(correlation_matrix(L, L_A, K), n, L).value


def single_mode_entropy(l: int, l_A: int, n: float) -> float:
    """Closed-form entropy of a single excitation in a ring of ``l`` sites."""
    if not 0 <= l_A <= l:
        raise SpecError(f"subsystem size {l_A} not inside [0, {l}]")
    r = l_A / l
    return binary_entropy_sum([r], n)


# -- brute-force Fock-space oracle ------------------------------------------


def _apply_creation(psi: np.ndarray, site: int, L: int) -> np.ndarray:
    """Apply ``a_site^dag`` (site 0 is the most significant bit) with Jordan-Wigner sign."""
    idx = np.arange(psi.size, dtype=np.int64)
    bit = 1 << (L - 1 - site)
    empty = (idx & bit) == 0
    # occupied sites before ``site`` are exactly the higher bits
    parity = np.bitwise_count(idx >> (L - site)) & 1
    src = idx[empty]
    out = np.zeros_like(psi)
    out[src | bit] = np.where(parity[empty] == 1, -1.0, 1.0) * psi[empty]
    return out


def fock_state(L: int, K) -> np.ndarray:
    """The ``2^L`` amplitude vector of ``|K>`` built by ordered mode application."""
    k = _modes(L, K)
    psi = np.zeros(2**L, dtype=complex)
    psi[0] = 1.0
    sites = np.arange(1, L + 1)
    for km in k:  # increasing momentum
        phases = np.exp(2j * np.pi * sites * km / L) / math.sqrt(L)
        new = np.zeros_like(psi)
        for s in range(L):
            new += phases[s] * _apply_creation(psi, s, L)
        psi = new
    return psi


def fock_reduced_spectrum(psi: np.ndarray, L: int, L_A: int) -> np.ndarray:
    """Eigenvalues of ``rho_A = tr_B |psi><psi|`` for the first ``L_A`` sites.

    When ``A`` is the larger side the complement's reduced matrix is
    diagonalised instead; a pure state gives both the same nonzero spectrum.
    """
    m = np.asarray(psi).reshape(2**L_A, 2 ** (L - L_A))
    rho = m @ m.conj().T if 2 * L_A <= L else m.T @ m.conj()
    return np.clip(np.linalg.eigvalsh(rho), 0.0, None)


def fock_oracle_entropy(L: int, L_A: int, K, n: float, cap: int = FOCK_CAP) -> EntropyResult:
    """Ground-truth entropy by explicit partial trace in the ``2^L`` site basis."""
    if L > cap:
        raise CapExceeded(f"Fock oracle refuses L={L} > cap {cap} (cost ~4^L = {4.0**L:.3g})")
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    psi = fock_state(L, K)
    value = renyi_from_probabilities(fock_reduced_spectrum(psi, L, L_A), n)
    return EntropyResult(float(n), L, L_A, value, "fock_oracle", {"norm": float(np.vdot(psi, psi).real)})


# -- per-pattern function and fragmentation identities ----------------------


def cell_entropy(pattern: UnitPattern, l_A: int, n: float) -> float:
    """``S_{l, l_A, kappa}`` for a single cell."""
    return fermion_entropy(pattern.l, l_A, pattern.kappa, n)


def per_pattern_s(pattern: UnitPattern, n: float, x) -> float:
    """Entropy contributed by one copy of ``pattern`` at subsystem fraction ``x``.

    Linear interpolation between the cell entropies at ``alpha`` and
    ``alpha + 1`` sites, where ``alpha = floor(l x)``.
    """
    cc = cell_coords(pattern.l, x)
    y = float(cc.y)
    lo = cell_entropy(pattern, cc.alpha, n)
    if y == 0.0:
        return lo
    hi = cell_entropy(pattern, cc.alpha + 1, n)
    return y * hi + (1.0 - y) * lo


def _decompose(pattern: UnitPattern, p: int, L_A: int) -> tuple[int, int]:
    if p < 1:
        raise SpecError(f"repetitions must be positive, got {p}")
    if not 0 <= L_A <= p * pattern.l:
        raise SpecError(f"subsystem size {L_A} not inside [0, {p * pattern.l}]")
    alpha, a = divmod(L_A, p)
    if alpha == pattern.l:  # L_A == L: all p copies see the full cell
        alpha, a = pattern.l - 1, p
    return alpha, a


def full_occupancy_entropy_exact(pattern: UnitPattern, p: int, L_A: int, n: float) -> float:
    """Exact entropy of the fully occupied state from single-cell entropies."""
    alpha, a = _decompose(pattern, p, L_A)
    hi = cell_entropy(pattern, alpha + 1, n) if a else 0.0
    lo = cell_entropy(pattern, alpha, n) if a < p else 0.0
    return a * hi + (p - a) * lo


@dataclass(frozen=True)
class BlockReport:
    distance: float
    passed: bool
    alpha: int
    a: int
    eigenvalues: np.ndarray
    reference: np.ndarray


def verify_block_decomposition(pattern: UnitPattern, p: int, L_A: int, tol: float = 1e-10) -> BlockReport:
    """Compare the correlation spectrum of ``p`` copies with the direct-sum prediction."""
    alpha, a = _decompose(pattern, p, L_A)
    full = np.sort(np.linalg.eigvalsh(correlation_matrix(p * pattern.l, L_A, _expand_full(pattern, p))))
    parts = []
    if a:
        parts += [np.linalg.eigvalsh(correlation_matrix(pattern.l, alpha + 1, pattern.kappa))] * a
    if a < p:
        parts += [np.linalg.eigvalsh(correlation_matrix(pattern.l, alpha, pattern.kappa))] * (p - a)
    ref = np.sort(np.concatenate(parts)) if parts else np.zeros(0)
    if ref.size != full.size:
        dist = math.inf
    else:
        dist = float(np.max(np.abs(full - ref))) if full.size else 0.0
    return BlockReport(dist, dist < tol, alpha, a, full, ref)


def _expand_full(pattern: UnitPattern, p: int) -> ModeSet:
    l = pattern.l
    return ModeSet(p * l, tuple(a * l + k for a in range(p) for k in pattern.kappa))


# -- scaling-limit predictions ---------------------------------------------


def predict_partial_density(pattern: UnitPattern, z, n: float, x) -> float:
    """Predicted ``S / L`` for ``p = z L`` repetitions of ``pattern``."""
    zf = float(z)
    if zf < 0 or zf > 1.0 / pattern.l + 1e-15:
        raise SpecError(f"repetition ratio {z} not inside [0, 1/{pattern.l}]")
    if zf == 0.0:
        return 0.0
    return zf * per_pattern_s(pattern, n, x)


def predict_mixed_density(spec: OccupancySpec, n: float, x) -> float:
    """Predicted ``S / L`` as a sum of independent per-pattern contributions."""
    total = 0.0
    for z, block in zip(repetition_ratios(spec), spec.blocks):
        total += float(z) * per_pattern_s(block.pattern, n, x)
    return total


def predict_xxz(l: int, n: float, x) -> float:
    """Per-repetition entropy for an XXZ magnon pattern ``{0}`` of Bethe-number cell ``l``.

    At anisotropy 2 the cell maps onto a fermionic cell of length ``l - 1``.
    """
    if l < 2:
        raise SpecError(f"XXZ cell length must be at least 2, got {l}")
    return per_pattern_s(UnitPattern(l - 1, (0,)), n, x)


def entropy_density(spec: OccupancySpec, L_A: int, n: float) -> float:
    """Finite-size ``S / L`` for the expanded spec."""
    return fermion_entropy(spec.L, L_A, expand(spec), n) / spec.L
