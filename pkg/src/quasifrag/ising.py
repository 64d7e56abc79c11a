"""Excited eigenstates of the periodic transverse-field Ising chain.

``H = -1/2 sum_j (sx_j sx_{j+1} + h sz_j)`` with ``sx_{L+1} = sx_1``.

Jordan-Wigner with ``sz_j = 1 - 2 c_j^dag c_j`` maps ``H`` restricted to
fermion parity ``P`` onto a quadratic chain whose boundary hopping carries an
extra ``-P``: the even sector is antiperiodic (half-integer momenta), the odd
sector periodic (integer momenta).  Within a sector, every momentum ``k``
couples only ``c_k`` and ``c_{-k}^dag``; each 2x2 block is diagonalised
numerically, which fixes the quasiparticle ``eta_k`` by its momentum label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .core import CapExceeded, OccupancySpec, SpecError, expand
from .entropy import EntropyResult, NumericalError, binary_entropy_sum, clip_unit_interval, schmidt_entropy

EVEN = "even"
ODD = "odd"
ED_MAX_L = 12
MAJORANA_TOL = 1e-8
ENERGY_TOL = 1e-8


@dataclass(frozen=True)
class IsingModel:
    L: int
    h: float

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise SpecError(f"chain length must be even and >= 2, got {self.L}")
        if self.h < 0:
            raise SpecError(f"transverse field must be non-negative, got {self.h}")


@dataclass(frozen=True)
class IsingExcitation:
    """Occupied quasiparticle modes, given as grid indices ``m`` of the sector.

    Even sector momenta are ``2 pi (m + 1/2) / L``, odd sector ``2 pi m / L``,
    for ``m`` in ``[0, L)``.
    """

    sector: str
    occupied: tuple[int, ...] = ()

    def __post_init__(self):
        if self.sector not in (EVEN, ODD):
            raise SpecError(f"sector must be {EVEN!r} or {ODD!r}, got {self.sector!r}")
        occ = tuple(sorted(int(m) for m in self.occupied))
        if len(set(occ)) != len(occ):
            raise SpecError(f"repeated mode in {list(occ)}")
        object.__setattr__(self, "occupied", occ)

    @classmethod
    def ground(cls) -> IsingExcitation:
        return cls(EVEN, ())

    def momenta(self, L: int) -> np.ndarray:
        return sector_momenta(L, self.sector)[list(self.occupied)]


def sector_momenta(L: int, sector: str) -> np.ndarray:
    shift = 0.5 if sector == EVEN else 0.0
    return 2 * np.pi * (np.arange(L) + shift) / L


def _bdg_matrix(model: IsingModel, sector: str) -> np.ndarray:
    """``H_BdG`` with ``H = Psi^dag H_BdG Psi / 2``, ``Psi = (c_1..c_L, c_1^dag..c_L^dag)``."""
    L, h = model.L, model.h
    A = np.zeros((L, L))
    B = np.zeros((L, L))
    np.fill_diagonal(A, h)
    boundary = -1.0 if sector == EVEN else 1.0  # c_{L+1} = boundary * c_1
    for j in range(L):
        nxt = (j + 1) % L
        s = boundary if j == L - 1 else 1.0
        A[j, nxt] += -0.5 * s
        A[nxt, j] += -0.5 * s
        B[j, nxt] += -0.5 * s
        B[nxt, j] += 0.5 * s
    return np.block([[A, B], [-B, -A]])


@dataclass(frozen=True)
class SectorModes:
    momenta: np.ndarray
    energies: np.ndarray
    annihilators: np.ndarray  # row q: eta_q = annihilators[q] @ Psi
    vacuum_parity: int
    bdg: np.ndarray


@lru_cache(maxsize=64)
def sector_modes(model: IsingModel, sector: str) -> SectorModes:
    L = model.L
    H = _bdg_matrix(model, sector)
    ks = sector_momenta(L, sector)
    sites = np.arange(1, L + 1)
    F = np.exp(-1j * np.outer(ks, sites)) / math.sqrt(L)  # c_k = F @ c
    U = scipy.linalg.block_diag(F, F.conj())
    HF = U @ H @ U.conj().T
    partner = [int(np.argmin(np.abs(np.exp(1j * (ks + k)) - 1))) for k in ks]
    rows = np.zeros((L, 2 * L), dtype=complex)
    energies = np.zeros(L)
    covered = np.zeros((2 * L, 2 * L), dtype=bool)
    vacuum_parity = 1
    for q in range(L):
        idx = [q, L + partner[q]]
        covered[np.ix_(idx, idx)] = True
        r = np.zeros(2 * L, dtype=complex)
        if partner[q] == q:
            # k = 0 or pi: no pairing, eta is c_k or c_k^dag by the sign of the level
            level = HF[q, q].real
            if level >= -1e-12:
                r[q] = 1.0
                energies[q] = max(level, 0.0)
            else:
                r[L + q] = 1.0
                energies[q] = -level
                vacuum_parity = -vacuum_parity
        else:
            vals, vecs = np.linalg.eigh(HF[np.ix_(idx, idx)])
            energies[q] = vals[1]
            r[idx] = vecs[:, 1].conj()
        rows[q] = r @ U
    leak = np.max(np.abs(HF[~covered])) if np.any(~covered) else 0.0
    if leak > 1e-10:
        raise NumericalError(f"momentum blocks of the {sector} sector leak by {leak:.3g}")
    return SectorModes(ks, energies, rows, vacuum_parity, H)


def _swap(L: int) -> np.ndarray:
    S = np.zeros((2 * L, 2 * L))
    S[:L, L:] = np.eye(L)
    S[L:, :L] = np.eye(L)
    return S


def state_correlation(model: IsingModel, exc: IsingExcitation) -> np.ndarray:
    """``G[a, b] = <Psi_a Psi_b^dag>`` of the Gaussian eigenstate."""
    L = model.L
    modes = sector_modes(model, exc.sector)
    S = _swap(L)
    occupied = set(exc.occupied)
    rows = []
    for q in range(L):
        r = modes.annihilators[q]
        rows.append(r.conj() @ S if q in occupied else r)
    Wd = np.array(rows)
    return Wd.conj().T @ Wd


def majorana_correlation(G: np.ndarray) -> np.ndarray:
    """Real antisymmetric ``Gamma`` with ``<m_a m_b> = delta_ab + i Gamma_ab``.

    Majoranas are ordered ``m_{2j} = c_j + c_j^dag``, ``m_{2j+1} = i (c_j^dag - c_j)``.
    """
    L = G.shape[0] // 2
    T = np.zeros((2 * L, 2 * L), dtype=complex)
    for j in range(L):
        T[2 * j, j] = 1.0
        T[2 * j, L + j] = 1.0
        T[2 * j + 1, j] = -1j
        T[2 * j + 1, L + j] = 1j
    M = T @ G @ _swap(L) @ T.T
    gamma = -1j * (M - np.eye(2 * L))
    if np.max(np.abs(gamma.imag)) > 1e-9:
        raise NumericalError("Majorana correlation matrix is not real")
    return gamma.real


def state_parity(model: IsingModel, exc: IsingExcitation) -> int:
    """Fermion parity ``(-1)^N`` of the Gaussian eigenstate."""
    modes = sector_modes(model, exc.sector)
    return modes.vacuum_parity * (-1) ** len(exc.occupied)


def is_physical(model: IsingModel, exc: IsingExcitation) -> bool:
    """Whether the state's fermion parity matches the sector it was built in."""
    return state_parity(model, exc) == (1 if exc.sector == EVEN else -1)


def excitation_energy(model: IsingModel, exc: IsingExcitation) -> float:
    modes = sector_modes(model, exc.sector)
    n = np.zeros(model.L)
    n[list(exc.occupied)] = 1.0
    return float(np.sum(modes.energies * (n - 0.5)))


def excitation_momentum(model: IsingModel, exc: IsingExcitation) -> float:
    return float(np.mod(np.sum(exc.momenta(model.L)), 2 * np.pi))


def ising_correlation_entropy(model: IsingModel, exc: IsingExcitation, L_A: int, n: float) -> EntropyResult:
    """Entropy of an excited eigenstate from the Majorana correlations of the first ``L_A`` sites."""
    L = model.L
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    if L_A in (0, L):
        return EntropyResult(float(n), L, L_A, 0.0, "correlation", {"sector": exc.sector, "h": model.h})
    gamma = majorana_correlation(state_correlation(model, exc))
    sub = gamma[: 2 * L_A, : 2 * L_A]
    ev = np.linalg.eigvalsh(1j * sub) if L_A else np.zeros(0)
    if ev.size and np.max(np.abs(ev)) > 1 + MAJORANA_TOL:
        raise NumericalError(f"Majorana spectrum outside [-1, 1]: max |nu| = {np.max(np.abs(ev))}")
    nu = np.clip(np.sort(ev)[L_A:], 0.0, 1.0)  # the non-negative member of each +-nu pair
    occ, _ = clip_unit_interval((1.0 + nu) / 2.0, what="Majorana occupation")
    value = binary_entropy_sum(occ, n)
    return EntropyResult(float(n), L, L_A, value, "correlation", {"sector": exc.sector, "h": model.h})


# -- exact diagonalisation oracle ------------------------------------------


def spin_hamiltonian(model: IsingModel) -> np.ndarray:
    """Dense ``2^L`` Hamiltonian; site 1 is the most significant bit, bit 0 is spin up."""
    L, h = model.L, model.h
    dim = 2**L
    idx = np.arange(dim)
    bits = (idx[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    sz = 1 - 2 * bits
    H = np.zeros((dim, dim))
    H[idx, idx] = -0.5 * h * sz.sum(axis=1)
    for j in range(L):
        flip = (1 << (L - 1 - j)) | (1 << (L - 1 - (j + 1) % L))
        H[idx ^ flip, idx] += -0.5
    return H


def translation_operator(L: int) -> np.ndarray:
    """Permutation ``T`` moving the spin on site ``j`` to site ``j + 1``."""
    dim = 2**L
    idx = np.arange(dim)
    rotated = (idx >> 1) | ((idx & 1) << (L - 1))
    T = np.zeros((dim, dim))
    T[rotated, idx] = 1.0
    return T


def parity_diagonal(L: int) -> np.ndarray:
    idx = np.arange(2**L)
    return 1 - 2 * (np.bitwise_count(idx).astype(np.int64) & 1)


@lru_cache(maxsize=8)
def _spectrum(model: IsingModel):
    return np.linalg.eigh(spin_hamiltonian(model))


class AmbiguousEigenstate(RuntimeError):
    pass


def ed_eigenstate(model: IsingModel, exc: IsingExcitation, cap: int = ED_MAX_L) -> np.ndarray:
    """Pick the spin eigenvector matching the excitation's energy, parity and momentum."""
    L = model.L
    if L > cap:
        raise CapExceeded(f"exact diagonalisation refuses L={L} > {cap} (dense 2^L = {2**L} matrix)")
    target_e = excitation_energy(model, exc)
    target_p = 1 if exc.sector == EVEN else -1
    energies, vecs = _spectrum(model)
    sel = np.flatnonzero(np.abs(energies - target_e) < ENERGY_TOL)
    if sel.size == 0:
        raise AmbiguousEigenstate(f"no eigenvalue within {ENERGY_TOL} of {target_e}")
    V = vecs[:, sel]
    # parity first (diagonal), then translation inside the fixed-parity subspace
    par = parity_diagonal(L)
    pv, pw = np.linalg.eigh(V.T @ (par[:, None] * V))
    V = V @ pw[:, np.abs(pv - target_p) < 1e-6]
    if V.shape[1] == 0:
        raise AmbiguousEigenstate(f"no eigenvector of parity {target_p} at energy {target_e}")
    T = translation_operator(L)
    tv, tz = scipy.linalg.schur(V.conj().T @ T @ V, output="complex")
    phases = np.diag(tv)
    target_phase = np.exp(-1j * excitation_momentum(model, exc))
    match = np.flatnonzero(np.abs(phases - target_phase) < 1e-6)
    if match.size != 1:
        raise AmbiguousEigenstate(
            f"{match.size} candidates at energy {target_e:.10f}, parity {target_p}; "
            f"translation phases {np.round(np.angle(phases), 6).tolist()}"
        )
    psi = V @ tz[:, match[0]]
    return psi / np.linalg.norm(psi)


def ed_oracle_entropy(model: IsingModel, exc: IsingExcitation, L_A: int, n: float) -> EntropyResult:
    L = model.L
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    psi = ed_eigenstate(model, exc)
    value = schmidt_entropy(psi, 2**L_A, n)
    return EntropyResult(float(n), L, L_A, value, "ed_oracle", {"sector": exc.sector, "h": model.h})


# -- pattern states and the verification catalog ---------------------------


def physical_excitation(model: IsingModel, sector: str, occupied) -> IsingExcitation:
    """An excitation of ``sector``, rejected when its parity is absent from that sector."""
    exc = IsingExcitation(sector, tuple(occupied))
    if any(not 0 <= m < model.L for m in exc.occupied):
        raise SpecError(f"mode labels {list(exc.occupied)} not inside [0, {model.L})")
    if not is_physical(model, exc):
        raise SpecError(
            f"{len(exc.occupied)} quasiparticles in the {sector} sector give fermion parity "
            f"{state_parity(model, exc):+d}, which the sector does not contain"
        )
    return exc


def pattern_excitation(model: IsingModel, spec: OccupancySpec, sector: str = EVEN) -> IsingExcitation:
    """Lay the expanded pattern onto the sorted momentum grid of ``sector``."""
    if spec.L != model.L:
        raise SpecError(f"occupancy built for L={spec.L}, model has L={model.L}")
    return physical_excitation(model, sector, expand(spec).K)


def degenerate_partners(model: IsingModel, exc: IsingExcitation, tol: float = ENERGY_TOL) -> int:
    """Number of physical states of the sector sharing the energy and momentum of ``exc``.

    All ``2^L`` occupation sets are enumerated; a count of one means energy,
    parity and translation eigenvalue identify the state uniquely.
    """
    L = model.L
    modes = sector_modes(model, exc.sector)
    occ = ((np.arange(2**L)[:, None] >> np.arange(L)[None, :]) & 1).astype(float)
    energies = occ @ modes.energies - 0.5 * modes.energies.sum()
    phases = np.exp(1j * (occ @ modes.momenta))
    parity = modes.vacuum_parity * (1 - 2 * (occ.sum(axis=1).astype(int) % 2))
    want = 1 if exc.sector == EVEN else -1
    same = (
        (np.abs(energies - excitation_energy(model, exc)) < tol)
        & (np.abs(phases - np.exp(1j * excitation_momentum(model, exc))) < 1e-8)
        & (parity == want)
    )
    return int(np.count_nonzero(same))


def _catalog_candidates(L: int) -> list[tuple[str, IsingExcitation]]:
    return [
        ("ground", IsingExcitation(EVEN, ())),
        ("pair_opposite", IsingExcitation(EVEN, (0, L - 1))),
        ("pair_adjacent", IsingExcitation(EVEN, (0, 1))),
        ("l2_full_even", IsingExcitation(EVEN, tuple(range(0, L, 2)))),
        ("l2_half_even", IsingExcitation(EVEN, tuple(range(0, L // 2, 2)))),
        ("l3_partial_even", IsingExcitation(EVEN, (0, 1, 3, 4))),
        ("single_odd_0", IsingExcitation(ODD, (0,))),
        ("single_odd_1", IsingExcitation(ODD, (1,))),
        ("pair_odd", IsingExcitation(ODD, (1, 2))),
        ("l2_full_odd", IsingExcitation(ODD, tuple(range(0, L, 2)))),
    ]


def excitation_catalog(model: IsingModel) -> list[tuple[str, IsingExcitation]]:
    """Fixed candidate list filtered to physical states that ED can single out."""
    return [
        (name, exc)
        for name, exc in _catalog_candidates(model.L)
        if is_physical(model, exc) and degenerate_partners(model, exc) == 1
    ]
