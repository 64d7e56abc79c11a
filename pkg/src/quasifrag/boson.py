"""Free-boson pattern states: exact sector-resolved reduced density matrices.

The state ``prod_{k in K} b_k^dag |0>`` (distinct momenta, one boson each) is
expanded in the site-occupation basis.  Number conservation splits the
reduced density matrix on the first ``L_A`` sites into blocks labelled by the
particle number ``m`` found in the subsystem.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import CapExceeded, ModeSet, SpecError, UnitPattern, cell_coords
from .entropy import EntropyResult, renyi_from_probabilities
from .permanent import permanent_batch

BOSON_CAP = 8
CONFIG_BUDGET = 2_000_000
BRUTE_MAX_L = 8
BRUTE_MAX_N = 4


@dataclass(frozen=True)
class BosonState:
    L: int
    K: ModeSet

    def __post_init__(self):
        if not isinstance(self.K, ModeSet):
            object.__setattr__(self, "K", ModeSet(self.L, tuple(self.K)))
        if self.K.L != self.L:
            raise SpecError(f"mode set built for L={self.K.L}, state has L={self.L}")

    @property
    def N(self) -> int:
        return len(self.K)


@dataclass
class SectorRDM:
    """Reduced density matrix blocks keyed by subsystem particle number."""

    blocks: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def weights(self) -> dict[int, float]:
        return {m: float(np.trace(b).real) for m, b in self.blocks.items()}

    def spectrum(self) -> np.ndarray:
        parts = [np.linalg.eigvalsh(b) for b in self.blocks.values() if b.size]
        return np.concatenate(parts) if parts else np.zeros(0)


def _as_state(state, K=None) -> BosonState:
    if isinstance(state, BosonState):
        return state
    return BosonState(int(state), K)


def _n_configs(sites: int, N: int) -> int:
    return math.comb(sites + N - 1, N) if sites > 0 else int(N == 0)


def _site_lists(sites: int, m: int, start: int = 0) -> np.ndarray:
    """All multisets of ``m`` sites from ``[start, start + sites)``, as sorted rows."""
    rows = list(itertools.combinations_with_replacement(range(start, start + sites), m))
    return np.array(rows, dtype=np.int64).reshape(len(rows), m)


def _factorial_weights(site_lists: np.ndarray) -> np.ndarray:
    """``sqrt(prod n_j!)`` for each row of a sorted site list.

    In a sorted row the ``r``-th repeat of a site contributes a factor ``r``,
    so the running repeat count multiplies up to ``prod n_j!``.
    """
    rows, N = site_lists.shape
    prod = np.ones(rows)
    run = np.ones(rows)
    for i in range(1, N):
        run = np.where(site_lists[:, i] == site_lists[:, i - 1], run + 1, 1.0)
        prod *= run
    return np.sqrt(prod)


def _check_cost(state: BosonState, cap: int, budget: int) -> None:
    N = state.N
    if N > cap:
        raise CapExceeded(f"{N} bosons exceed the cap of {cap} (Ryser cost ~ {2.0**N * N:.3g} per amplitude)")
    total = _n_configs(state.L, N)
    if total > budget:
        raise CapExceeded(f"{total} occupation configurations exceed the budget of {budget}")


@lru_cache(maxsize=4)
def _configuration_amplitudes(state: BosonState, chunk: int = 32768) -> tuple[np.ndarray, np.ndarray]:
    """All sorted site lists of ``N`` bosons on the ring and their amplitudes.

    Amplitudes are ``L^{-N/2} perm(M) / sqrt(prod n_j!)`` with
    ``M[a, b] = exp(2 pi i k_a s_b / L)`` over the occupied site list ``s``.
    """
    L, N = state.L, state.N
    sites = _site_lists(L, N)
    k = np.asarray(state.K.K, dtype=float)
    amps = np.empty(sites.shape[0], dtype=complex)
    for lo in range(0, sites.shape[0], chunk):
        block = sites[lo : lo + chunk]
        # sites are labelled 1..L in the plane waves
        mats = np.exp(2j * np.pi * k[None, :, None] * (block[:, None, :] + 1) / L)
        amps[lo : lo + chunk] = permanent_batch(mats)
    amps *= L ** (-N / 2) / _factorial_weights(sites)
    amps.flags.writeable = False
    return sites, amps


def _group_rows(keys: np.ndarray) -> tuple[int, np.ndarray]:
    if keys.shape[1] == 0:
        return 1, np.zeros(keys.shape[0], dtype=np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    return uniq.shape[0], inverse.ravel()


def _sector_amplitudes(state: BosonState, L_A: int, cap: int, budget: int):
    """Yield ``(m, psi_m)`` with ``psi_m[a, b]`` the amplitude of A-config ``a`` and B-config ``b``.

    Configurations are enumerated in lexicographic order of sorted site lists
    on each side.
    """
    L, N = state.L, state.N
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    _check_cost(state, cap, budget)
    sites, amps = _configuration_amplitudes(state)
    inside = np.count_nonzero(sites < L_A, axis=1)
    for m in range(N + 1):
        rows = np.flatnonzero(inside == m)
        if rows.size == 0:
            continue
        # sorted rows put the subsystem sites first
        na, ia = _group_rows(sites[rows, :m])
        nb, ib = _group_rows(sites[rows, m:])
        psi = np.zeros((na, nb), dtype=complex)
        psi[ia, ib] = amps[rows]
        yield m, psi


def sector_rdm(state, L_A: int, K=None, cap: int = BOSON_CAP, budget: int = CONFIG_BUDGET) -> SectorRDM:
    """Block-diagonal reduced density matrix on sites ``0..L_A-1``."""
    state = _as_state(state, K)
    rdm = SectorRDM()
    for m, psi in _sector_amplitudes(state, L_A, cap, budget):
        rdm.blocks[m] = psi @ psi.conj().T
    return rdm


def boson_spectrum(state, L_A: int, K=None, cap: int = BOSON_CAP) -> tuple[np.ndarray, dict[int, float]]:
    """Full reduced-density-matrix spectrum and the weight of each particle-number sector.

    Each block's spectrum is taken from the squared singular values of its
    amplitude block, which avoids squaring the condition number.
    """
    state = _as_state(state, K)
    spectrum, weights = [], {}
    for m, psi in _sector_amplitudes(state, L_A, cap, CONFIG_BUDGET):
        s2 = np.linalg.svd(psi, compute_uv=False) ** 2
        spectrum.append(s2)
        weights[m] = float(s2.sum())
    return (np.concatenate(spectrum) if spectrum else np.ones(1)), weights


def boson_sector_entropy(state, L_A: int, n: float, K=None, cap: int = BOSON_CAP) -> EntropyResult:
    state = _as_state(state, K)
    probs, weights = boson_spectrum(state, L_A, cap=cap)
    # the whole ring is in a pure state
    value = 0.0 if L_A in (0, state.L) else renyi_from_probabilities(probs, n)
    return EntropyResult(
        float(n), state.L, L_A, value, "boson_sector", {"sectors": weights, "trace": float(probs.sum())}
    )


# -- independent first-quantised oracle -------------------------------------


def symmetric_wavefunction(state: BosonState) -> np.ndarray:
    """Rank-``N`` symmetric tensor ``psi[j_1, ..., j_N]`` summed over permutations."""
    L, N = state.L, state.N
    sites = np.arange(1, L + 1)
    orbitals = [np.exp(2j * np.pi * k * sites / L) / math.sqrt(L) for k in state.K.K]
    psi = np.zeros((L,) * N, dtype=complex)
    for perm in itertools.permutations(range(N)):
        term = np.array(1.0 + 0j)
        for a in perm:
            term = np.multiply.outer(term, orbitals[a])
        psi += term
    return psi / math.sqrt(math.factorial(N))


def brute_force_boson_spectrum(state, L_A: int, K=None) -> np.ndarray:
    """Reduced-density-matrix spectrum without permanents.

    The symmetric tensor is read off into occupation amplitudes
    ``sqrt(N! / prod n_j!) psi[j_1..j_N]`` and the complement is traced out
    by an explicit sum over its occupation configurations.
    """
    state = _as_state(state, K)
    L, N = state.L, state.N
    if L > BRUTE_MAX_L or N > BRUTE_MAX_N:
        raise CapExceeded(f"brute-force oracle limited to L <= {BRUTE_MAX_L}, N <= {BRUTE_MAX_N}")
    if not 0 <= L_A <= L:
        raise SpecError(f"subsystem size {L_A} not inside [0, {L}]")
    psi = symmetric_wavefunction(state)
    a_index: dict[tuple, int] = {}
    b_index: dict[tuple, int] = {}
    entries = []
    for seq in itertools.combinations_with_replacement(range(L), N):
        ca = tuple(s for s in seq if s < L_A)
        cb = tuple(s for s in seq if s >= L_A)
        counts = [seq.count(s) for s in set(seq)]
        amp = math.sqrt(math.factorial(N) / math.prod(math.factorial(c) for c in counts)) * psi[seq]
        entries.append((a_index.setdefault(ca, len(a_index)), b_index.setdefault(cb, len(b_index)), amp))
    amp = np.zeros((len(a_index), len(b_index)), dtype=complex)
    for i, j, v in entries:
        amp[i, j] = v
    rho = np.zeros((len(a_index), len(a_index)), dtype=complex)
    for j in range(len(b_index)):
        rho += np.outer(amp[:, j], amp[:, j].conj())
    return np.clip(np.linalg.eigvalsh(rho), 0.0, None)


def brute_force_boson_entropy(state, L_A: int, n: float, K=None) -> EntropyResult:
    state = _as_state(state, K)
    probs = brute_force_boson_spectrum(state, L_A)
    value = renyi_from_probabilities(probs, n)
    return EntropyResult(float(n), state.L, L_A, value, "boson_sector", {"oracle": "first_quantized"})


def sector_probabilities_first_quantized(state, L_A: int, K=None) -> dict[int, float]:
    """Probability of finding ``m`` bosons in the subsystem, from ``|psi[j_1..j_N]|^2``."""
    state = _as_state(state, K)
    psi = symmetric_wavefunction(state)
    N = state.N
    weight = np.abs(psi) ** 2
    inside = (np.arange(state.L) < L_A).astype(int)
    count = np.zeros((state.L,) * N, dtype=int)
    for axis in range(N):
        shape = [1] * N
        shape[axis] = state.L
        count = count + inside.reshape(shape)
    return {m: float(weight[count == m].sum()) for m in range(N + 1)}


# -- per-pattern bosonic contributions --------------------------------------


def boson_entropy(L: int, L_A: int, K, n: float) -> float:
    return boson_sector_entropy(BosonState(L, ModeSet(L, tuple(K))), L_A, n).value


def naive_prediction(pattern: UnitPattern, n: float, x) -> float:
    """Fermion-style interpolation of single-cell bosonic entropies."""
    cc = cell_coords(pattern.l, x)
    y = float(cc.y)
    lo = boson_entropy(pattern.l, cc.alpha, pattern.kappa, n)
    if y == 0.0:
        return lo
    hi = boson_entropy(pattern.l, cc.alpha + 1, pattern.kappa, n)
    return y * hi + (1.0 - y) * lo


@dataclass
class PatternSequence:
    pattern: UnitPattern
    n: float
    x: Fraction | float
    p: list[int]
    values: list[float]
    extrapolated: float | None
    last: float | None
    monotone: bool
    partial: bool
    skipped: list[int]


def per_pattern_s_boson(pattern: UnitPattern, n: float, x, p_list, cap: int = BOSON_CAP) -> PatternSequence:
    """``S(p l, x p l, p kappa) / p`` along ``p_list`` plus a linear-in-``1/p`` extrapolation.

    Members whose subsystem size ``x p l`` is not an integer, or which exceed
    the boson caps, are skipped and the record is flagged partial.
    """
    xf = Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**6)
    ps, vals, skipped = [], [], []
    for p in sorted(p_list):
        L = p * pattern.l
        L_A = xf * L
        N = p * pattern.size
        if L_A.denominator != 1 or N > cap or _n_configs(L, N) > CONFIG_BUDGET:
            skipped.append(p)
            continue
        K = [a * pattern.l + k for a in range(p) for k in pattern.kappa]
        vals.append(boson_entropy(L, int(L_A), K, n) / p)
        ps.append(p)
    extrap = None
    if len(ps) >= 2:
        p1, p2 = ps[-2], ps[-1]
        s1, s2 = vals[-2], vals[-1]
        extrap = (p2 * s2 - p1 * s1) / (p2 - p1)
    diffs = np.diff(vals)
    monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
    return PatternSequence(
        pattern, float(n), xf, ps, vals, extrap, vals[-1] if vals else None, monotone, bool(skipped), skipped
    )
