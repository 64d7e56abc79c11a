"""Cross-checks of every primary engine against its independent oracle.

Each suite returns a :class:`~quasifrag.output.Table` whose ``max_abs_err``
column holds the largest disagreement in that row's group; the suite passes
when every entry is below the model's tolerance.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .boson import BRUTE_MAX_L, BRUTE_MAX_N, BosonState, boson_sector_entropy, brute_force_boson_spectrum
from .core import CapExceeded, ModeSet
from .entropy import renyi_from_probabilities
from .experiments import DEFAULT_CAPS, Caps
from .fermion import correlation_matrix, entropy_from_correlation, fock_reduced_spectrum, fock_state, single_mode_entropy
from .hafnian import hafnian, hafnian_power_trace
from .harmonic import HarmonicModel, harmonic_excited_renyi2, harmonic_ground_renyi2, replica_moment
from .ising import IsingModel, ed_oracle_entropy, excitation_catalog, ising_correlation_entropy
from .output import Table

TOLERANCES = {"fermion": 1e-8, "ising": 1e-7, "boson": 1e-9, "harmonic": 1e-10}

ORACLE_COLUMNS = ["model", "method", "n", "L", "L_A", "x", "h", "state", "states", "max_abs_err"]


def _table() -> Table:
    return Table(
        list(ORACLE_COLUMNS),
        key_columns=["model", "method", "h", "state", "n", "L", "L_A"],
        error_column="max_abs_err",
        xlabel="x",
        ylabel="max |primary - oracle|",
    )


def fermion_suite(max_L: int = 10, ns=(1.0, 2.0), caps: Caps = DEFAULT_CAPS) -> Table:
    """Correlation matrix against the Fock-space partial trace for every mode set."""
    if max_L > caps.fock_L:
        raise CapExceeded(f"Fock oracle refuses L={max_L} > cap {caps.fock_L} (cost ~4^L = {4.0**max_L:.3g})")
    table = _table()
    for L in range(1, max_L + 1):
        worst = {(L_A, n): 0.0 for L_A in range(L + 1) for n in ns}
        for mask in range(2**L):
            K = ModeSet(L, tuple(k for k in range(L) if mask >> k & 1))
            psi = fock_state(L, K)
            for L_A in range(L + 1):
                spectrum = fock_reduced_spectrum(psi, L, L_A)
                C = correlation_matrix(L, L_A, K)
                for n in ns:
                    err = abs(renyi_from_probabilities(spectrum, n) - entropy_from_correlation(C, n, L).value)
                    worst[L_A, n] = max(worst[L_A, n], err)
        for (L_A, n), err in worst.items():
            table.add(model="fermion", method="fock_oracle", n=float(n), L=L, L_A=L_A, x=Fraction(L_A, L),
                      state="all mode sets", states=2**L, max_abs_err=err)
    table.sort()
    return table


def ising_suite(Ls=(8, 10, 12), hs=(0.5, 1.0, 2.0), ns=(1.0, 2.0), caps: Caps = DEFAULT_CAPS) -> Table:
    """Majorana correlations against dense exact diagonalisation over the excitation catalog."""
    table = _table()
    for L in Ls:
        if L > caps.ed_L:
            raise CapExceeded(f"exact diagonalisation refuses L={L} > {caps.ed_L} (dense 2^L = {2**L} matrix)")
        for h in hs:
            model = IsingModel(L, h)
            for name, exc in excitation_catalog(model):
                for L_A in range(L + 1):
                    for n in ns:
                        a = ising_correlation_entropy(model, exc, L_A, n).value
                        b = ed_oracle_entropy(model, exc, L_A, n).value
                        table.add(model="ising", method="ed_oracle", n=float(n), L=L, L_A=L_A,
                                  x=Fraction(L_A, L), h=float(h), state=f"{exc.sector}:{name}",
                                  states=1, max_abs_err=abs(a - b))
    table.sort()
    return table


def boson_suite(max_L: int = BRUTE_MAX_L, max_N: int = BRUTE_MAX_N, ns=(1.0, 2.0, 3.0),
                caps: Caps = DEFAULT_CAPS) -> Table:
    """Sector construction against the first-quantised oracle, plus the single-particle closed form."""
    if max_L > BRUTE_MAX_L or max_N > BRUTE_MAX_N:
        raise CapExceeded(f"brute-force oracle limited to L <= {BRUTE_MAX_L}, N <= {BRUTE_MAX_N}")
    table = _table()
    for L in range(1, max_L + 1):
        for N in range(0, min(max_N, L) + 1):
            worst = {(L_A, n): 0.0 for L_A in range(L + 1) for n in ns}
            count = 0
            for K in itertools.combinations(range(L), N):
                state = BosonState(L, ModeSet(L, K))
                count += 1
                for L_A in range(L + 1):
                    oracle = brute_force_boson_spectrum(state, L_A)
                    for n in ns:
                        a = boson_sector_entropy(state, L_A, n, cap=caps.boson_N).value
                        worst[L_A, n] = max(worst[L_A, n], abs(a - renyi_from_probabilities(oracle, n)))
            for (L_A, n), err in worst.items():
                table.add(model="boson", method="first_quantized", n=float(n), L=L, L_A=L_A,
                          x=Fraction(L_A, L), state=f"N={N}", states=count, max_abs_err=err)
        for L_A in range(L + 1):
            for n in ns:
                err = max(
                    abs(boson_sector_entropy(BosonState(L, (k,)), L_A, n).value - single_mode_entropy(L, L_A, n))
                    for k in range(L)
                )
                table.add(model="boson", method="single_mode_closed_form", n=float(n), L=L, L_A=L_A,
                          x=Fraction(L_A, L), state="N=1", states=L, max_abs_err=err)
    table.sort()
    return table


def harmonic_suite(max_L: int = 12, masses=(1.0, 10.0), caps: Caps = DEFAULT_CAPS) -> Table:
    """Zero-excitation consistency, and recursion against power-trace hafnians of the Wick sums."""
    table = _table()
    for L in range(2, max_L + 1):
        for m in masses:
            model = HarmonicModel(L, m)
            for L_A in range(L + 1):
                err = abs(harmonic_excited_renyi2(model, (), L_A).value - harmonic_ground_renyi2(model, L_A).value)
                table.add(model="harmonic", method="ground_covariance", n=2.0, L=L, L_A=L_A,
                          x=Fraction(L_A, L), state=f"m={m:g} K=()", states=1, max_abs_err=err)
    # hafnian routes on the matching matrices of small patterns, relative error
    L = min(max_L, 8)
    model = HarmonicModel(L, 2.0)
    for K in ((0,), (1,), (0, 2), (0, 4), (1, 2, 3)):
        if len(K) > caps.harmonic_K or K[-1] >= L:
            continue
        for L_A in range(1, L):
            M = replica_moment(model, ModeSet(L, K), L_A).matching_matrix()
            a, b = hafnian(M), hafnian_power_trace(M)
            err = abs(a - b) / max(abs(a), 1e-300)
            table.add(model="harmonic", method="hafnian_power_trace", n=2.0, L=L, L_A=L_A,
                      x=Fraction(L_A, L), state=f"m=2 K={K}", states=1, max_abs_err=err)
    table.sort()
    return table


SUITES = {"fermion": fermion_suite, "ising": ising_suite, "boson": boson_suite, "harmonic": harmonic_suite}


def suite_passed(model: str, table: Table) -> bool:
    worst = table.max_error()
    return worst is not None and bool(np.isfinite(worst)) and worst < TOLERANCES[model]
