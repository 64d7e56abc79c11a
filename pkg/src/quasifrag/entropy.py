"""Entropy records and spectrum-to-entropy helpers shared by every engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

METHODS = ("correlation", "fock_oracle", "prediction", "ed_oracle", "boson_sector", "gaussian_wick")

# Eigenvalues within this distance of [0, 1] are clipped; further out is an error.
CLIP_TOL = 1e-10
# Values this close to 0 or 1 are round-off of exact boundary values; for n < 1
# their power ``v**n`` would otherwise dominate the entropy.
SNAP_TOL = 1e-12


class NumericalError(RuntimeError):
    """A spectrum or matrix violated a physical constraint beyond tolerance."""


@dataclass(frozen=True)
class EntropyResult:
    n: float
    L: int
    L_A: int
    value: float
    method: str
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.n <= 0:
            raise ValueError(f"Renyi index must be positive, got {self.n}")

    def __float__(self):
        return float(self.value)


def _check_index(n: float) -> float:
    n = float(n)
    if not n > 0:
        raise ValueError(f"Renyi index must be positive, got {n}")
    return n


def renyi_from_probabilities(probs, n: float) -> float:
    """Renyi-``n`` (von Neumann for ``n == 1``) entropy of a probability vector, in nats."""
    n = _check_index(n)
    p = np.asarray(probs, dtype=float)
    p = p[p > SNAP_TOL]
    if p.size == 0:
        return 0.0
    if n == 1.0:
        val = float(-np.sum(p * np.log(p)))
    else:
        val = float(np.log(np.sum(p**n)) / (1.0 - n))
    return val if val > 0.0 else 0.0


def binary_entropy_sum(nu, n: float) -> float:
    """Sum of binary Renyi/Shannon entropies of occupation numbers ``nu`` in [0, 1]."""
    n = _check_index(n)
    nu = np.asarray(nu, dtype=float)
    if nu.size == 0:
        return 0.0
    if n == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.where(nu > 0, -nu * np.log(nu), 0.0)
            b = np.where(nu < 1, -(1 - nu) * np.log1p(-nu), 0.0)
        val = float(np.sum(a + b))
    else:
        val = float(np.sum(np.log(nu**n + (1 - nu) ** n)) / (1.0 - n))
    return val if val > 0.0 else 0.0


def clip_unit_interval(values, tol: float = CLIP_TOL, what: str = "eigenvalue"):
    """Clip values to [0, 1]; raise if any lies further than ``tol`` outside.

    Entries within ``SNAP_TOL`` of either end are set to that end exactly.

    Returns the clipped array and the number of entries that were moved.
    """
    v = np.asarray(values, dtype=float)
    bad = (v < -tol) | (v > 1 + tol)
    if np.any(bad):
        raise NumericalError(f"{what} outside [-{tol:g}, 1+{tol:g}]: {v[bad][:5].tolist()}")
    clipped = np.clip(v, 0.0, 1.0)
    clipped[clipped < SNAP_TOL] = 0.0
    clipped[clipped > 1.0 - SNAP_TOL] = 1.0
    return clipped, int(np.count_nonzero(clipped != v))


def schmidt_entropy(psi: np.ndarray, dim_a: int, n: float) -> float:
    """Entropy of the first ``dim_a``-dimensional factor of a normalised pure state."""
    m = np.asarray(psi).reshape(dim_a, -1)
    s = np.linalg.svd(m, compute_uv=False)
    return renyi_from_probabilities(s**2, n)
