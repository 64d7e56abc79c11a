"""Hafnians: sums over perfect matchings of a symmetric matrix.

``hafnian`` sums matchings in a fixed canonical order (the lowest free index
is always paired first) with memoised sub-sums over the set of free indices.
``hafnian_power_trace`` is an independent route via the power-trace formula,
``O(n^3 2^(n/2))`` but with alternating signs, used as a cross-check.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def _exp_series_coefficient(power_traces: np.ndarray, order: int) -> np.ndarray:
    """Coefficient of ``t^order`` in ``exp(sum_j tr(C^j) t^j / (2 j))`` for a batch of traces."""
    B = power_traces.shape[0]
    h = np.zeros((B, order + 1), dtype=complex)
    j = np.arange(1, order + 1)
    h[:, 1:] = power_traces / (2 * j)
    g = np.zeros((B, order + 1), dtype=complex)
    g[:, 0] = 1.0
    for m in range(1, order + 1):
        jj = np.arange(1, m + 1)
        g[:, m] = np.sum(jj * h[:, 1 : m + 1] * g[:, m - 1 :: -1][:, :m], axis=1) / m
    return g[:, order]


def hafnian_power_trace(A) -> complex:
    """Hafnian of a symmetric matrix of even dimension (power-trace formula)."""
    A = np.asarray(A, dtype=complex)
    dim = A.shape[0]
    if A.shape != (dim, dim):
        raise ValueError(f"hafnian needs a square matrix, got {A.shape}")
    if dim == 0:
        return 1.0 + 0j
    if dim % 2:
        return 0.0 + 0j
    n = dim // 2
    # pair index s with (2s, 2s+1); X swaps within each pair
    XA = A.reshape(n, 2, n, 2)[:, ::-1].reshape(dim, dim)
    terms = []
    for size in range(1, n + 1):
        subsets = np.array(list(itertools.combinations(range(n), size)))
        idx = np.stack([2 * subsets, 2 * subsets + 1], axis=2).reshape(len(subsets), 2 * size)
        sub = XA[idx[:, :, None], idx[:, None, :]]
        eig = np.linalg.eigvals(sub)
        traces = np.stack([np.sum(eig**j, axis=1) for j in range(1, n + 1)], axis=1)
        vals = _exp_series_coefficient(traces, n)
        sign = -1.0 if (n - size) % 2 else 1.0
        terms.append(sign * vals)
    # empty subset contributes f(empty) = 0 for n >= 1
    total = np.sum(np.concatenate(terms))
    return complex(total)


def hafnian(A) -> complex:
    """Hafnian by recursion over perfect matchings, lowest free index paired first."""
    A = np.asarray(A, dtype=complex)
    dim = A.shape[0]
    if A.shape != (dim, dim):
        raise ValueError(f"hafnian needs a square matrix, got {A.shape}")
    if dim % 2:
        return 0.0 + 0j
    A = A.tolist()

    @lru_cache(maxsize=None)
    def rec(mask: int) -> complex:
        if mask == 0:
            return 1.0 + 0j
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        acc = 0.0 + 0j
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            a = A[i][j]
            if a != 0:
                acc += a * rec(rest & ~(1 << j))
        return acc

    return rec((1 << dim) - 1)
