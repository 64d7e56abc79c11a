"""Matrix permanents by Ryser's inclusion-exclusion formula."""

from __future__ import annotations

import itertools

import numpy as np


def _gray_flips(n: int):
    """Yield ``(column, sign)`` for successive Gray-code subsets of ``range(n)``."""
    prev = 0
    for i in range(1, 2**n):
        g = i ^ (i >> 1)
        changed = g ^ prev
        col = changed.bit_length() - 1
        yield col, (1 if g & changed else -1), bin(g).count("1")
        prev = g


def permanent_batch(mats: np.ndarray, chunk: int = 65536) -> np.ndarray:
    """Permanents of a stack of square matrices, shape ``(B, n, n)``.

    Ryser's formula walked in Gray-code order, with Kahan-compensated
    accumulation of the ``2^n - 1`` signed terms.
    """
    mats = np.asarray(mats)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {mats.shape}")
    B, n, _ = mats.shape
    dtype = np.result_type(mats.dtype, np.float64)
    out = np.empty(B, dtype=dtype)
    if n == 0:
        out[:] = 1.0
        return out
    flips = list(_gray_flips(n))
    for start in range(0, B, chunk):
        A = mats[start : start + chunk].astype(dtype, copy=False)
        row_sums = np.zeros(A.shape[:2], dtype=dtype)
        total = np.zeros(A.shape[0], dtype=dtype)
        comp = np.zeros_like(total)
        for col, sign, size in flips:
            if sign > 0:
                row_sums += A[:, :, col]
            else:
                row_sums -= A[:, :, col]
            term = np.prod(row_sums, axis=1)
            if size % 2:
                term = -term
            yk = term - comp
            t = total + yk
            comp = (t - total) - yk
            total = t
        out[start : start + chunk] = total if n % 2 == 0 else -total
    return out


def permanent(matrix) -> complex | float:
    """Permanent of a single square matrix."""
    m = np.asarray(matrix)
    val = permanent_batch(m[None])[0]
    return val.item()


def permanent_naive(matrix) -> complex | float:
    """Permanent as the plain sum over permutations; for testing only."""
    m = np.asarray(matrix)
    n = m.shape[0]
    rows = np.arange(n)
    return sum(np.prod(m[rows, list(perm)]) for perm in itertools.permutations(range(n))) if n else 1.0
