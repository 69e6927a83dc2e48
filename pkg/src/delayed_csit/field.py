"""Linear algebra over the prime field F_p, p = 2**31 - 1.

Entries are kept as int64 residues in ``[0, p)``; a product of two residues
fits in 62 bits, so every multiply is reduced immediately. The hot loops
are compiled with numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit

P = 2_147_483_647


def random_elements(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform draws from F_p."""
    return rng.integers(0, P, size=shape, dtype=np.int64)


@njit(cache=True)
def _inv(a):
    # Fermat: a^(p-2)
    result = 1
    base = a % 2147483647
    e = 2147483645
    while e > 0:
        if e & 1:
            result = (result * base) % 2147483647
        base = (base * base) % 2147483647
        e >>= 1
    return result


@njit(cache=True)
def matmul(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.int64)
    for r in range(n):
        for s in range(k):
            x = a[r, s]
            if x == 0:
                continue
            for c in range(m):
                out[r, c] = (out[r, c] + x * b[s, c]) % 2147483647
    return out


@njit(cache=True)
def _row_reduce(m, ncols):
    """In-place reduced row echelon form on the first ``ncols`` columns.

    Returns the pivot columns; their count is the rank of that block.
    """
    rows = m.shape[0]
    total = m.shape[1]
    pivots = np.empty(min(rows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        piv = -1
        for k in range(r, rows):
            if m[k, c] != 0:
                piv = k
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(total):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        inv = _inv(m[r, c])
        for j in range(c, total):
            m[r, j] = (m[r, j] * inv) % 2147483647
        for k in range(rows):
            if k == r:
                continue
            f = m[k, c]
            if f == 0:
                continue
            for j in range(c, total):
                m[k, j] = (m[k, j] - f * m[r, j]) % 2147483647
        pivots[r] = c
        r += 1
    return pivots[:r]


@njit(cache=True)
def _rank(a):
    # forward elimination only; the pivot count is all that is needed
    m = a.copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for k in range(r, rows):
            if m[k, c] != 0:
                piv = k
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        inv = _inv(m[r, c])
        for k in range(r + 1, rows):
            f = m[k, c]
            if f == 0:
                continue
            f = (f * inv) % 2147483647
            for j in range(c, cols):
                m[k, j] = (m[k, j] - f * m[r, j]) % 2147483647
        r += 1
    return r


def rank(a: np.ndarray) -> int:
    a = np.ascontiguousarray(a, dtype=np.int64) % P
    if a.size == 0:
        return 0
    return int(_rank(a))


def solve(a: np.ndarray, b: np.ndarray) -> tuple[int, np.ndarray | None]:
    """Solve ``a x = b`` over F_p.

    Returns ``(rank(a), x)`` where ``x`` is the unique solution, or ``None``
    when the system is rank deficient or inconsistent.
    """
    a = np.ascontiguousarray(a, dtype=np.int64) % P
    b = np.ascontiguousarray(b, dtype=np.int64).reshape(a.shape[0], -1) % P
    n = a.shape[1]
    if a.shape[0] == 0:
        return 0, (np.zeros((0, b.shape[1]), dtype=np.int64) if n == 0 else None)
    aug = np.concatenate([a, b], axis=1)
    piv = _row_reduce(aug, n)
    r = len(piv)
    if r < n:
        return r, None
    if np.any(aug[r:, n:] != 0):
        return r, None
    return r, aug[:n, n:].copy()


def right_inverse_on_pivots(l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pivot columns of a full-row-rank ``l`` and the inverse of that square block."""
    l = np.ascontiguousarray(l, dtype=np.int64) % P
    k = l.shape[0]
    work = l.copy()
    piv = np.asarray(_row_reduce(work, l.shape[1]))
    if len(piv) != k:
        raise np.linalg.LinAlgError("matrix does not have full row rank over F_p")
    square = l[:, piv]
    _, inv = solve(square, np.eye(k, dtype=np.int64))
    if inv is None:  # pragma: no cover - pivot block is invertible by construction
        raise np.linalg.LinAlgError("pivot block singular")
    return piv, inv


def float_rank(a: np.ndarray) -> int:
    """Numerical rank with tolerance ``max(shape) * eps * s_max``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    return int(np.sum(s > tol))
