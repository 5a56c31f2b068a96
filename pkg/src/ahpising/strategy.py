"""Pure strategies and the periodic Ising-chain profit.

A pure strategy holds exactly one criterion per step.  With log returns
``h`` (N x k) and a cost matrix ``c`` (``c[m, v]`` charged when switching
from ``v`` at step t-1 to ``m`` at step t) its profit is

    H(s) = sum_t h[s_t, t] - sum_t c[s_t, s_{t-1}],   s_0 := s_k.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray


def as_returns(h: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(h, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"returns must be an N x k matrix with N, k >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("returns must be finite")
    return arr


def as_costs(c: ArrayLike, n: int | None = None) -> NDArray[np.float64]:
    arr = np.asarray(c, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"cost matrix is {arr.shape[0]} x {arr.shape[0]}, expected N={n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("costs must be finite")
    if np.any(np.diag(arr) != 0):
        raise ValueError("cost matrix diagonal must be zero (holding is free)")
    return arr


def as_strategy(s: Sequence[int] | ArrayLike, n: int, k: int | None = None) -> NDArray[np.intp]:
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("strategy must be a non-empty sequence of criterion indices")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"strategy indices must be integers, got dtype {arr.dtype}")
    if k is not None and arr.size != k:
        raise ValueError(f"strategy has {arr.size} steps, returns have k={k}")
    if np.any(arr < 0) or np.any(arr >= n):
        raise IndexError(f"strategy index out of range for N={n}: {arr.tolist()}")
    return arr.astype(np.intp)


def _checked(s, h, c):
    h = as_returns(h)
    n, k = h.shape
    return as_strategy(s, n, k), h, as_costs(c, n)


def iverson(s: Sequence[int] | ArrayLike, n: int) -> NDArray[np.int8]:
    """N x k 0/1 field with ``bits[m, t] = 1`` iff ``s[t] == m``."""
    s = as_strategy(s, n)
    bits = np.zeros((n, s.size), dtype=np.int8)
    bits[s, np.arange(s.size)] = 1
    return bits


def spins(bits: ArrayLike) -> NDArray[np.float64]:
    """Spin field ``bits - 1/2``; each column must hold exactly one set bit."""
    b = np.asarray(bits)
    if b.ndim != 2 or not np.all((b == 0) | (b == 1)) or np.any(b.sum(axis=0) != 1):
        raise ValueError("Iverson field must be 0/1 with exactly one 1 per column")
    return b.astype(float) - 0.5


def step_contributions(s, h, c) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-step return earned and cost paid, both of length k."""
    s, h, c = _checked(s, h, c)
    field = h[s, np.arange(s.size)]
    cost = c[s, np.roll(s, 1)]
    return field, cost


def profit(s, h, c) -> float:
    field, cost = step_contributions(s, h, c)
    return float(field.sum() - cost.sum())


def spin_profit(s, h, c) -> float:
    """Profit evaluated in spin variables, constants included.

    Substituting ``n = S + 1/2`` into the bilinear cost gives a coupling term,
    two half-strength one-site terms (one on each end of the bond) and a
    constant.  For a symmetric ``c`` the two halves merge into a single field
    ``-sum c[m, v] S[m, t]``.
    """
    s, h, c = _checked(s, h, c)
    n, k = h.shape
    sp = spins(iverson(s, n))
    prev = np.roll(sp, 1, axis=1)
    coupling = np.einsum("mv,vt,mt->", c, prev, sp)
    # sum over (v, m, t) of c[m, v] S[v, t-1] and of c[m, v] S[m, t]
    from_prev = np.einsum("mv,vt->", c, prev)
    from_next = np.einsum("mv,mt->", c, sp)
    return float(
        np.sum(h * sp)
        - 0.5 * from_next
        - 0.5 * from_prev
        - coupling
        - 0.25 * k * c.sum()
        + 0.5 * h.sum()
    )
