"""(max, +) matrix algebra and the clairvoyant (maximum-profit) strategy.

Taking ``log`` base ``e^{-beta}`` of a transfer matrix gives its tropical
image ``G[v, m] = h[m, t] - c[m, v]``.  In the (max, +) semiring the matrix
product ``(A x B)[v, w] = max_m A[v, m] + B[m, w]`` picks the best path, and
the largest diagonal entry of ``G(1) x ... x G(k)`` is the best periodic
strategy's profit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ahpising.strategy import as_costs, as_returns, profit

# Additive identity of the semiring.  IEEE -inf absorbs finite addends and
# never meets +inf, so it cannot produce NaN with finite user data.
TROPICAL_ZERO = -np.inf


@dataclass(frozen=True)
class ClairvoyantResult:
    max_profit: float
    strategy: NDArray[np.intp]
    predecessor_table: NDArray[np.intp]


def tropical_identity(n: int) -> NDArray[np.float64]:
    eye = np.full((n, n), TROPICAL_ZERO)
    np.fill_diagonal(eye, 0.0)
    return eye


def tropical_product(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot (max,+)-multiply shapes {a.shape} and {b.shape}")
    return (a[:, :, None] + b[None, :, :]).max(axis=1)


def tropical_transfer(t: int, h: ArrayLike, c: ArrayLike) -> NDArray[np.float64]:
    """Tropical image of the transfer matrix for step ``t``."""
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    return h[None, :, t] - c.T


def max_profit(h: ArrayLike, c: ArrayLike) -> float:
    """Best achievable profit over all pure strategies (periodic boundary)."""
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    acc = tropical_identity(h.shape[0])
    for t in range(h.shape[1]):
        acc = tropical_product(acc, h[None, :, t] - c.T)
    return float(np.diag(acc).max())


def _viterbi_closed(h: NDArray, c: NDArray, start: int) -> tuple[float, NDArray[np.intp]]:
    # forward sweep with s_0 = s_k = start
    n, k = h.shape
    score = np.full(n, TROPICAL_ZERO)
    score[start] = 0.0
    pred = np.zeros((k, n), dtype=np.intp)
    gain = -c.T  # gain[v, m] for moving v -> m
    for t in range(k):
        cand = score[:, None] + gain
        pred[t] = np.argmax(cand, axis=0)  # first maximum: smallest index
        score = cand[pred[t], np.arange(n)] + h[:, t]
    return float(score[start]), pred


def clairvoyant(h: ArrayLike, c: ArrayLike) -> ClairvoyantResult:
    """Maximum profit together with one strategy that attains it.

    One closed Viterbi sweep is run per closing state ``s_k``; the best
    closing state (smallest index on ties) is then traced back through its
    predecessor table, again preferring the smallest index on ties.
    """
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    n, k = h.shape
    best, best_pred, best_end = TROPICAL_ZERO, None, 0
    for end in range(n):
        value, pred = _viterbi_closed(h, c, end)
        if value > best:
            best, best_pred, best_end = value, pred, end
    path = np.empty(k, dtype=np.intp)
    path[-1] = best_end
    for t in range(k - 1, 0, -1):
        path[t - 1] = best_pred[t, path[t]]
    return ClairvoyantResult(max_profit=profit(path, h, c), strategy=path, predecessor_table=best_pred)
