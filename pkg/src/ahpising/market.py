"""Judgment matrices, basket valuation and the log-rate/commission split.

A judgment matrix ``u`` holds relative prices: ``u[v, m]`` is the price of one
unit of good ``m`` expressed in units of good ``v``.  Its logarithm splits
uniquely into an antisymmetric (consistent) part and a symmetric commission.
Indices are 0-based throughout the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

DIAGONAL_TOL = 1e-9


@dataclass(frozen=True)
class JudgmentMatrix:
    """Positive N x N matrix of relative prices with a unit diagonal.

    The diagonal is checked against 1 within ``DIAGONAL_TOL`` and then set to
    exactly 1, so decompositions have exactly zero diagonals.
    """

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        u = np.array(self.entries, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
            raise ValueError(f"judgment matrix must be square and non-empty, got shape {u.shape}")
        if not np.all(np.isfinite(u)) or np.any(u <= 0):
            raise ValueError("judgment matrix entries must be positive and finite")
        diag = np.diag(u)
        if np.any(np.abs(diag - 1.0) > DIAGONAL_TOL):
            raise ValueError(f"judgment matrix diagonal must equal 1, got {diag.tolist()}")
        np.fill_diagonal(u, 1.0)
        u.setflags(write=False)
        object.__setattr__(self, "entries", u)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_weights(cls, weights: ArrayLike) -> JudgmentMatrix:
        """Fully consistent matrix ``u[v, m] = w[v] / w[m]``, exactly reciprocal in floats."""
        w = np.asarray(weights, dtype=float)
        upper = np.triu(w[:, None] / w[None, :], 1)
        u = upper + np.tril(1.0 / np.where(upper.T > 0, upper.T, 1.0), -1)
        np.fill_diagonal(u, 1.0)
        return cls(u)


@dataclass(frozen=True)
class CommissionDecomposition:
    """``ln u = skew + commission`` with ``skew`` antisymmetric, ``commission`` symmetric."""

    skew: NDArray[np.float64]
    commission: NDArray[np.float64]

    def log_rates(self) -> NDArray[np.float64]:
        return self.skew + self.commission

    def reconstruct(self) -> NDArray[np.float64]:
        return np.exp(self.skew + self.commission)


def _as_judgments(u: JudgmentMatrix | ArrayLike) -> JudgmentMatrix:
    return u if isinstance(u, JudgmentMatrix) else JudgmentMatrix(np.asarray(u, dtype=float))


def commission_from_bid_ask(bid: float, ask: float) -> float:
    """Commission of a quoted spread: half the log-difference of bid and ask.

    Negative for a genuine spread (bid < ask).
    """
    if not (bid > 0 and ask > 0) or not (math.isfinite(bid) and math.isfinite(ask)):
        raise ValueError(f"bid and ask must be positive and finite, got {bid!r}, {ask!r}")
    return (math.log(bid) - math.log(ask)) / 2.0


def decompose(u: JudgmentMatrix | ArrayLike) -> CommissionDecomposition:
    """Split ``ln u`` into its consistent log-rates and the commission matrix.

    ``commission[v, m] = (ln u[v, m] + ln u[m, v]) / 2`` and
    ``skew[v, m] = (ln u[v, m] - ln u[m, v]) / 2``.  Pairs that are exact
    floating-point reciprocals get exactly zero commission.
    """
    entries = _as_judgments(u).entries
    log_u = np.log(entries)
    skew = (log_u - log_u.T) / 2.0
    commission = (log_u + log_u.T) / 2.0
    reciprocal = (entries == 1.0 / entries.T) | (entries.T == 1.0 / entries)
    commission[reciprocal] = 0.0
    return CommissionDecomposition(skew=skew, commission=commission)


def cost_matrix(d: CommissionDecomposition) -> NDArray[np.float64]:
    """Costs charged by the profit Hamiltonian: the negated commission.

    A genuine spread has a negative commission, i.e. a positive cost.  Negative
    costs (round-trip gains) are passed through unchanged.
    """
    costs = -np.array(d.commission, dtype=float)
    np.fill_diagonal(costs, 0.0)
    return costs


def transitivity_deviation(u: JudgmentMatrix | ArrayLike, v: int, r: int, m: int) -> float:
    """``ln(u[v, r] * u[r, m] / u[v, m])``; zero iff the triple is consistent."""
    entries = _as_judgments(u).entries
    n = entries.shape[0]
    for idx in (v, r, m):
        if not 0 <= idx < n:
            raise IndexError(f"criterion index {idx} out of range for N={n}")
    log_u = np.log(entries)
    return float(log_u[v, r] + log_u[r, m] - log_u[v, m])


def deviation_tensor(u: JudgmentMatrix | ArrayLike) -> NDArray[np.float64]:
    """All triple deviations at once, indexed ``[v, r, m]``."""
    log_u = np.log(_as_judgments(u).entries)
    return log_u[:, :, None] + log_u[None, :, :] - log_u[:, None, :]


def log_returns(quotes: ArrayLike) -> NDArray[np.float64]:
    """Per-step log returns ``h[m, t] = ln(q[m, t+1] / q[m, t])`` from an N x (k+1) history."""
    q = np.asarray(quotes, dtype=float)
    if q.ndim != 2 or q.shape[1] < 2:
        raise ValueError(f"quotation history must be N x (k+1) with k >= 1, got shape {q.shape}")
    if not np.all(np.isfinite(q)) or np.any(q <= 0):
        raise ValueError("quotes must be positive and finite")
    return np.diff(np.log(q), axis=1)


def value_basket(u: JudgmentMatrix | ArrayLike, basket: ArrayLike, v: int) -> float:
    """Value of ``basket`` in units of good ``v``."""
    entries = _as_judgments(u).entries
    p = np.asarray(basket, dtype=float)
    if p.shape != (entries.shape[0],):
        raise ValueError(f"basket has shape {p.shape}, market has N={entries.shape[0]}")
    if not 0 <= v < entries.shape[0]:
        raise IndexError(f"criterion index {v} out of range for N={entries.shape[0]}")
    return float(entries[v] @ p)


def priority_vector(u: JudgmentMatrix | ArrayLike) -> NDArray[np.float64]:
    """Geometric-mean priorities, normalized to sum to one."""
    log_u = np.log(_as_judgments(u).entries)
    g = np.exp(log_u.mean(axis=1) - log_u.mean(axis=1).max())
    return g / g.sum()
