"""Fisher information of strategies and of discrete distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ahpising.strategy import iverson

PROBABILITY_TOL = 1e-9


@dataclass(frozen=True)
class FisherReport:
    per_criterion: NDArray[np.float64]

    @property
    def total(self) -> float:
        return float(self.per_criterion.sum())


def strategy_fisher(s, n: int) -> FisherReport:
    """Fisher information of a pure strategy, per criterion.

    Criterion ``m`` contributes ``(b' - b)^2 / (b' + b)`` for every pair of
    consecutive steps where its bit changes from ``b`` to ``b'``, which is 1
    per toggle.  Time wraps around, so a switch back from the last step to
    the first counts too.
    """
    bits = iverson(s, n).astype(float)
    nxt = np.roll(bits, -1, axis=1)
    changed = bits != nxt
    terms = np.zeros_like(bits)
    terms[changed] = (nxt[changed] - bits[changed]) ** 2 / (nxt[changed] + bits[changed])
    return FisherReport(per_criterion=terms.sum(axis=1))


def _as_probabilities(p: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("probability vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("probabilities must be finite and nonnegative")
    if abs(arr.sum() - 1.0) > PROBABILITY_TOL:
        raise ValueError(f"probabilities must sum to 1, got {arr.sum()!r}")
    return arr


def _check_dx(dx: float) -> None:
    if not (dx > 0 and math.isfinite(dx)):
        raise ValueError(f"dx must be positive and finite, got {dx!r}")


def discrete_fisher(p: ArrayLike, dx: float = 1.0) -> float:
    """Forward-difference Fisher information ``sum (p[i+1] - p[i])^2 / p[i] / dx``.

    Returns ``math.inf`` when a zero probability sits under a nonzero jump;
    this is a property of the distribution, never an overflow.
    """
    p = _as_probabilities(p)
    _check_dx(dx)
    jump = np.diff(p)
    base = p[:-1]
    if np.any((base == 0) & (jump != 0)):
        return math.inf
    live = base > 0
    return float((jump[live] ** 2 / base[live]).sum() / dx)


def shannon_entropy(p: ArrayLike, dx: float = 1.0) -> float:
    p = _as_probabilities(p)
    _check_dx(dx)
    nz = p[p > 0]
    return float(max(-dx * (nz * np.log(nz)).sum(), 0.0))


def empirical_distribution(s, n: int) -> NDArray[np.float64]:
    """Fraction of steps spent in each criterion."""
    return iverson(s, n).mean(axis=1)


def cost_of_information(report: FisherReport, flat_cost: float) -> float:
    """Switching cost paid under a uniform off-diagonal cost ``flat_cost``.

    Each switch toggles two criteria, so it adds 2 to the total information.
    """
    if not (flat_cost >= 0 and math.isfinite(flat_cost)):
        raise ValueError(f"flat_cost must be nonnegative and finite, got {flat_cost!r}")
    return flat_cost * report.total / 2.0
