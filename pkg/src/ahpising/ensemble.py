"""Canonical (Gibbs) ensemble over pure strategies.

Every pure strategy ``s`` gets weight ``exp(-beta * H(s)) / Z``.  Negative
``beta`` favours profitable strategies; ``beta -> -inf`` concentrates on the
best one.  ``Z`` is a trace of a product of N x N transfer matrices, one per
step, and is only ever materialized as ``ln Z``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ahpising.strategy import as_costs, as_returns, profit

ENUMERATION_CAP = 10**7
_CHUNK = 1 << 16
_UNDERFLOW_GUARD = 1e-250


class EnumerationCapError(RuntimeError):
    """Raised when brute-force enumeration would exceed the path cap."""


@dataclass(frozen=True)
class EnsembleObservables:
    """Thermodynamics of the strategy ensemble at one inverse temperature.

    ``temperature`` is ``math.inf`` at ``beta == 0``.
    """

    beta: float
    log_z: float
    expected_profit: float
    variance: float
    entropy: float

    @property
    def infinite_temperature(self) -> bool:
        return self.beta == 0.0

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0.0 else 1.0 / self.beta

    @property
    def free_profit(self) -> float:
        """``-T ln Z``; tends to the best achievable profit as ``beta -> -inf``."""
        return math.nan if self.beta == 0.0 else -self.log_z / self.beta

    def identity_residual(self) -> float:
        """``T ln Z + E(H) - T S``, which vanishes identically; NaN at ``beta == 0``."""
        if self.beta == 0.0:
            return math.nan
        t = self.temperature
        return t * self.log_z + self.expected_profit - t * self.entropy


def _exponents(h: NDArray, c: NDArray, t: int, symmetrized: bool) -> NDArray:
    # g[v, m]: profit collected moving from v (step t-1) to m (step t)
    if symmetrized:
        prev = h[:, t - 1]  # t == 0 wraps to the last column
        return 0.5 * h[None, :, t] + 0.5 * prev[:, None] - c.T
    return h[None, :, t] - c.T


def transfer_matrix(t: int, beta: float, h: ArrayLike, c: ArrayLike, symmetrized: bool = False) -> NDArray[np.float64]:
    """Unscaled transfer matrix ``M[v, m] = exp(-beta * (h[m, t] - c[m, v]))`` for step ``t``.

    With ``symmetrized=True`` the return field is split half onto each end of
    the bond (``h`` of step -1 read from the last column).  Both variants give
    the same trace of the full product.
    """
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    if not 0 <= t < h.shape[1]:
        raise IndexError(f"time index {t} out of range for k={h.shape[1]}")
    return np.exp(-beta * _exponents(h, c, t, symmetrized))


def _shifted(a: NDArray, b: NDArray) -> tuple[NDArray, NDArray, NDArray, NDArray]:
    ra = a.max(axis=1)
    cb = b.max(axis=0)
    return np.exp(a - ra[:, None]), np.exp(b - cb[None, :]), ra, cb


def _fragile(total: NDArray) -> NDArray:
    # entries whose scaled sum is too small to trust after BLAS accumulation
    return ~(total > _UNDERFLOW_GUARD)


def _log_matmul(a: NDArray, b: NDArray) -> NDArray:
    """``log(exp(a) @ exp(b))`` without overflow.

    Rows of ``a`` and columns of ``b`` are max-shifted before a BLAS product;
    the few entries that still underflow are redone term by term.
    """
    ea, eb, ra, cb = _shifted(a, b)
    total = ea @ eb
    with np.errstate(divide="ignore"):
        out = ra[:, None] + cb[None, :] + np.log(total)
    for v, m in zip(*np.nonzero(_fragile(total))):
        x = a[v] + b[:, m]
        top = x.max()
        out[v, m] = top + math.log(np.exp(x - top).sum())
    return out


def _logsumexp(x: NDArray) -> float:
    top = x.max()
    return float(top + math.log(np.exp(x - top).sum()))


def _log_trace_product(beta: float, h: NDArray, c: NDArray, symmetrized: bool) -> float:
    k = h.shape[1]
    acc = -beta * _exponents(h, c, 0, symmetrized)
    for t in range(1, k):
        acc = _log_matmul(acc, -beta * _exponents(h, c, t, symmetrized))
    return _logsumexp(np.diag(acc))


def partition_function(beta: float, h: ArrayLike, c: ArrayLike, symmetrized: bool = False) -> float:
    """``ln Z`` via the periodic trace of the transfer-matrix product."""
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    return _log_trace_product(beta, h, c, symmetrized)


def _moment_step(log_p: NDArray, m1: NDArray, m2: NDArray, w: NDArray, g: NDArray) -> tuple[NDArray, NDArray, NDArray]:
    # weights exp(log_p[v, u] + w[u, m]) normalized over u
    ep, ew, ra, cb = _shifted(log_p, w)
    eg = ew * g
    total = ep @ ew
    bad = _fragile(total)
    safe = np.where(bad, 1.0, total)
    pm1 = ep * m1
    new_m1 = (pm1 @ ew + ep @ eg) / safe
    new_m2 = ((ep * m2) @ ew + 2.0 * (pm1 @ eg) + ep @ (eg * g)) / safe
    with np.errstate(divide="ignore"):
        new_log = ra[:, None] + cb[None, :] + np.log(total)
    for v, m in zip(*np.nonzero(bad)):
        x = log_p[v] + w[:, m]
        weight = np.exp(x - x.max())
        norm = weight.sum()
        weight /= norm
        new_log[v, m] = x.max() + math.log(norm)
        new_m1[v, m] = weight @ (m1[v] + g[:, m])
        new_m2[v, m] = weight @ (m2[v] + 2.0 * m1[v] * g[:, m] + g[:, m] ** 2)
    return new_log, new_m1, new_m2


def _moments(beta: float, h: NDArray, c: NDArray, shift: float) -> tuple[float, float, float]:
    """ln Z, mean of ``H - shift`` and variance of ``H``.

    Alongside the log of each product entry we carry the first and second
    moments of the accumulated exponent conditioned on the path's two
    endpoints.  Pushing them through one more step is the product rule for
    the beta-derivatives of the transfer matrices, written per unit weight so
    nothing over- or underflows.
    """
    k = h.shape[1]
    per_step = shift / k
    g = _exponents(h, c, 0, False) - per_step
    log_p, m1, m2 = -beta * g, g.copy(), g * g
    for t in range(1, k):
        g = _exponents(h, c, t, False) - per_step
        log_p, m1, m2 = _moment_step(log_p, m1, m2, -beta * g, g)
    d = np.diag(log_p)
    log_z = _logsumexp(d)
    closing = np.exp(d - log_z)
    mean = float(closing @ np.diag(m1))
    var = float(closing @ np.diag(m2)) - mean * mean
    return log_z - beta * shift, mean, var


def observables(beta: float, h: ArrayLike, c: ArrayLike) -> EnsembleObservables:
    """Exact ``ln Z``, ``E(H)``, ``Var(H)`` and entropy at ``beta``.

    Derivatives of ``ln Z`` come from forward accumulation through the
    matrix product.  A second pass re-centres the profits on the first-pass
    mean so the variance is not a difference of two large numbers.
    """
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    _, mean0, _ = _moments(beta, h, c, 0.0)
    log_z, dmean, var = _moments(beta, h, c, mean0)
    mean = mean0 + dmean
    entropy = max(log_z + beta * mean, 0.0)
    return EnsembleObservables(
        beta=float(beta),
        log_z=float(log_z),
        expected_profit=float(mean),
        variance=float(max(var, 0.0)),
        entropy=float(entropy),
    )


def temperature_scan(betas: Iterable[float], h: ArrayLike, c: ArrayLike) -> list[EnsembleObservables]:
    return [observables(float(b), h, c) for b in betas]


def entropy_slope(scan: list[EnsembleObservables]) -> list[float | None]:
    """Finite-difference ``dE/dS`` along a scan (central inside, one-sided at the ends).

    Entries are ``None`` where the entropy does not change.
    """
    e = [o.expected_profit for o in scan]
    s = [o.entropy for o in scan]
    out: list[float | None] = []
    for i in range(len(scan)):
        lo, hi = max(i - 1, 0), min(i + 1, len(scan) - 1)
        ds = s[hi] - s[lo]
        out.append(None if hi == lo or ds == 0.0 else (e[hi] - e[lo]) / ds)
    return out


def _strategy_chunks(n: int, k: int) -> Iterator[NDArray[np.intp]]:
    total = n**k
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total))
        # first step is the most significant digit: lexicographic order
        yield np.stack(np.unravel_index(codes, (n,) * k), axis=1) if k > 0 else codes[:, None]


def _chunk_profits(strats: NDArray[np.intp], h: NDArray, c: NDArray) -> NDArray[np.float64]:
    k = h.shape[1]
    field = h[strats, np.arange(k)].sum(axis=1)
    cost = c[strats, np.roll(strats, 1, axis=1)].sum(axis=1)
    return field - cost


def _check_cap(n: int, k: int, cap: int) -> None:
    if n**k > cap:
        raise EnumerationCapError(f"{n}^{k} = {n**k} pure strategies exceeds enumeration cap {cap}")


def enumerate_profits(h: ArrayLike, c: ArrayLike, cap: int = ENUMERATION_CAP) -> tuple[NDArray[np.intp], NDArray[np.float64]]:
    """All N^k pure strategies (lexicographic) with their profits."""
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    n, k = h.shape
    _check_cap(n, k, cap)
    chunks = list(_strategy_chunks(n, k))
    strats = np.concatenate(chunks)
    return strats, np.concatenate([_chunk_profits(ch, h, c) for ch in chunks])


def brute_force_partition(beta: float, h: ArrayLike, c: ArrayLike, cap: int = ENUMERATION_CAP) -> float:
    """``ln Z`` by direct summation over every pure strategy.

    Chunks are reduced with a max-shifted log-sum-exp and merged in a fixed
    order, so the result is reproducible.
    """
    h = as_returns(h)
    c = as_costs(c, h.shape[0])
    n, k = h.shape
    _check_cap(n, k, cap)
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    total = -math.inf
    for strats in _strategy_chunks(n, k):
        x = -beta * _chunk_profits(strats, h, c)
        top = x.max()
        total = float(np.logaddexp(total, top + math.log(np.exp(x - top).sum())))
    return total


def brute_force_observables(beta: float, h: ArrayLike, c: ArrayLike, cap: int = ENUMERATION_CAP) -> EnsembleObservables:
    """Same quantities as :func:`observables`, from explicit Gibbs weights."""
    _, profits = enumerate_profits(h, c, cap)
    x = -beta * profits
    top = x.max()
    w = np.exp(x - top)
    z = w.sum()
    p = w / z
    mean = float(p @ profits)
    var = float(p @ (profits - mean) ** 2)
    nz = p[p > 0]
    return EnsembleObservables(
        beta=float(beta),
        log_z=float(top + math.log(z)),
        expected_profit=mean,
        variance=var,
        entropy=float(-(nz * np.log(nz)).sum()),
    )


def gibbs_weight(s, beta: float, h: ArrayLike, c: ArrayLike) -> float:
    """Probability of pure strategy ``s`` in the canonical ensemble."""
    return math.exp(-beta * profit(s, h, c) - partition_function(beta, h, c))
