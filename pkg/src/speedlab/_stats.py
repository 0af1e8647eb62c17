"""Shared statistical primitives for the measurement and verification layers.

Thin, validated wrappers around scipy with the artifact's conventions baked
in: KS needs at least 20 samples, chi-square needs expected cell counts of at
least 5 (a deterministic merge helper enforces this), and z statistics use
the null standard error supplied by the caller.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import stats

__all__ = [
    "KSResult",
    "Chi2Result",
    "ZResult",
    "ks_test",
    "chi2_test",
    "z_test",
    "merge_rare_cells",
    "chi2_two_sample",
    "binomial_z",
]

MIN_KS_SAMPLES = 20
MIN_EXPECTED = 5.0


class KSResult(NamedTuple):
    statistic: float
    pvalue: float


class Chi2Result(NamedTuple):
    statistic: float
    pvalue: float
    dof: int


class ZResult(NamedTuple):
    statistic: float
    pvalue: float


def ks_test(samples, cdf) -> KSResult:
    """One-sample Kolmogorov-Smirnov test against ``cdf`` (a callable or a
    scipy distribution name)."""
    xs = np.asarray(samples, dtype=np.float64).ravel()
    if xs.size < MIN_KS_SAMPLES:
        raise ValueError(f"KS test needs at least {MIN_KS_SAMPLES} samples, got {xs.size}")
    res = stats.kstest(xs, cdf)
    return KSResult(float(res.statistic), float(res.pvalue))


def chi2_test(observed, expected) -> Chi2Result:
    """Goodness-of-fit chi-square of integer counts against expected counts.

    Expected counts are rescaled to the observed total (guarding drift from
    probabilities-times-n rounding); every expected cell must be >= 5 — use
    :func:`merge_rare_cells` first when it is not.
    """
    obs = np.asarray(observed, dtype=np.float64).ravel()
    exp = np.asarray(expected, dtype=np.float64).ravel()
    if obs.shape != exp.shape:
        raise ValueError("observed and expected must have the same shape")
    if obs.size < 2:
        raise ValueError("chi-square needs at least 2 cells")
    if np.any(exp < MIN_EXPECTED):
        raise ValueError(
            f"expected cell counts below {MIN_EXPECTED}; merge cells first"
        )
    exp = exp * (obs.sum() / exp.sum())
    stat, p = stats.chisquare(obs, f_exp=exp)
    return Chi2Result(float(stat), float(p), obs.size - 1)


def z_test(estimate: float, se: float, target: float, sided: str = "two") -> ZResult:
    """Normal test of ``estimate`` against ``target`` with standard error
    ``se``; ``sided`` is ``two``, ``greater`` (alternative: estimate above
    target) or ``less``."""
    if se <= 0.0:
        raise ValueError("standard error must be positive")
    z = (estimate - target) / se
    if sided == "two":
        p = 2.0 * stats.norm.sf(abs(z))
    elif sided == "greater":
        p = stats.norm.sf(z)
    elif sided == "less":
        p = stats.norm.cdf(z)
    else:
        raise ValueError("sided must be 'two', 'greater' or 'less'")
    return ZResult(float(z), float(p))


def merge_rare_cells(observed, expected, min_expected: float = MIN_EXPECTED):
    """Deterministically pool cells with small expected counts.

    Cells with ``expected < min_expected`` are merged (in index order) into a
    single pooled cell; if the pool is still too small it is folded into the
    smallest surviving cell.  Returns ``(observed, expected)`` arrays.
    """
    obs = np.asarray(observed, dtype=np.float64).ravel()
    exp = np.asarray(expected, dtype=np.float64).ravel()
    if obs.shape != exp.shape:
        raise ValueError("observed and expected must have the same shape")
    keep = exp >= min_expected
    if keep.all():
        return obs.copy(), exp.copy()
    obs_m = np.append(obs[keep], obs[~keep].sum())
    exp_m = np.append(exp[keep], exp[~keep].sum())
    if exp_m[-1] < min_expected:
        if exp_m.size < 3:
            raise ValueError("not enough mass to form valid chi-square cells")
        j = int(np.argmin(exp_m[:-1]))
        obs_m[j] += obs_m[-1]
        exp_m[j] += exp_m[-1]
        obs_m, exp_m = obs_m[:-1], exp_m[:-1]
    return obs_m, exp_m


def chi2_two_sample(counts_a, counts_b, min_expected: float = MIN_EXPECTED) -> Chi2Result:
    """Homogeneity chi-square of two independent count vectors over the same
    cells, pooling rare cells first (same deterministic rule as
    :func:`merge_rare_cells`, applied to the smaller row expectation)."""
    a = np.asarray(counts_a, dtype=np.float64).ravel()
    b = np.asarray(counts_b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError("count vectors must have the same shape")
    na, nb, total = a.sum(), b.sum(), a.sum() + b.sum()
    if na == 0 or nb == 0:
        raise ValueError("both samples must be non-empty")
    pooled = a + b
    min_row = np.minimum(na, nb) * pooled / total
    keep = min_row >= min_expected
    if not keep.all():
        a = np.append(a[keep], a[~keep].sum())
        b = np.append(b[keep], b[~keep].sum())
        min_row_m = np.append(min_row[keep], min_row[~keep].sum())
        if min_row_m[-1] < min_expected and min_row_m.size >= 3:
            j = int(np.argmin(min_row_m[:-1]))
            a[j] += a[-1]
            b[j] += b[-1]
            a, b = a[:-1], b[:-1]
    if a.size < 2:
        raise ValueError("fewer than 2 usable cells after pooling")
    stat, p, dof, _ = stats.chi2_contingency(np.vstack([a, b]), correction=False)
    return Chi2Result(float(stat), float(p), int(dof))


def binomial_z(count: int, n: int, p: float) -> float:
    """z statistic of ``count`` successes in ``n`` trials under null rate
    ``p`` (null standard error)."""
    if n <= 0:
        raise ValueError("need n > 0")
    if not 0.0 < p < 1.0:
        raise ValueError("null rate must lie strictly inside (0, 1)")
    return (count / n - p) / math.sqrt(p * (1.0 - p) / n)
