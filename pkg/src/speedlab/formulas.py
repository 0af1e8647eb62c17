"""Closed-form probabilities and densities for the speed law.

Conventions: particle speeds ``u`` live in [-1, 1]; the rescaled variable is
``u_hat = (1 + u) / 2`` in [0, 1] with complement ``1 - u_hat``.  Joint speed
laws put continuous mass off the diagonal and lower-dimensional mass on
coincidence strata, so evaluators return the stratum along with the value.

Three-point evaluation is *mirror-canonical*: each weak-order case is written
so the reflected input ``(u0, u1, u2) -> (-u2, -u1, -u0)`` executes literally
the same float operations, making the space-class symmetry exact in floating
point, not just up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "ExactValue",
    "LazyWalkSpec",
    "TwoPointDensity",
    "ThreePointDensity",
    "joint2_density",
    "walk_max_zero_prob",
    "dist2",
    "dist2_diagonal_asymptotic",
    "joint3_density",
    "vandermonde",
    "ordered_density",
    "empty_queue_prob",
    "rightmost_prob",
    "rightmost_intermediate_density",
    "equal_speeds_prob",
    "convoy_gap_pmf",
    "convoy_gap_tail",
    "ASEPValues",
    "asep_values",
]

_KINDS = ("probability", "density", "signed-density", "pmf")


@dataclass(frozen=True)
class ExactValue:
    """A closed-form number with its meaning and the claim it belongs to."""

    value: float
    kind: str
    source: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.kind == "probability" and not 0.0 <= self.value <= 1.0:
            raise ValueError("probability outside [0, 1]")
        if self.kind in ("density", "pmf") and self.value < 0.0:
            raise ValueError(f"{self.kind} must be nonnegative")


# ---------------------------------------------------------------------------
# two-point law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoPointDensity:
    continuous: float
    diagonal: float | None


def _check_speed(*us):
    for u in us:
        if not -1.0 <= u <= 1.0:
            raise ValueError(f"speed {u} outside [-1, 1]")


def joint2_density(u0: float, u1: float) -> TwoPointDensity:
    """Two-point speed density: continuous part ``1/4`` on ``u0 > u1`` and
    ``(u1 - u0)/4`` on ``u0 <= u1``, plus diagonal density ``(1 - u0^2)/8``
    when ``u0 == u1`` exactly.

    The three masses are 1/2 (swapped), 1/3 (unswapped) and 1/6 (diagonal).
    """
    _check_speed(u0, u1)
    f = 0.25 if u0 > u1 else (u1 - u0) / 4.0
    g = (1.0 - u0 * u0) / 8.0 if u0 == u1 else None
    return TwoPointDensity(f, g)


# ---------------------------------------------------------------------------
# lazy walk maximum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LazyWalkSpec:
    """Step law of a lazy +-1 walk: P(+1), P(-1), P(0) and the step count."""

    p_plus: float
    p_minus: float
    p_zero: float
    steps: int

    def __post_init__(self):
        probs = (self.p_plus, self.p_minus, self.p_zero)
        if any(p < 0.0 for p in probs):
            raise ValueError("step probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("step probabilities must sum to 1")
        if self.steps < 0:
            raise ValueError("step count must be >= 0")


def _stay_nonpositive_prob(p_plus: float, p_minus: float, p_zero: float, n: int) -> float:
    """P(S_1, ..., S_n all <= 0) for the lazy walk started at 0 — i.e. the
    running maximum M_n = max(0, S_1, ..., S_n) is still 0 after n steps.

    Dynamic programming over the sub-probability vector f[j] = P(S_k = -j,
    walk nonpositive so far); O(n^2)."""
    if n == 0:
        return 1.0
    f = np.zeros(n + 1, dtype=np.float64)
    f[0] = 1.0
    for _ in range(n):
        g = f * p_zero
        g[1:] += f[:-1] * p_minus
        g[:-1] += f[1:] * p_plus
        f = g
    return float(f.sum())


def walk_max_zero_prob(spec: LazyWalkSpec) -> float:
    """P(M_n = 0) for a *symmetric* lazy walk (p_plus = p_minus required).

    In the symmetric case this also equals P(S_n in {0, -1}) by reflection;
    that identity is a property of the law, not of this implementation, which
    uses the path-counting dynamic program directly.
    """
    if spec.p_plus != spec.p_minus:
        raise ValueError("symmetric walk required: p_plus must equal p_minus")
    return _stay_nonpositive_prob(spec.p_plus, spec.p_minus, spec.p_zero, spec.steps)


# ---------------------------------------------------------------------------
# two speeds at lattice distance k
# ---------------------------------------------------------------------------

_REGIONS = ("below", "diag", "above")


def dist2(k: int, region: str, x: float, y: float) -> float:
    """Joint law of ``(u_hat_0, u_hat_k)`` on threshold boxes.

    For ``0 <= x < y <= 1`` the three events partition ``{u_hat_k in (x, y)}``:

    * ``below``: P(x < u_hat_k < y < u_hat_0)        = (y-x)(1-y),
    * ``diag`` : P(both u_hat_0, u_hat_k in (x, y))  = (y-x)(1-x)y P(M=0),
    * ``above``: P(u_hat_0 < x < u_hat_k < y)        = the remainder,

    where M is the running maximum of a ``k-1``-step lazy walk with
    ``p_plus = x(1-y)`` and ``p_minus = (1-x)y``.  The three values sum to
    ``y - x`` exactly (in floating point too).
    """
    if region not in _REGIONS:
        raise ValueError(f"region must be one of {_REGIONS}")
    if not (0.0 <= x < y <= 1.0):
        raise ValueError("need thresholds 0 <= x < y <= 1")
    if k < 1:
        raise ValueError("lattice distance k must be >= 1")
    if region == "below":
        return (y - x) * (1.0 - y)
    p_plus = x * (1.0 - y)
    p_minus = (1.0 - x) * y
    m_zero = _stay_nonpositive_prob(p_plus, p_minus, 1.0 - p_plus - p_minus, k - 1)
    diag = (y - x) * (1.0 - x) * y * m_zero
    if region == "diag":
        return diag
    return (y - x) * x * y + (y - x) * (1.0 - x) * y * (1.0 - m_zero)


def dist2_diagonal_asymptotic(u: float, k: int) -> float:
    """Large-``k`` asymptotic of the diagonal mass at speed ``u``:
    sqrt((1 - u^2) / (16 pi k))."""
    _check_speed(u)
    if k < 1:
        raise ValueError("lattice distance k must be >= 1")
    return math.sqrt((1.0 - u * u) / (16.0 * math.pi * k))


# ---------------------------------------------------------------------------
# three-point law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreePointDensity:
    """Value of the three-point law with its stratum.

    ``dim`` is 3 off all diagonals (density w.r.t. du0 du1 du2), 2 on one
    coincidence plane, 1 on the full diagonal; ``order`` names the weak order
    of the inputs.
    """

    value: float
    dim: int
    order: str


def joint3_density(u0: float, u1: float, u2: float) -> ThreePointDensity:
    """Three-point speed law, classified by the exact weak order of inputs.

    Equality of inputs is taken literally (callers decide coincidence
    upstream).  Evaluation is arranged so that the reflected arguments
    ``(-u2, -u1, -u0)`` produce a bit-identical value.
    """
    _check_speed(u0, u1, u2)
    if u0 == u1 == u2:
        s = 1.0 - u0 * u0
        return ThreePointDensity((1.0 / 32.0) * (s * s), 1, "u0=u1=u2")
    if u0 == u1:
        if u2 > u1:
            val = (1.0 / 64.0) * (u2 - u1) * (1.0 - u1 * u1) * ((2.0 + 3.0 * u2) - u1)
            return ThreePointDensity(val, 2, "u0=u1<u2")
        val = (1.0 / 16.0) * (1.0 - u1 * u1)
        return ThreePointDensity(val, 2, "u2<u0=u1")
    if u1 == u2:
        if u0 < u1:
            val = (1.0 / 64.0) * (u1 - u0) * (1.0 - u1 * u1) * ((2.0 - 3.0 * u0) + u1)
            return ThreePointDensity(val, 2, "u0<u1=u2")
        val = (1.0 / 16.0) * (1.0 - u1 * u1)
        return ThreePointDensity(val, 2, "u1=u2<u0")
    if u0 == u2:
        if u1 > u0:
            val = (1.0 / 16.0) * (u1 - u0) * (1.0 - u0 * u0)
            return ThreePointDensity(val, 2, "u0=u2<u1")
        val = (1.0 / 16.0) * (u2 - u1) * (1.0 - u2 * u2)
        return ThreePointDensity(val, 2, "u1<u0=u2")

    # strict orders: canonical forms in the sorted values w0 < w1 < w2
    if u0 < u1 < u2:
        w0, w1, w2 = u0, u1, u2
        val = (3.0 / 32.0) * ((w1 - w0) * (w2 - w1)) * (w2 - w0)
        return ThreePointDensity(val, 3, "u0<u1<u2")
    if u0 < u2 < u1:
        w0, w1, w2 = u0, u2, u1
        val = (1.0 / 32.0) * (w1 - w0) * (((2.0 + 4.0 * w2) - 3.0 * w1) - 3.0 * w0)
        return ThreePointDensity(val, 3, "u0<u2<u1")
    if u1 < u0 < u2:
        w0, w1, w2 = u1, u0, u2
        val = (1.0 / 32.0) * (w2 - w1) * (((2.0 - 4.0 * w0) + 3.0 * w1) + 3.0 * w2)
        return ThreePointDensity(val, 3, "u1<u0<u2")
    if u1 < u2 < u0:
        w0, w1 = u1, u2
        val = (1.0 / 8.0) * (w1 - w0)
        return ThreePointDensity(val, 3, "u1<u2<u0")
    if u2 < u0 < u1:
        w1, w2 = u0, u1
        val = (1.0 / 8.0) * (w2 - w1)
        return ThreePointDensity(val, 3, "u2<u0<u1")
    val = 1.0 / 8.0
    return ThreePointDensity(val, 3, "u2<u1<u0")


# ---------------------------------------------------------------------------
# ordered speeds / Vandermonde family
# ---------------------------------------------------------------------------


def vandermonde(x, a: int | None = None, b: int | None = None) -> float:
    """Product of pairwise differences ``prod_{a <= i < j <= b} (x[j] - x[i])``
    over positions of ``x`` (inclusive bounds; defaults to the whole sequence).
    Empty and singleton ranges give 1."""
    xs = np.asarray(x, dtype=np.float64)
    a = 0 if a is None else int(a)
    b = xs.size - 1 if b is None else int(b)
    if not (0 <= a and b <= xs.size - 1):
        raise IndexError("range outside the sequence")
    val = 1.0
    for j in range(a, b + 1):
        for i in range(a, j):
            val *= xs[j] - xs[i]
    return val


def ordered_density(uhat) -> float:
    """Density ``n! * Δ(u_hat)`` of ``n`` ordered speeds on the increasing
    simplex of [0, 1] variables."""
    us = np.asarray(uhat, dtype=np.float64)
    if us.ndim != 1 or us.size < 1:
        raise ValueError("need a non-empty vector of u_hat values")
    if np.any((us < 0.0) | (us > 1.0)):
        raise ValueError("u_hat values must lie in [0, 1]")
    if np.any(np.diff(us) <= 0.0):
        raise ValueError("u_hat values must be strictly increasing")
    return math.factorial(us.size) * vandermonde(us)


def empty_queue_prob(x) -> float:
    """Closed form for the all-queues-empty probability of the ``n``-line
    construction at line densities ``x_1 < ... < x_n``:
    ``Δ(x) / prod_i x_i^(i-1) (1-x_i)^(n-i)``."""
    xs = np.asarray(x, dtype=np.float64)
    if xs.ndim != 1 or xs.size < 1:
        raise ValueError("need a non-empty vector of line densities")
    if np.any((xs <= 0.0) | (xs >= 1.0)) or np.any(np.diff(xs) <= 0.0):
        raise ValueError("line densities must be strictly increasing in (0, 1)")
    n = xs.size
    denom = 1.0
    for i in range(1, n + 1):
        denom *= xs[i - 1] ** (i - 1) * (1.0 - xs[i - 1]) ** (n - i)
    return vandermonde(xs) / denom


# ---------------------------------------------------------------------------
# fastest particle / equal speeds
# ---------------------------------------------------------------------------


def rightmost_prob(n: int, k: int) -> float:
    """Limiting probability that particle ``k`` of ``1..n`` ends up rightmost:
    ``2n / ((n+k-1)(n+k))``; sums to 1 over ``k``."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    return 2.0 * n / ((n + k - 1) * (n + k))


def rightmost_intermediate_density(n: int, k: int, y: float) -> float:
    """Integrand whose [0, 1] integral is :func:`rightmost_prob`:
    ``y^(n+k-2) ((n+1-k) - (n-k) y)``."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    return y ** (n + k - 2) * ((n + 1 - k) - (n - k) * y)


def equal_speeds_prob(n: int) -> float:
    """P(n + 1 consecutive particles share one speed) = n!^2 / (2n+1)!."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.factorial(n) ** 2 / math.factorial(2 * n + 1)


# ---------------------------------------------------------------------------
# convoy gaps
# ---------------------------------------------------------------------------


def _catalan_weights(kmax: int) -> np.ndarray:
    """w_k = P(K = 2k+1) = Catalan(k) / 2^(2k+1) for k = 0..kmax."""
    w = np.empty(kmax + 1, dtype=np.float64)
    w[0] = 0.5
    for k in range(kmax):
        w[k + 1] = w[k] * (2 * k + 1) / (2 * (k + 2))
    return w


def _gap_success(u: float) -> float:
    if not -1.0 < u < 1.0:
        raise ValueError("convoy speed must lie strictly inside (-1, 1)")
    return (1.0 - u * u) / 2.0


def convoy_gap_pmf(u: float, m: int) -> float:
    """P(distance from a convoy member at speed ``u`` to the next = m).

    The distance is a sum of ``K`` geometric(s) variables on {1, 2, ...} with
    ``s = (1 - u^2)/2``, where ``P(K = 2k+1) = Catalan(k)/2^(2k+1)``; for a
    fixed ``m`` only ``k <= (m-1)/2`` contribute, so the sum is exact."""
    if m < 1:
        raise ValueError("distance must be >= 1")
    s = _gap_success(u)
    kmax = (m - 1) // 2
    w = _catalan_weights(kmax)
    ks = np.arange(kmax + 1)
    terms = w * stats.nbinom.pmf(m - (2 * ks + 1), 2 * ks + 1, s)
    return float(terms.sum())


def convoy_gap_tail(u: float, m: int) -> float:
    """P(distance > m), evaluated analytically.

    Splits on K: for ``k <= k0`` (with ``k0`` far past ``s*m/2``) use the
    exact negative-binomial survival function; the remaining K-mass crosses
    ``m`` with probability exponentially close to 1, so it is added wholesale.
    The K-distribution's power-law tail forbids truncating it instead."""
    if m < 1:
        raise ValueError("distance must be >= 1")
    s = _gap_success(u)
    k0 = int(0.5 * s * m + 10.0 * math.sqrt(0.5 * s * m) + 50.0)
    w = _catalan_weights(k0)
    ks = np.arange(k0 + 1)
    sf = stats.nbinom.sf(m - (2 * ks + 1), 2 * ks + 1, s)
    return float((w * sf).sum() + (1.0 - w.sum()))


# ---------------------------------------------------------------------------
# asymmetric dynamics constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ASEPValues:
    """Closed forms for asymmetry parameter ``p``: drift ``rho = 2p - 1``,
    limiting swap probability ``(2-p)/3``, overtake slope ``rho/3``, the
    signed two-point density on the swapped region, and the conditional
    unswap probability given total adjacency time ``J``."""

    p: float
    rho: float
    swap_limit: float
    r_slope: float

    def signed_density(self, x: float, y: float) -> float:
        """Signed density ``(y - x) / (4 rho^2)`` on ``x < y`` (0 elsewhere)
        for speeds in [-rho, rho]."""
        if abs(x) > self.rho or abs(y) > self.rho:
            raise ValueError("speeds must lie in [-rho, rho]")
        if x >= y:
            return 0.0
        return (y - x) / (4.0 * self.rho * self.rho)

    def interaction_prob(self, j: float) -> float:
        """P(still unswapped | adjacency time J = j) = (1-p) + p e^{-j}."""
        if j < 0.0:
            raise ValueError("adjacency time must be >= 0")
        return (1.0 - self.p) + self.p * math.exp(-j)


def asep_values(p: float) -> ASEPValues:
    if not 0.5 < p <= 1.0:
        raise ValueError("asymmetry parameter p must lie in (1/2, 1]")
    rho = 2.0 * p - 1.0
    return ASEPValues(p=p, rho=rho, swap_limit=(2.0 - p) / 3.0, r_slope=rho / 3.0)
