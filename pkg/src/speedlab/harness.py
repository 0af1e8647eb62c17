"""Statistical verification harness: claim specifications, replica
orchestration, the three hypothesis tests, and report generation.

A :class:`ClaimSpec` packages one checkable statement: an estimator (a
callable receiving a ``SeedSequence``), the exact target, the test type, and
the tolerance policy.  :func:`run_claims` executes a suite and produces a
:class:`TestReport` whose verdicts are a deterministic function of the claim
statistics and the policy; certificate violations inside estimators become
claim-level failures annotated "window too small" rather than crashes.

Tolerance policy: Monte Carlo point claims use 4-sigma bands (false alarm
about 6e-5 per claim); p-value tests (KS, chi-square) share a family-wise
significance of 0.001 via Bonferroni across the suite; deterministic identity
claims use absolute tolerances (1e-12, or quadrature-limited 1e-9); limit
values probed at finite horizon may instead carry an explicit acceptance
band that budgets for the finite-horizon bias.
"""

from __future__ import annotations

import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._stats import (
    Chi2Result,
    KSResult,
    ZResult,
    binomial_z,
    chi2_test,
    chi2_two_sample,
    ks_test,
    merge_rare_cells,
    z_test,
)
from .engine import (
    CertificateError,
    OperatorMatrix,
    exact_word_distribution,
    inversion_pushforward,
    permutation_order,
    run_endpoint_batch,
    run_pair_ledger_batch,
    run_small_window_batch,
)
from .formulas import (
    asep_values,
    convoy_gap_pmf,
    convoy_gap_tail,
    dist2,
    empty_queue_prob,
    equal_speeds_prob,
    joint2_density,
    joint3_density,
    rightmost_intermediate_density,
    rightmost_prob,
)
from .lab import adjacency_experiment, default_convoy_delta, stationarity_experiment
from .multiline import collapse, sample_stationary_batch

VERSION = "0.1.0"

__all__ = [
    "ClaimSpec",
    "ClaimData",
    "ClaimResult",
    "TestReport",
    "run_claims",
    "quick_suite",
    "full_suite",
    "ks_test",
    "chi2_test",
    "z_test",
    "chi2_two_sample",
    "merge_rare_cells",
    "binomial_z",
    "REPORT_SCHEMA",
    "KSResult",
    "Chi2Result",
    "ZResult",
]

FAMILY_ALPHA = 1e-3

_KINDS = ("two-sided-z", "one-sided-z", "ks", "chi2", "exact")
_PVALUE_KINDS = ("ks", "chi2")


@dataclass
class ClaimData:
    """What an estimator hands back; the fields a claim reads depend on its
    kind (z: estimate and se; ks: samples; chi2: observed and expected, or a
    precomputed statistic/p-value pair; exact: estimate)."""

    estimate: float | None = None
    se: float | None = None
    samples: np.ndarray | None = None
    observed: np.ndarray | None = None
    expected: np.ndarray | None = None
    statistic: float | None = None
    pvalue: float | None = None
    replicas: int = 0


@dataclass(frozen=True)
class ClaimSpec:
    """One verifiable claim: estimator, target, test type, tolerance policy.

    ``tolerance`` is a sigma multiple for the z kinds and an absolute bound
    for ``exact``; an ``exact`` claim may instead carry an explicit ``band``
    (absolute acceptance interval, used for limit values probed at finite
    horizon); ``direction`` orients one-sided z claims; KS and chi-square
    take their level from the suite's Bonferroni share.
    """

    claim_id: str
    kind: str
    estimator: Callable[[np.random.SeedSequence], ClaimData]
    exact: float | None = None
    cdf: Callable | None = None
    tolerance: float = 4.0
    band: tuple[float, float] | None = None
    direction: str = "greater"
    replicas: int = 0
    seed: int = 0
    description: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.kind in ("two-sided-z", "one-sided-z"):
            if self.exact is None or self.tolerance <= 0:
                raise ValueError("z claims need a target and a positive sigma band")
        if self.kind == "one-sided-z" and self.direction not in ("greater", "less"):
            raise ValueError("direction must be 'greater' or 'less'")
        if self.kind == "ks":
            if self.cdf is None:
                raise ValueError("ks claims need a reference cdf")
            if self.replicas < 20:
                raise ValueError("ks claims need a replica budget of at least 20")
        if self.kind == "exact":
            if self.band is not None:
                if self.band[0] > self.band[1]:
                    raise ValueError("band must be an ordered (low, high) interval")
            elif self.exact is None or self.tolerance < 0:
                raise ValueError("exact claims need a target and a nonnegative tolerance")


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    estimate: float | None
    ci_low: float | None
    ci_high: float | None
    exact: float | None
    statistic: float | None
    p_value: float | None
    verdict: str
    seed: int
    replicas: int
    runtime: float
    note: str = ""


@dataclass(frozen=True)
class TestReport:
    """Per-claim outcomes plus global metadata (seeds, runtimes, version)."""

    claims: tuple[ClaimResult, ...]
    family_alpha: float
    per_test_alpha: float
    version: str = VERSION

    @property
    def all_passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.claims)

    @property
    def num_failed(self) -> int:
        return sum(c.verdict == "fail" for c in self.claims)

    def to_json_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            x = float(x)
            return x if math.isfinite(x) else None

        claims = [
            {
                "id": c.claim_id,
                "estimate": num(c.estimate),
                "ci_low": num(c.ci_low),
                "ci_high": num(c.ci_high),
                "exact": num(c.exact),
                "p_value": num(c.p_value),
                "verdict": c.verdict,
                "seed": int(c.seed),
                "replicas": int(c.replicas),
            }
            for c in self.claims
        ]
        return {
            "version": self.version,
            "family_significance": self.family_alpha,
            "multiple_testing": (
                "Monte Carlo point claims use 4-sigma bands; KS/chi-square "
                f"claims share family-wise significance {self.family_alpha} "
                f"via Bonferroni and are each tested at {self.per_test_alpha:.3g}"
            ),
            "seeds": {c.claim_id: int(c.seed) for c in self.claims},
            "runtimes": {c.claim_id: round(c.runtime, 1) for c in self.claims},
            "annotations": {c.claim_id: c.note for c in self.claims if c.note},
            "claims": claims,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def text_table(self) -> str:
        rows = [
            f"{'claim':38s} {'estimate':>12s} {'exact':>12s} {'p-value':>9s} verdict"
        ]
        rows.append("-" * 84)
        for c in self.claims:
            est = (
                "-"
                if c.estimate is None or not math.isfinite(c.estimate)
                else f"{c.estimate:.6g}"
            )
            ext = "-" if c.exact is None else f"{c.exact:.6g}"
            pv = "-" if c.p_value is None else f"{c.p_value:.3g}"
            note = f"  [{c.note}]" if c.note else ""
            rows.append(
                f"{c.claim_id:38s} {est:>12s} {ext:>12s} {pv:>9s} {c.verdict}{note}"
            )
        rows.append("-" * 84)
        rows.append(
            f"{len(self.claims)} claims, {self.num_failed} failed; "
            f"family-wise significance {self.family_alpha} (Bonferroni)"
        )
        return "\n".join(rows)


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "version",
        "family_significance",
        "multiple_testing",
        "seeds",
        "runtimes",
        "claims",
    ],
    "properties": {
        "version": {"type": "string"},
        "family_significance": {"type": "number"},
        "multiple_testing": {"type": "string"},
        "seeds": {"type": "object", "additionalProperties": {"type": "integer"}},
        "runtimes": {"type": "object", "additionalProperties": {"type": "number"}},
        "annotations": {"type": "object", "additionalProperties": {"type": "string"}},
        "claims": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "id",
                    "estimate",
                    "ci_low",
                    "ci_high",
                    "exact",
                    "p_value",
                    "verdict",
                    "seed",
                    "replicas",
                ],
                "properties": {
                    "id": {"type": "string"},
                    "estimate": {"type": ["number", "null"]},
                    "ci_low": {"type": ["number", "null"]},
                    "ci_high": {"type": ["number", "null"]},
                    "exact": {"type": ["number", "null"]},
                    "p_value": {"type": ["number", "null"]},
                    "verdict": {"enum": ["pass", "fail"]},
                    "seed": {"type": "integer"},
                    "replicas": {"type": "integer"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def _evaluate(spec: ClaimSpec, alpha: float) -> ClaimResult:
    t0 = time.perf_counter()
    try:
        data = spec.estimator(np.random.SeedSequence(spec.seed))
    except CertificateError as err:
        return ClaimResult(
            spec.claim_id, None, None, None, spec.exact, None, None, "fail",
            spec.seed, spec.replicas, time.perf_counter() - t0,
            note=f"window too small: {err}",
        )
    replicas = data.replicas or spec.replicas
    estimate = data.estimate
    ci_low = ci_high = statistic = pvalue = None

    if spec.kind in ("two-sided-z", "one-sided-z"):
        sided = "two" if spec.kind == "two-sided-z" else spec.direction
        res = z_test(data.estimate, data.se, spec.exact, sided=sided)
        statistic, pvalue = res.statistic, res.pvalue
        ci_low = data.estimate - spec.tolerance * data.se
        ci_high = data.estimate + spec.tolerance * data.se
        if spec.kind == "two-sided-z":
            ok = abs(res.statistic) <= spec.tolerance
        elif spec.direction == "greater":
            ok = res.statistic <= spec.tolerance
        else:
            ok = res.statistic >= -spec.tolerance
    elif spec.kind == "ks":
        res = ks_test(data.samples, spec.cdf)
        estimate, statistic, pvalue = res.statistic, res.statistic, res.pvalue
        replicas = data.replicas or int(np.asarray(data.samples).size)
        ok = pvalue >= alpha
    elif spec.kind == "chi2":
        if data.pvalue is not None:
            statistic, pvalue = data.statistic, data.pvalue
            estimate = data.estimate if data.estimate is not None else data.statistic
        else:
            res = chi2_test(*merge_rare_cells(data.observed, data.expected))
            estimate, statistic, pvalue = res.statistic, res.statistic, res.pvalue
        ok = pvalue >= alpha
    else:  # exact
        if spec.band is not None:
            ci_low, ci_high = spec.band
            ok = spec.band[0] <= data.estimate <= spec.band[1]
        else:
            ci_low = spec.exact - spec.tolerance
            ci_high = spec.exact + spec.tolerance
            ok = abs(data.estimate - spec.exact) <= spec.tolerance

    return ClaimResult(
        spec.claim_id, estimate, ci_low, ci_high, spec.exact, statistic,
        pvalue, "pass" if ok else "fail", spec.seed, replicas,
        time.perf_counter() - t0,
    )


def run_claims(specs, parallelism: int = 1) -> TestReport:
    """Execute a suite of claims and report verdicts.

    Claims draw from independent seed sequences and results land in slots
    keyed by suite position, so ``parallelism`` never changes report content
    (runtimes aside).  Certificate violations inside estimators become
    claim-level failures annotated "window too small".
    """
    specs = list(specs)
    if not specs:
        raise ValueError("empty suite")
    ids = [s.claim_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("claim ids must be unique")
    n_pv = sum(1 for s in specs if s.kind in _PVALUE_KINDS)
    alpha = FAMILY_ALPHA / max(n_pv, 1)
    results: list[ClaimResult | None] = [None] * len(specs)

    def one(k: int) -> None:
        results[k] = _evaluate(specs[k], alpha)

    if parallelism <= 1:
        for k in range(len(specs)):
            one(k)
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            list(pool.map(one, range(len(specs))))
    return TestReport(tuple(results), FAMILY_ALPHA, alpha)


# ---------------------------------------------------------------------------
# quadrature helpers (Gauss-Legendre; exact for the polynomial densities)
# ---------------------------------------------------------------------------


def gauss_nodes(a: float, b: float, n: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]; exact for polynomials of
    degree <= 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def quad1(f, a: float, b: float, n: int = 24) -> float:
    x, w = gauss_nodes(a, b, n)
    return float(np.sum(w * np.array([f(t) for t in x])))


def quad_ordered2(f, lo: float, hi: float, n: int = 24) -> float:
    """Integral of ``f(a, b)`` over the ordered triangle ``lo < a < b < hi``."""
    total = 0.0
    xa, wa = gauss_nodes(lo, hi, n)
    for a, w_a in zip(xa, wa):
        xb, wb = gauss_nodes(a, hi, n)
        total += w_a * float(np.sum(wb * np.array([f(a, b) for b in xb])))
    return total


def quad_ordered3(f, lo: float, hi: float, n: int = 16) -> float:
    """Integral of ``f(a, b, c)`` over ``lo < a < b < c < hi``."""
    total = 0.0
    xa, wa = gauss_nodes(lo, hi, n)
    for a, w_a in zip(xa, wa):
        xb, wb = gauss_nodes(a, hi, n)
        for b, w_b in zip(xb, wb):
            xc, wc = gauss_nodes(b, hi, n)
            total += w_a * w_b * float(
                np.sum(wc * np.array([f(a, b, c) for c in xc]))
            )
    return total


def three_point_stratum_masses(n: int = 16) -> dict[str, float]:
    """Quadrature mass of each of the 13 strata of the three-point law."""
    masses: dict[str, float] = {}
    # six strict orders: place the sorted triple (a < b < c) into the pattern
    strict = {
        "u0<u1<u2": lambda a, b, c: (a, b, c),
        "u0<u2<u1": lambda a, b, c: (a, c, b),
        "u1<u0<u2": lambda a, b, c: (b, a, c),
        "u1<u2<u0": lambda a, b, c: (c, a, b),
        "u2<u0<u1": lambda a, b, c: (b, c, a),
        "u2<u1<u0": lambda a, b, c: (c, b, a),
    }
    for order, place in strict.items():
        masses[order] = quad_ordered3(
            lambda a, b, c, place=place: joint3_density(*place(a, b, c)).value,
            -1.0, 1.0, n,
        )
    pairs = {
        "u0=u1<u2": lambda a, b: (a, a, b),
        "u0<u1=u2": lambda a, b: (a, b, b),
        "u0=u2<u1": lambda a, b: (a, b, a),
        "u1<u0=u2": lambda a, b: (b, a, b),
        "u2<u0=u1": lambda a, b: (b, b, a),
        "u1=u2<u0": lambda a, b: (b, a, a),
    }
    for order, place in pairs.items():
        masses[order] = quad_ordered2(
            lambda a, b, place=place: joint3_density(*place(a, b)).value,
            -1.0, 1.0, 24,
        )
    masses["u0=u1=u2"] = quad1(lambda u: joint3_density(u, u, u).value, -1.0, 1.0)
    return masses


def two_point_masses() -> tuple[float, float, float]:
    """Quadrature masses (swapped, unswapped, diagonal) of the two-point law."""
    swapped = quad_ordered2(lambda a, b: joint2_density(b, a).continuous, -1.0, 1.0)
    unswapped = quad_ordered2(lambda a, b: joint2_density(a, b).continuous, -1.0, 1.0)
    diagonal = quad1(lambda u: joint2_density(u, u).diagonal, -1.0, 1.0)
    return swapped, unswapped, diagonal


def marginalize_three_point(u0: float, u1: float) -> float:
    """Integrate the three-point law over its last argument: continuous part
    (split at the kinks) plus coincidence atoms at ``u2 = u0``, ``u2 = u1``."""
    cuts = sorted({-1.0, u0, u1, 1.0})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        total += quad1(lambda u2: joint3_density(u0, u1, u2).value, a, b)
    total += joint3_density(u0, u1, u0).value
    if u1 != u0:
        total += joint3_density(u0, u1, u1).value
    return total


def uniform_cdf(lo: float, hi: float):
    def cdf(x):
        return np.clip((np.asarray(x, dtype=np.float64) - lo) / (hi - lo), 0.0, 1.0)

    return cdf


# ---------------------------------------------------------------------------
# exact-claim estimators (quick suite)
# ---------------------------------------------------------------------------

_P_GRID = (0.6, 0.75, 1.0)


def _operator_quadratic(_ss) -> ClaimData:
    worst = 0.0
    for p in _P_GRID:
        q = (1.0 - p) / p
        for n in range(3):
            pi = OperatorMatrix.pi(4, n, p).dense()
            rhs = q * np.eye(pi.shape[0]) + (1.0 - q) * pi
            worst = max(worst, float(np.abs(pi @ pi - rhs).max()))
    return ClaimData(estimate=worst)


def _operator_commutation(_ss) -> ClaimData:
    worst = 0.0
    for p in _P_GRID:
        a = OperatorMatrix.pi(4, 0, p).dense()
        b = OperatorMatrix.pi(4, 2, p).dense()
        worst = max(worst, float(np.abs(a @ b - b @ a).max()))
    return ClaimData(estimate=worst)


def _operator_braid(_ss) -> ClaimData:
    worst = 0.0
    for p in _P_GRID:
        for i in (0, 1):
            a = OperatorMatrix.pi(4, i, p).dense()
            b = OperatorMatrix.pi(4, i + 1, p).dense()
            worst = max(worst, float(np.abs(a @ b @ a - b @ a @ b).max()))
    return ClaimData(estimate=worst)


# Deterministic three-letter composites on three labels: expected output
# order for each input order (columns: the six orders of {0,1,2},
# lexicographic).  The right-most operator acts first.  The two halves sum to
# the same operator (per column, the halves' outputs agree as multisets).
COMPOSITE_TABLE = {
    ("t0", "s1", "s0"): ("210", "120", "210", "120", "120", "120"),
    ("s0", "s1", "t0"): ("210", "210", "201", "210", "201", "210"),
    ("s0", "t1", "s0"): ("210", "210", "210", "201", "210", "201"),
    ("t1", "s0", "s1"): ("210", "210", "201", "201", "201", "201"),
    ("s1", "s0", "t1"): ("210", "120", "210", "120", "210", "210"),
    ("s1", "t0", "s1"): ("210", "210", "210", "210", "120", "120"),
}
_TOP_HALF = (("t0", "s1", "s0"), ("s0", "s1", "t0"), ("s0", "t1", "s0"))
_BOTTOM_HALF = (("t1", "s0", "s1"), ("s1", "s0", "t1"), ("s1", "t0", "s1"))


def _composite_matrix(word) -> np.ndarray:
    mat = np.eye(6)
    for name in reversed(word):  # right-most factor acts first
        kind, bond = name[0], int(name[1])
        op = (
            OperatorMatrix.sort(3, bond)
            if kind == "s"
            else OperatorMatrix.transpose(3, bond)
        )
        mat = mat @ op.dense()
    return mat


def _composite_table_mismatches(_ss) -> ClaimData:
    order = permutation_order(3)
    mismatches = 0
    for word, expected in COMPOSITE_TABLE.items():
        mat = _composite_matrix(word)
        for col, want in enumerate(expected):
            target = order.index(tuple(int(ch) for ch in want))
            point = np.zeros(len(order))
            point[target] = 1.0
            row = np.zeros(len(order))
            row[col] = 1.0
            if not np.array_equal(row @ mat, point):
                mismatches += 1
    top = sum(_composite_matrix(w) for w in _TOP_HALF)
    bottom = sum(_composite_matrix(w) for w in _BOTTOM_HALF)
    if not np.array_equal(top, bottom):
        mismatches += 1
    return ClaimData(estimate=float(mismatches))


WORKED_LINES = np.array(
    [[0, 1, 1, 0],
     [1, 0, 0, 1],
     [1, 1, 0, 1]], dtype=np.uint8
)
WORKED_OUTPUT = (1, 3, 4, 2)
# queue counts after each processed column (rightmost first): [i][j] holds
# the class j+1 customers waiting in queue i+1
WORKED_TRACE = (
    ((0, 0), (0, 0)),
    ((1, 0), (0, 0)),
    ((2, 0), (0, 0)),
    ((1, 0), (0, 0)),
)


def _collapse_example(_ss) -> ClaimData:
    out, queues, trace = collapse(WORKED_LINES, return_trace=True)
    mism = int(tuple(out) != WORKED_OUTPUT)
    got = tuple(tuple(tuple(int(v) for v in row) for row in q) for q in trace)
    mism += int(got != WORKED_TRACE)
    mism += int(np.any(queues != np.asarray(WORKED_TRACE[-1])))
    return ClaimData(estimate=float(mism))


def _word_reversal(ss) -> ClaimData:
    rng = np.random.default_rng(ss)
    worst = 0.0
    for k in range(200):
        p = 0.75 if k % 2 else 1.0
        length = int(rng.integers(1, 9))
        word = rng.integers(0, 3, size=length).tolist()
        fwd = exact_word_distribution(word, 4, p)
        rev = inversion_pushforward(exact_word_distribution(word[::-1], 4, p), 4)
        worst = max(worst, float(np.abs(fwd - rev).max()))
    return ClaimData(estimate=worst, replicas=200)


def _two_point_mass_split(_ss) -> ClaimData:
    s, u, d = two_point_masses()
    worst = max(abs(s - 0.5), abs(u - 1.0 / 3.0), abs(d - 1.0 / 6.0))
    return ClaimData(estimate=worst)


def _dist2_sum_identity(_ss) -> ClaimData:
    worst = 0.0
    for k, x, y in ((4, 0.2, 0.6), (2, 0.1, 0.9), (7, 0.35, 0.55), (1, 0.2, 0.6)):
        total = sum(dist2(k, r, x, y) for r in ("below", "diag", "above"))
        worst = max(worst, abs(total - (y - x)))
    return ClaimData(estimate=worst)


def _dist2_adjacent_consistency(_ss) -> ClaimData:
    """The distant-pair cell mass at separation 1 must match the adjacent
    two-point law integrated over the same cell (both orders + diagonal)."""
    x, y = 0.2, 0.6
    lo, hi = 2.0 * x - 1.0, 2.0 * y - 1.0
    cont = quad_ordered2(lambda a, b: joint2_density(a, b).continuous, lo, hi)
    cont += quad_ordered2(lambda a, b: joint2_density(b, a).continuous, lo, hi)
    diag = quad1(lambda t: joint2_density(t, t).diagonal, lo, hi)
    return ClaimData(estimate=abs(cont + diag - dist2(1, "diag", x, y)))


def _three_point_total_mass(_ss) -> ClaimData:
    total = sum(three_point_stratum_masses().values())
    return ClaimData(estimate=abs(total - 1.0))


def _three_point_marginalization(_ss) -> ClaimData:
    worst = 0.0
    for u0, u1 in ((-0.5, 0.5), (0.3, -0.7), (0.2, 0.6), (-0.9, -0.1)):
        lhs = marginalize_three_point(u0, u1)
        worst = max(worst, abs(lhs - joint2_density(u0, u1).continuous))
    # coincidence line: marginalizing the u0 = u1 plane (plus the full
    # diagonal atom) must reproduce the two-point diagonal density
    for u in (-0.5, 0.0, 0.4):
        line = quad1(lambda u2: joint3_density(u, u, u2).value, -1.0, u)
        line += quad1(lambda u2: joint3_density(u, u, u2).value, u, 1.0)
        line += joint3_density(u, u, u).value
        worst = max(worst, abs(line - joint2_density(u, u).diagonal))
    return ClaimData(estimate=worst)


def _three_point_mirror(_ss) -> ClaimData:
    grid = np.linspace(-1.0, 1.0, 21)
    worst = 0.0
    for u0 in grid:
        for u1 in grid:
            for u2 in grid:
                a = joint3_density(u0, u1, u2)
                b = joint3_density(-u2, -u1, -u0)
                if a.dim != b.dim:
                    return ClaimData(estimate=math.inf)
                worst = max(worst, abs(a.value - b.value))
    return ClaimData(estimate=worst)


def _reversed_order_mass(_ss) -> ClaimData:
    mass = quad_ordered3(lambda a, b, c: joint3_density(c, b, a).value, -1.0, 1.0)
    return ClaimData(estimate=abs(mass - 1.0 / 6.0))


def _convoy_normalization(_ss) -> ClaimData:
    worst = 0.0
    for u in (0.0, 0.3, -0.6):
        m = 400
        total = sum(convoy_gap_pmf(u, k) for k in range(1, m + 1))
        worst = max(worst, abs(total + convoy_gap_tail(u, m) - 1.0))
    return ClaimData(estimate=worst)


def _rightmost_consistency(_ss) -> ClaimData:
    worst = 0.0
    for n in range(1, 9):
        worst = max(
            worst, abs(sum(rightmost_prob(n, k) for k in range(1, n + 1)) - 1.0)
        )
    for n in range(1, 7):
        for k in range(1, n + 1):
            integral = quad1(
                lambda y: rightmost_intermediate_density(n, k, y), 0.0, 1.0
            )
            worst = max(worst, abs(integral - rightmost_prob(n, k)))
    for n in range(1, 7):  # a new front-runner takes first place of n+1
        worst = max(worst, abs(rightmost_prob(n + 1, 1) - 2.0 / (n + 2)))
    return ClaimData(estimate=worst)


def _equal_speeds_links(_ss) -> ClaimData:
    worst = abs(equal_speeds_prob(1) - 1.0 / 6.0)
    worst = max(worst, abs(equal_speeds_prob(0) - 1.0))
    worst = max(worst, abs(equal_speeds_prob(2) - 4.0 / 120.0))
    return ClaimData(estimate=worst)


def _empty_queue_forms(_ss) -> ClaimData:
    x1, x2 = 0.3, 0.7
    direct = (x2 - x1) / ((1.0 - x1) * x2)
    worst = abs(empty_queue_prob([x1, x2]) - direct)
    worst = max(worst, abs(empty_queue_prob([0.2, 0.5, 0.8]) - 0.054 / 0.1024))
    worst = max(worst, abs(empty_queue_prob([0.4]) - 1.0))
    return ClaimData(estimate=worst)


def _asep_constant_links(_ss) -> ClaimData:
    vals = asep_values(0.7)
    worst = abs(vals.swap_limit - 13.0 / 30.0)
    worst = max(worst, abs(vals.rho - 0.4))
    worst = max(worst, abs(vals.r_slope - vals.rho / 3.0))
    # the signed density integrates to the overtake-count slope over x < y
    mass = quad_ordered2(vals.signed_density, -vals.rho, vals.rho)
    worst = max(worst, abs(mass - vals.r_slope))
    worst = max(worst, abs(vals.interaction_prob(0.0) - 1.0))
    return ClaimData(estimate=worst)


def quick_suite() -> tuple[ClaimSpec, ...]:
    """Deterministic identity claims: operator algebra, the queue-collapse
    worked example, and closed-form consistency.  Runs in seconds."""
    mk = ClaimSpec
    return (
        mk("operator-quadratic-identity", "exact", _operator_quadratic,
           exact=0.0, tolerance=1e-12, seed=101),
        mk("operator-distant-commutation", "exact", _operator_commutation,
           exact=0.0, tolerance=1e-12, seed=102),
        mk("operator-braid-identity", "exact", _operator_braid,
           exact=0.0, tolerance=1e-12, seed=103),
        mk("operator-composite-table", "exact", _composite_table_mismatches,
           exact=0.0, tolerance=0.0, seed=104),
        mk("queue-collapse-worked-example", "exact", _collapse_example,
           exact=0.0, tolerance=0.0, seed=105),
        mk("word-reversal-pushforward", "exact", _word_reversal,
           exact=0.0, tolerance=1e-12, seed=106, replicas=200),
        mk("two-point-mass-split", "exact", _two_point_mass_split,
           exact=0.0, tolerance=1e-9, seed=107),
        mk("distant-pair-sum-identity", "exact", _dist2_sum_identity,
           exact=0.0, tolerance=1e-12, seed=108),
        mk("distant-pair-adjacent-consistency", "exact", _dist2_adjacent_consistency,
           exact=0.0, tolerance=1e-9, seed=109),
        mk("three-point-total-mass", "exact", _three_point_total_mass,
           exact=0.0, tolerance=1e-9, seed=110),
        mk("three-point-marginalization", "exact", _three_point_marginalization,
           exact=0.0, tolerance=1e-9, seed=111),
        mk("three-point-mirror-symmetry", "exact", _three_point_mirror,
           exact=0.0, tolerance=0.0, seed=112),
        mk("reversed-order-constant-mass", "exact", _reversed_order_mass,
           exact=0.0, tolerance=1e-9, seed=113),
        mk("convoy-gap-normalization", "exact", _convoy_normalization,
           exact=0.0, tolerance=1e-9, seed=114),
        mk("rightmost-probability-consistency", "exact", _rightmost_consistency,
           exact=0.0, tolerance=1e-12, seed=115),
        mk("equal-speeds-consistency", "exact", _equal_speeds_links,
           exact=0.0, tolerance=1e-12, seed=116),
        mk("empty-queue-closed-form", "exact", _empty_queue_forms,
           exact=0.0, tolerance=1e-12, seed=117),
        mk("overtake-constant-links", "exact", _asep_constant_links,
           exact=0.0, tolerance=1e-9, seed=118),
    )


# ---------------------------------------------------------------------------
# Monte Carlo estimators (full suite)
# ---------------------------------------------------------------------------


def default_pad(t: float) -> int:
    """Window padding beyond the outermost tracked label: label travel (t)
    plus front travel (t) plus a 12-sigma fluctuation margin."""
    return int(2.0 * t + 12.0 * math.sqrt(t) + 50.0)


def _tracked_batch(ss, t, replicas, labels, mode="tasep", p=1.0, pad=None):
    if pad is None:
        pad = default_pad(t)
    lo = int(min(labels)) - pad
    hi = int(max(labels)) + pad
    batch = run_endpoint_batch(mode, lo, hi, t, replicas, labels, ss, p=p)
    bad = ~batch.certified()
    if bad.any():
        raise CertificateError(f"{int(bad.sum())} of {replicas} replicas uncertified")
    return batch


class _BatchCache:
    """Share one simulated batch between claims that read different
    functionals of it (same seed, same physical run)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def get(self, key, build):
        with self._lock:
            if key not in self._store:
                self._store[key] = build()
            return self._store[key]


def _binom(phat: float, replicas: int) -> ClaimData:
    se = math.sqrt(max(phat * (1.0 - phat), 1e-12) / replicas)
    return ClaimData(estimate=phat, se=se, replicas=replicas)


def _speed_marginal(batch, col: int) -> ClaimData:
    return ClaimData(samples=batch.speeds()[:, col],
                     replicas=batch.positions.shape[0])


def _strict_order_swapped(batch, margin) -> ClaimData:
    """Frequency of a clear overtake: final positions separated by more than
    ``margin`` sites.  The margin sheds equal-speed pairs (their separation
    stays at the stationary-gap scale) at the cost of a near-diagonal sliver
    of the strict-order mass; the two truncation errors cancel at the
    calibrated margin (see the suite notes)."""
    gap = batch.positions[:, 0] - batch.positions[:, 1]
    return _binom(float(np.mean(gap > margin)), batch.positions.shape[0])


def _swapped_at_horizon(batch) -> ClaimData:
    return _binom(
        float(np.mean(batch.positions[:, 0] > batch.positions[:, 1])),
        batch.positions.shape[0],
    )


def _convoy_freq(batch, n: int, delta: float) -> ClaimData:
    """Fraction of replicas whose first ``n`` labels share a convoy under the
    closeness rule (chained speed gaps at most ``delta``)."""
    speeds = batch.speeds()
    chained = np.ones(speeds.shape[0], dtype=bool)
    for k in range(n - 1):
        chained &= np.abs(speeds[:, k] - speeds[:, k + 1]) <= delta
    return _binom(float(chained.mean()), speeds.shape[0])


def _rightmost_maxdev(batch, cols) -> ClaimData:
    """Largest absolute deviation of the rightmost-label frequencies from
    their limits."""
    winner = np.argmax(batch.positions[:, cols], axis=1)
    replicas = batch.positions.shape[0]
    freq = np.bincount(winner, minlength=len(cols)) / replicas
    exact = np.array([rightmost_prob(len(cols), k)
                      for k in range(1, len(cols) + 1)])
    return ClaimData(estimate=float(np.abs(freq - exact).max()),
                     replicas=replicas)


def _rightmost_counts(batch, cols) -> ClaimData:
    winner = np.argmax(batch.positions[:, cols], axis=1)
    replicas = batch.positions.shape[0]
    observed = np.bincount(winner, minlength=len(cols))
    expected = np.array([rightmost_prob(len(cols), k)
                         for k in range(1, len(cols) + 1)]) * replicas
    return ClaimData(observed=observed, expected=expected, replicas=replicas)


def _reversed_order_freq(batch, cols, margin) -> ClaimData:
    """Frequency of a strictly decreasing position order (with the overtake
    margin) across the given label columns."""
    pos = batch.positions
    hits = np.ones(pos.shape[0], dtype=bool)
    for a, b in zip(cols[:-1], cols[1:]):
        hits &= pos[:, a] - pos[:, b] > margin
    return _binom(float(hits.mean()), pos.shape[0])


def _fast_addition_uniform(batch, c: float) -> ClaimData:
    """Rescaled speed of the front label conditioned on it alone clearing the
    threshold: the conditional law should be uniform above the threshold."""
    uh = (1.0 + batch.speeds()) / 2.0
    cond = (uh[:, 0] > c) & np.all(uh[:, 1:] < c, axis=1)
    samples = uh[cond, 0]
    if samples.size < 20:
        raise ValueError("conditioning left too few samples")
    return ClaimData(samples=samples, replicas=int(samples.size))


def _distant_pair_region(batch, k_col, x, y, region) -> ClaimData:
    replicas = batch.positions.shape[0]
    uh = (1.0 + batch.speeds()) / 2.0
    u0, uk = uh[:, 0], uh[:, k_col]
    in_cell = (uk > x) & (uk < y)
    if region == "below":
        hits = in_cell & (u0 > y)
    elif region == "diag":
        hits = in_cell & (u0 > x) & (u0 < y)
    else:
        hits = in_cell & (u0 < x)
    phat = float(np.mean(hits))
    se = math.sqrt(max(phat * (1.0 - phat), 1e-12) / replicas)
    return ClaimData(estimate=phat, se=se, replicas=replicas)


def _pair_ledger(ss, t, replicas, p, checkpoints):
    pad = default_pad(t)
    batch = run_pair_ledger_batch(-pad, 1 + pad, t, replicas, checkpoints, ss, p=p)
    inside = (
        (batch.pos_a > batch.cert_left) & (batch.pos_a < batch.cert_right)
        & (batch.pos_b > batch.cert_left) & (batch.pos_b < batch.cert_right)
    )
    if not inside.all():
        raise CertificateError(f"{int((~inside).sum())} replicas uncertified")
    return batch


def _asep_q_final(batch) -> ClaimData:
    return _binom(
        float(np.mean(batch.positions[:, 0] < batch.positions[:, 1])),
        batch.positions.shape[0],
    )


def _asep_q_monotone(ledger) -> ClaimData:
    """Worst paired z for an increase between consecutive checkpoints; the
    unswapped probability is nonincreasing, so this should stay below 4."""
    u = ledger.unswapped_ck.astype(np.float64)
    replicas = u.shape[0]
    worst = -math.inf
    for k in range(u.shape[1] - 1):
        diff = u[:, k + 1] - u[:, k]
        se = float(diff.std(ddof=1)) / math.sqrt(replicas)
        worst = max(worst, float(diff.mean()) / max(se, 1e-12))
    return ClaimData(estimate=worst, se=1.0, replicas=replicas)


def _asep_r_slope(ledger) -> ClaimData:
    t = ledger.checkpoints[-1]
    counts = ledger.r_ck[:, -1]
    replicas = counts.shape[0]
    slope = float(np.mean(counts)) / t
    se = float(np.std(counts, ddof=1)) / math.sqrt(replicas) / t
    return ClaimData(estimate=slope, se=se, replicas=replicas)


def _asep_derivative_identity(ledger, i, j) -> ClaimData:
    """Paired ledger residual: the overtake-count increment minus its exact
    mean given the unswapped occupation, (p-1)dt + dIntQ, has mean zero."""
    p = ledger.p
    dt = ledger.checkpoints[j] - ledger.checkpoints[i]
    d = (
        (ledger.r_ck[:, j] - ledger.r_ck[:, i]).astype(np.float64)
        - (p - 1.0) * dt
        - (ledger.intq_ck[:, j] - ledger.intq_ck[:, i])
    )
    replicas = d.shape[0]
    se = float(d.std(ddof=1)) / math.sqrt(replicas)
    return ClaimData(estimate=float(d.mean()), se=se, replicas=replicas)


def _regression_claim(report, which) -> ClaimData:
    reg = report.entries[0].regression
    if which == "slope":
        return ClaimData(estimate=reg.slope, se=reg.slope_se,
                         replicas=report.replicas)
    return ClaimData(estimate=reg.intercept, se=reg.intercept_se,
                     replicas=report.replicas)


def _interaction_always_swaps(ss, t, replicas) -> ClaimData:
    report = adjacency_experiment([(0, 1)], t, replicas=replicas, p=1.0, seed=ss)
    entry = report.entries[0]
    if entry.swapped_given_interaction is None:
        raise ValueError("no interacting replicas at this horizon")
    return ClaimData(
        estimate=entry.swapped_given_interaction, replicas=entry.interacted
    )


def _stationarity_claim(report, which) -> ClaimData:
    res = report.before_vs_after if which == "stability" else report.before_vs_reference
    return ClaimData(estimate=res.statistic, statistic=res.statistic,
                     pvalue=res.pvalue, replicas=report.replicas)


def _flatness_claim(ss, t, replicas, p) -> ClaimData:
    """Worst cell deviation of the rescaled label/speed histogram from the
    flat limit profile, on a 4x4 grid over [-2,2] x [-rho,rho].

    The limit assigns each cell ``t * dx * du / (2 rho)`` points per replica
    (125 here); the deviation of the across-replica mean count is reported in
    units of the cell's own Poisson scale ``sqrt(target)``, the resolution at
    which a 4x4 histogram of ~t points can distinguish profiles.  (The
    standard error of the mean is far smaller, but the finite-horizon bias is
    a fixed offset, so an SE-of-the-mean yardstick would measure horizon
    truncation, not flatness.)"""
    rho = 2.0 * p - 1.0
    span = 2 * int(t)
    labels = np.arange(-span, span)
    batch = _tracked_batch(ss, t, replicas, labels, mode="asep", p=p)
    speeds = batch.speeds()
    x_edges = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * t
    u_edges = np.array([-1.0, -0.5, 0.0, 0.5, 1.0]) * rho
    worst = 0.0
    for i in range(4):
        band = (labels >= x_edges[i]) & (labels < x_edges[i + 1])
        sub = speeds[:, band]
        target = int(band.sum()) * 0.25
        for j in range(4):
            if j < 3:
                inside = (sub >= u_edges[j]) & (sub < u_edges[j + 1])
            else:
                inside = (sub >= u_edges[j]) & (sub <= u_edges[j + 1])
            counts = inside.sum(axis=1)
            dev = abs(float(counts.mean()) - target) / math.sqrt(target)
            worst = max(worst, dev)
    return ClaimData(estimate=worst, se=1.0, replicas=replicas)


def _symmetry_claim(ss, t, replicas, span=1, chunk=25_000) -> ClaimData:
    """Two-sample test of the finite-time inversion symmetry: the positions
    of labels ``-span..span`` (one run) against the labels at sites
    ``-span..span`` (an independent run), compared as categorical triples.

    A configuration is a permutation of the lattice, and its law at any fixed
    time is invariant under inversion composed with negation of both axes;
    positions-of-labels in one sample must therefore match labels-at-sites in
    the other.  Both reductions come from certified small-window runs."""
    pad = default_pad(t)
    lo, hi = -span - pad, span + pad
    length = hi - lo + 1
    need = np.arange(-span, span + 1)
    ss_x, ss_y = ss.spawn(2)
    codes = []
    for sub, invert in ((ss_x, True), (ss_y, False)):
        parts = []
        left = replicas
        for piece in sub.spawn(max(1, -(-replicas // chunk))):
            n = min(chunk, left)
            left -= n
            labels, fronts = run_small_window_batch(lo, hi, t, n, piece)
            if invert:
                order = np.argsort(labels, axis=1)
                trip = order[:, need - lo] + lo
                ok = (trip > fronts[:, :1]) & (trip < fronts[:, 1:])
            else:
                trip = labels[:, need - lo]
                ok = (fronts[:, :1] < -span) & (fronts[:, 1:] > span)
            if not ok.all():
                raise CertificateError(
                    f"{int((~ok.all(axis=1)).sum())} replicas uncertified"
                )
            enc = np.zeros(n, dtype=np.int64)
            for k in range(trip.shape[1]):
                enc = enc * length + (trip[:, k] - lo)
            parts.append(enc)
        codes.append(np.concatenate(parts))
    cats = np.unique(np.concatenate(codes))
    counts = [
        np.bincount(np.searchsorted(cats, c), minlength=cats.size) for c in codes
    ]
    res = chi2_two_sample(counts[0], counts[1])
    return ClaimData(estimate=res.statistic, statistic=res.statistic,
                     pvalue=res.pvalue, replicas=2 * replicas)


def _stationary_pair_freq(seqs, a, b) -> ClaimData:
    """Adjacent-pair frequency ``(a, b)`` in stationary class sequences, with
    the standard error taken across independent sequences (adjacent pairs
    within one sequence are correlated)."""
    hits = (seqs[:, :-1] == a) & (seqs[:, 1:] == b)
    freq = hits.mean(axis=1)
    samples = freq.shape[0]
    se = float(freq.std(ddof=1)) / math.sqrt(samples)
    return ClaimData(estimate=float(freq.mean()), se=se,
                     replicas=samples * (seqs.shape[1] - 1))


def full_suite(seed: int = 20260815, scale: float = 1.0) -> tuple[ClaimSpec, ...]:
    """The quick suite plus Monte Carlo claims at desk scale (roughly ten
    minutes single-core; pass ``parallelism`` to :func:`run_claims` to
    overlap batches).  Claims that probe the same law share one cached
    replica batch, keyed by the seed, so common random numbers carry across
    related claims and the heavy horizon-500 runs are built once.

    ``scale`` multiplies replica budgets: a dev knob for smoke runs.
    Sub-unit scales weaken the power the acceptance bands were sized for and
    can starve the conditioned fast-addition sample, so scaled runs are for
    plumbing checks, not verification.

    Three claims fail by design at these horizons, each for a quantified
    finite-horizon reason recorded in its description: the one-label speed
    marginal carries ~3% of its mass just outside [-1,1] at t=500 (diffusive
    overshoot, decaying like t^(-1/2)), which exceeds the KS resolution
    ~0.022 at 10^4 replicas; the convoy closeness rule delta = t^(-1/4)
    over-counts convoys by the near-diagonal continuous mass ~0.42*delta
    (~0.075 at t=1000) against a +-0.03 band; and the overtake-count slope
    approaches rho/3 with a ~t^(-1/2) excess still at +0.020 at t=400
    against a +-0.01 band."""

    def budget(n: int) -> int:
        return max(60, int(round(n * scale)))

    mk = ClaimSpec
    r_pair = budget(10_000)   # horizon-500 batch, labels 0..3: seven claims
    r_conv = budget(1500)     # horizon-1000 batch, labels 0..2
    r_dist = budget(2000)     # horizon-800 batch, labels 0 and 4
    r_asep = budget(10_000)   # asymmetric horizon-500 batch, labels 0..1
    r_ledg = budget(2500)     # asymmetric pair ledger to horizon 400
    r_reg = budget(30_000)
    r_stat = budget(10_000)
    r_sym = budget(100_000)
    r_seq = budget(5000)      # stationary sequences of 201 sites: 10^6 pairs
    caches = [_BatchCache() for _ in range(7)]

    def pair_batch(ss):
        return caches[0].get(
            ss.entropy, lambda: _tracked_batch(ss, 500.0, r_pair, [0, 1, 2, 3])
        )

    def conv_batch(ss):
        return caches[1].get(
            ss.entropy, lambda: _tracked_batch(ss, 1000.0, r_conv, [0, 1, 2])
        )

    def dist_batch(ss):
        return caches[2].get(
            ss.entropy, lambda: _tracked_batch(ss, 800.0, r_dist, [0, 4])
        )

    def asep_batch(ss):
        return caches[3].get(
            ss.entropy,
            lambda: _tracked_batch(ss, 500.0, r_asep, [0, 1], mode="asep", p=0.7),
        )

    def ledger(ss):
        return caches[4].get(
            ss.entropy,
            lambda: _pair_ledger(ss, 400.0, r_ledg, 0.7,
                                 [50.0, 100.0, 200.0, 400.0]),
        )

    def reg_report(ss):
        return caches[5].get(
            ss.entropy,
            lambda: adjacency_experiment([(0, 1)], 50.0, replicas=r_reg,
                                         p=0.7, seed=ss),
        )

    def stat_report(ss):
        # t1 = 800: the projected pair law approaches the queue law like
        # ~1/t1 in chi-square noncentrality (threshold blurring by the
        # O(t^(-1/2)) speed-estimate noise); 800 pushes the residual well
        # under the test's resolution at 10^4 replicas
        return caches[6].get(
            ss.entropy,
            lambda: stationarity_experiment((0.3, 0.6), 800.0, 100.0,
                                            r_stat, seed=ss,
                                            reference_samples=200_000),
        )

    seq_cache = _BatchCache()

    def seq_pairs(ss, a, b):
        seqs = seq_cache.get(
            ss.entropy,
            lambda: sample_stationary_batch((0.3, 0.3, 0.4), 201, r_seq,
                                            rng=np.random.default_rng(ss)),
        )
        return _stationary_pair_freq(seqs, a, b)

    margin = round(math.sqrt(500.0))  # past the O(1) convoy gaps, small vs t
    x1, x2 = 0.3, 0.6         # stationary projection thresholds
    cx, cy = 0.2, 0.6         # distant-pair cell on the u_hat scale
    mc = (
        mk("speed-marginal-uniform", "ks",
           lambda ss: _speed_marginal(pair_batch(ss), 0),
           cdf=uniform_cdf(-1.0, 1.0), replicas=r_pair, seed=seed + 1,
           description="one-label speed sample vs the uniform limit law "
                       "(fails at this horizon: ~3% diffusive overshoot "
                       "beyond each edge exceeds the KS resolution)"),
        mk("strict-order-swapped-mass", "two-sided-z",
           lambda ss: _strict_order_swapped(pair_batch(ss), margin),
           exact=0.5, tolerance=4.0, replicas=r_pair, seed=seed + 1,
           description="P(first label strictly overtakes) via a sqrt(t) "
                       "separation margin that sheds convoy ties"),
        mk("swapped-at-horizon-band", "exact",
           lambda ss: _swapped_at_horizon(pair_batch(ss)),
           exact=2.0 / 3.0, band=(2.0 / 3.0 - 0.02, 2.0 / 3.0),
           replicas=r_pair, seed=seed + 1,
           description="P(adjacent pair in swapped order at the horizon): "
                       "strict overtakes plus convoy ties, approaching 2/3 "
                       "from below"),
        mk("rightmost-of-three-band", "exact",
           lambda ss: _rightmost_maxdev(pair_batch(ss), [1, 2, 3]),
           exact=0.0, band=(0.0, 0.02), replicas=r_pair, seed=seed + 1,
           description="worst deviation of the rightmost-label frequencies "
                       "from (1/2, 3/10, 1/5)"),
        mk("rightmost-of-three-counts", "chi2",
           lambda ss: _rightmost_counts(pair_batch(ss), [1, 2, 3]),
           replicas=r_pair, seed=seed + 1,
           description="which of three consecutive labels ends rightmost "
                       "(count route for the same frequencies)"),
        mk("reversed-order-frequency", "exact",
           lambda ss: _reversed_order_freq(pair_batch(ss), [1, 2, 3], margin),
           exact=1.0 / 6.0, band=(1.0 / 6.0 - 0.025, 1.0 / 6.0 + 0.025),
           replicas=r_pair, seed=seed + 1,
           description="three labels in strictly reversed order (margin "
                       "rule): sampler route to the 1/6 quadrature constant"),
        mk("fast-addition-uniform", "ks",
           lambda ss: _fast_addition_uniform(pair_batch(ss), 0.5),
           cdf=uniform_cdf(0.5, 1.0), replicas=r_pair, seed=seed + 1,
           description="front-label rescaled speed given it alone clears "
                       "1/2: uniform above the threshold"),
        mk("convoy-pair-frequency", "exact",
           lambda ss: _convoy_freq(conv_batch(ss), 2,
                                   default_convoy_delta(1000.0)),
           exact=1.0 / 6.0, band=(1.0 / 6.0 - 0.03, 1.0 / 6.0 + 0.03),
           replicas=r_conv, seed=seed + 2,
           description="adjacent equal-speed frequency under the t^(-1/4) "
                       "closeness rule (fails at this horizon: the rule "
                       "over-counts by the near-diagonal mass ~0.42*delta)"),
        mk("convoy-triple-frequency", "exact",
           lambda ss: _convoy_freq(conv_batch(ss), 3,
                                   default_convoy_delta(1000.0)),
           exact=1.0 / 30.0, band=(1.0 / 30.0 - 0.01, 1.0 / 30.0 + 0.01),
           replicas=r_conv, seed=seed + 2,
           description="first three labels sharing a convoy under the "
                       "t^(-1/4) rule (fails at this horizon: two closeness "
                       "tubes each over-count as in the pair case)"),
        mk("distant-pair-below", "two-sided-z",
           lambda ss: _distant_pair_region(dist_batch(ss), 1, cx, cy, "below"),
           exact=dist2(4, "below", cx, cy), tolerance=4.0,
           replicas=r_dist, seed=seed + 3,
           description="separation-4 pair: cell mass with the front label "
                       "above the cell"),
        mk("distant-pair-diag", "two-sided-z",
           lambda ss: _distant_pair_region(dist_batch(ss), 1, cx, cy, "diag"),
           exact=dist2(4, "diag", cx, cy), tolerance=4.0,
           replicas=r_dist, seed=seed + 3,
           description="separation-4 pair: both labels inside the cell"),
        mk("distant-pair-above", "two-sided-z",
           lambda ss: _distant_pair_region(dist_batch(ss), 1, cx, cy, "above"),
           exact=dist2(4, "above", cx, cy), tolerance=4.0,
           replicas=r_dist, seed=seed + 3,
           description="separation-4 pair: cell mass with the front label "
                       "below the cell"),
        mk("overtake-unswapped-limit", "exact",
           lambda ss: _asep_q_final(asep_batch(ss)),
           exact=13.0 / 30.0, band=(13.0 / 30.0, 13.0 / 30.0 + 0.02),
           replicas=r_asep, seed=seed + 4,
           description="asymmetric pair unswapped probability vs its limit "
                       "(approach is one-sided from above)"),
        mk("overtake-unswapped-monotone", "one-sided-z",
           lambda ss: _asep_q_monotone(ledger(ss)),
           exact=0.0, tolerance=4.0, direction="greater",
           replicas=r_ledg, seed=seed + 5,
           description="unswapped probability nonincreasing across "
                       "checkpoints (worst paired z)"),
        mk("overtake-count-slope", "exact",
           lambda ss: _asep_r_slope(ledger(ss)),
           exact=0.4 / 3.0, band=(0.4 / 3.0 - 0.01, 0.4 / 3.0 + 0.01),
           replicas=r_ledg, seed=seed + 5,
           description="mean overtake count over the horizon vs rho/3 "
                       "(fails at this horizon: the t^(-1/2) excess is "
                       "still twice the band half-width at t=400)"),
        mk("overtake-derivative-identity", "two-sided-z",
           lambda ss: _asep_derivative_identity(ledger(ss), 2, 3),
           exact=0.0, tolerance=4.0, replicas=r_ledg, seed=seed + 5,
           description="overtake-count increment minus its exact conditional "
                       "mean (paired, mean zero)"),
        mk("interaction-regression-slope", "exact",
           lambda ss: _regression_claim(reg_report(ss), "slope"),
           exact=0.7, band=(0.67, 0.73), replicas=r_reg, seed=seed + 6,
           description="unswapped-vs-exp(-J) regression slope = p"),
        mk("interaction-regression-intercept", "exact",
           lambda ss: _regression_claim(reg_report(ss), "intercept"),
           exact=0.3, band=(0.27, 0.33), replicas=r_reg, seed=seed + 6,
           description="unswapped-vs-exp(-J) regression intercept = 1-p"),
        mk("interaction-always-swaps", "exact",
           lambda ss: _interaction_always_swaps(ss, 200.0, budget(2000)),
           exact=1.0, tolerance=0.0, replicas=budget(2000), seed=seed + 7,
           description="symmetric-free driver: every interacting pair ends "
                       "swapped, exactly"),
        mk("finite-time-symmetry", "chi2",
           lambda ss: _symmetry_claim(ss, 3.0, r_sym),
           replicas=2 * r_sym, seed=seed + 8,
           description="positions of labels -1..1 vs labels at sites -1..1 "
                       "(independent runs): the inversion symmetry of the "
                       "finite-time law, as a two-sample test"),
        mk("projected-pair-stability", "chi2",
           lambda ss: _stationarity_claim(stat_report(ss), "stability"),
           replicas=r_stat, seed=seed + 9,
           description="projected class pair at the origin: before vs after "
                       "extra evolution (two-sample)"),
        mk("projected-pair-queue-reference", "chi2",
           lambda ss: _stationarity_claim(stat_report(ss), "reference"),
           replicas=r_stat, seed=seed + 9,
           description="projected class pair vs the queue-construction "
                       "sampler (two-sample)"),
        mk("stationary-pair-one-two", "two-sided-z",
           lambda ss: seq_pairs(ss, 1, 2),
           exact=x1 * x2 * (x2 - x1), tolerance=4.0,
           replicas=r_seq * 200, seed=seed + 10,
           description="stationary adjacent pair (1,2) frequency vs "
                       "x1*x2*(x2-x1)"),
        mk("stationary-pair-two-two", "two-sided-z",
           lambda ss: seq_pairs(ss, 2, 2),
           exact=(1.0 - x1) * x2 * (x2 - x1), tolerance=4.0,
           replicas=r_seq * 200, seed=seed + 10,
           description="stationary adjacent pair (2,2) frequency vs "
                       "(1-x1)*x2*(x2-x1)"),
        mk("stationary-pair-three-two", "two-sided-z",
           lambda ss: seq_pairs(ss, 3, 2),
           exact=(1.0 - x2) * (x2 - x1), tolerance=4.0,
           replicas=r_seq * 200, seed=seed + 10,
           description="stationary adjacent pair (3,2) frequency vs "
                       "(1-x2)*(x2-x1)"),
        mk("rescaled-measure-flatness", "one-sided-z",
           lambda ss: _flatness_claim(ss, 500.0, budget(100), 0.7),
           exact=0.0, tolerance=4.0, direction="greater",
           replicas=budget(100), seed=seed + 11,
           description="rescaled label/speed histogram vs the flat limit "
                       "profile (worst cell, Poisson-scale units)"),
    )
    return quick_suite() + mc
