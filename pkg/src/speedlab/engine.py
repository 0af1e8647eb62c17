"""Event-driven construction of exclusion dynamics on certified windows.

The driving randomness is a Poisson field: every bond of a window carries a
rate-1 clock, and each event carries a Bernoulli(p) mark plus an auxiliary
uniform.  Three drivers are supported:

``tasep``     every event sorts its pair into decreasing order;
``asep``      marked events sort decreasing, unmarked events sort increasing
              (the default asymmetric driver: rate-1 bonds, Bernoulli(p)
              marks, which keeps adjacency-time bookkeeping aligned with bond
              events);
``asep_pi``   events thinned to rate p apply the randomized sort: increasing
              pairs always swap, decreasing pairs swap with probability
              q = (1-p)/p (kept for the symmetry checks).

Finite windows are made honest by a *certificate*: per window edge an
influence front advances one site whenever an event occurs on the bond
adjacent to it, and sites never reached by either front provably carry the
same labels as the infinite-lattice process driven by the same noise
(induction over events: an event whose bond has both endpoints uncontaminated
acts identically in both processes).

The module also hosts the exact operator algebra on small symmetric groups:
the elementary bond operations become row-stochastic matrices over the m!
permutations, products of which give exact distributions of random update
words — the ground truth for distribution-level identities.

Performance note: replicated endpoint statistics use a documented fast path —
conditionally on the total event count N ~ Poisson(nbonds * T), the
time-ordered bond sequence is iid uniform over bonds, so no event times are
generated unless a run needs time resolution (checkpoints, integrals).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .core import Configuration, NoiseField, TrajectoryTracker

__all__ = [
    "Certificate",
    "SimResult",
    "simulate",
    "coupled_simulate",
    "restrict_noise",
    "OperatorMatrix",
    "exact_word_distribution",
    "permutation_order",
    "permutation_index",
    "inversion_pushforward",
    "EndpointBatch",
    "run_endpoint_batch",
    "PairLedgerBatch",
    "run_pair_ledger_batch",
    "run_small_window_batch",
]


class CertificateError(RuntimeError):
    """A request touched sites outside the certified-exact region."""


@dataclass(frozen=True)
class Certificate:
    """Exactness bounds: sites strictly between ``left`` and ``right`` carry
    the infinite-lattice state."""

    left: int
    right: int

    def __post_init__(self):
        if self.left > self.right:
            raise ValueError("certificate fronts crossed; window fully contaminated")

    def contains_site(self, site: int) -> bool:
        return self.left < site < self.right

    def covers(self, lo: int, hi: int) -> bool:
        return self.left < lo and hi < self.right


@dataclass
class SimResult:
    final: Configuration
    tracker: TrajectoryTracker
    certificate: Certificate
    horizon: float
    events: int


_MODES = ("tasep", "asep", "asep_pi")


def _check_mode_p(mode: str, p: float) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    if mode in ("asep", "asep_pi") and not 0.5 < p <= 1.0:
        raise ValueError("asymmetric dynamics require p in (1/2, 1]")


def simulate(
    initial: Configuration,
    noise: NoiseField,
    mode: str = "tasep",
    horizon: float | None = None,
) -> SimResult:
    """Run one certified window under a frozen noise field.

    Deterministic given ``(initial, noise, mode, horizon)``.  The noise field
    must cover all bonds ``initial.lo - 1 .. initial.hi`` (one phantom bond
    beyond each edge feeds the fronts); events on bonds outside the window
    are ignored.
    """
    mode = str(mode).lower()
    _check_mode_p(mode, noise.p)
    if horizon is None:
        horizon = noise.horizon
    if horizon > noise.horizon:
        raise ValueError(
            f"requested horizon {horizon} exceeds noise horizon {noise.horizon}"
        )
    if noise.first_bond > initial.lo - 1 or noise.last_bond < initial.hi:
        raise ValueError(
            "noise field does not cover the window's bonds "
            f"[{initial.lo - 1}, {initial.hi}]"
        )

    nevents = int(np.searchsorted(noise.times, horizon, side="right"))
    shift = noise.first_bond - (initial.lo - 1)
    bonds = noise.offsets[:nevents] + shift
    labels = initial.labels.copy()

    if mode == "tasep":
        fl, fr = _kernels.tasep_final(labels, bonds)
        applied = nevents
    elif mode == "asep":
        fl, fr = _kernels.asep_final(labels, bonds, noise.marks[:nevents])
        applied = nevents
    else:
        keep = noise.marks[:nevents]
        q = (1.0 - noise.p) / noise.p
        fl, fr = _kernels.pi_final(
            labels, bonds[keep], np.ascontiguousarray(noise.aux[:nevents][keep]), q
        )
        applied = int(keep.sum())

    final = Configuration(initial.lo, labels)
    return SimResult(
        final=final,
        tracker=TrajectoryTracker.from_config(final),
        certificate=Certificate(initial.lo + int(fl), initial.lo + int(fr)),
        horizon=float(horizon),
        events=applied,
    )


def coupled_simulate(
    initials: list[Configuration],
    noise: NoiseField,
    mode: str = "tasep",
    horizon: float | None = None,
) -> list[SimResult]:
    """Run several initial conditions under the *same* noise field.

    All runs consume identical events/marks/aux, which is what coupling
    arguments require; initial conditions must share the window.
    """
    if not initials:
        return []
    lo, length = initials[0].lo, initials[0].length
    for c in initials[1:]:
        if c.lo != lo or c.length != length:
            raise ValueError("coupled runs require identical windows")
    return [simulate(c, noise, mode, horizon) for c in initials]


def restrict_noise(noise: NoiseField, lo: int, length: int) -> NoiseField:
    """The sub-field driving a smaller window ``[lo, lo+length-1]``.

    Keeps exactly the events on the shared bonds (times, marks and aux
    untouched), so a run on the small window and a run on the big window are
    driven by the same randomness where they overlap.
    """
    first = lo - 1
    last = lo + length - 1
    if first < noise.first_bond or last > noise.last_bond:
        raise ValueError("restriction window is not contained in the noise field")
    sel = (noise.offsets >= first - noise.first_bond) & (
        noise.offsets <= last - noise.first_bond
    )
    return NoiseField(
        first_bond=first,
        nbonds=length + 1,
        horizon=noise.horizon,
        p=noise.p,
        offsets=(noise.offsets[sel] - (first - noise.first_bond)).copy(),
        times=noise.times[sel].copy(),
        marks=noise.marks[sel].copy(),
        aux=noise.aux[sel].copy(),
    )


# ---------------------------------------------------------------------------
# exact operator algebra on S_m
# ---------------------------------------------------------------------------

_MAX_GROUP = 7


@lru_cache(maxsize=None)
def permutation_order(m: int) -> tuple[tuple[int, ...], ...]:
    """Lexicographic enumeration of S_m as label tuples (state 0 = identity)."""
    if not 1 <= m <= _MAX_GROUP:
        raise ValueError(f"group size must be in [1, {_MAX_GROUP}] (factorial states)")
    return tuple(permutations(range(m)))


@lru_cache(maxsize=None)
def permutation_index(m: int) -> dict[tuple[int, ...], int]:
    return {perm: i for i, perm in enumerate(permutation_order(m))}


def _pair_targets(perm: tuple[int, ...], n: int) -> tuple[int, ...]:
    swapped = list(perm)
    swapped[n], swapped[n + 1] = swapped[n + 1], swapped[n]
    return tuple(swapped)


@dataclass(frozen=True)
class OperatorMatrix:
    """Row-stochastic transition matrix of one bond operation on S_m."""

    m: int
    entries: sp.csr_matrix
    label: str

    @staticmethod
    def _build(m: int, n: int, label: str, rule) -> "OperatorMatrix":
        order = permutation_order(m)
        index = permutation_index(m)
        if not 0 <= n <= m - 2:
            raise ValueError(f"bond index {n} outside [0, {m - 2}]")
        rows, cols, vals = [], [], []
        for i, perm in enumerate(order):
            for target, weight in rule(perm):
                rows.append(i)
                cols.append(index[target])
                vals.append(weight)
        mat = sp.csr_matrix(
            (vals, (rows, cols)), shape=(len(order), len(order)), dtype=np.float64
        )
        return OperatorMatrix(m, mat, label)

    @classmethod
    def sort(cls, m: int, n: int) -> "OperatorMatrix":
        """Deterministic sort-decreasing at bond ``n``."""

        def rule(perm):
            if perm[n] < perm[n + 1]:
                return [(_pair_targets(perm, n), 1.0)]
            return [(perm, 1.0)]

        return cls._build(m, n, f"sort[{n}]", rule)

    @classmethod
    def antisort(cls, m: int, n: int) -> "OperatorMatrix":
        """Deterministic sort-increasing at bond ``n``."""

        def rule(perm):
            if perm[n] > perm[n + 1]:
                return [(_pair_targets(perm, n), 1.0)]
            return [(perm, 1.0)]

        return cls._build(m, n, f"antisort[{n}]", rule)

    @classmethod
    def transpose(cls, m: int, n: int) -> "OperatorMatrix":
        """Unconditional swap at bond ``n``."""

        def rule(perm):
            return [(_pair_targets(perm, n), 1.0)]

        return cls._build(m, n, f"transpose[{n}]", rule)

    @classmethod
    def pi(cls, m: int, n: int, p: float) -> "OperatorMatrix":
        """Randomized sort at bond ``n``: equals q*transpose + (1-q)*sort."""
        if not 0.5 < p <= 1.0:
            raise ValueError("asymmetry parameter p must lie in (1/2, 1]")
        q = (1.0 - p) / p

        def rule(perm):
            if perm[n] < perm[n + 1]:
                return [(_pair_targets(perm, n), 1.0)]
            if q == 0.0:
                return [(perm, 1.0)]
            return [(_pair_targets(perm, n), q), (perm, 1.0 - q)]

        return cls._build(m, n, f"pi[{n}]@p={p}", rule)

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.entries.sum(axis=1)).ravel()

    def apply(self, dist: np.ndarray) -> np.ndarray:
        """Push a distribution one step: row vector times matrix."""
        return np.asarray(dist @ self.entries).ravel()

    def dense(self) -> np.ndarray:
        return self.entries.toarray()


def exact_word_distribution(word, m: int, p: float = 1.0) -> np.ndarray:
    """Exact law over S_m of a word of randomized sorts applied to the identity.

    ``word = (i_1, ..., i_n)`` is applied in chronological order: first the
    operation at bond ``i_1``, last the one at bond ``i_n``.  Returns the
    probability vector over :func:`permutation_order`.
    """
    order = permutation_order(m)  # validates m
    word = tuple(int(n) for n in word)
    for n in word:
        if not 0 <= n <= m - 2:
            raise ValueError(f"bond index {n} outside [0, {m - 2}]")
    dist = np.zeros(len(order), dtype=np.float64)
    dist[permutation_index(m)[tuple(range(m))]] = 1.0
    for n in word:
        dist = OperatorMatrix.pi(m, n, p).apply(dist)
    return dist


def inversion_pushforward(dist: np.ndarray, m: int) -> np.ndarray:
    """Law of the inverse permutation given the law of the permutation."""
    order = permutation_order(m)
    index = permutation_index(m)
    out = np.zeros_like(np.asarray(dist, dtype=np.float64))
    for i, perm in enumerate(order):
        inv = [0] * m
        for pos, lab in enumerate(perm):
            inv[lab] = pos
        out[index[tuple(inv)]] = dist[i]
    return out


# ---------------------------------------------------------------------------
# replicated batch runners (fast noise path)
# ---------------------------------------------------------------------------


@dataclass
class EndpointBatch:
    """Final positions of tracked labels over many independent replicas.

    ``positions[r, k]`` is the final site of ``tracked[k]`` in replica ``r``;
    ``cert_left/right`` are the per-replica certificate bounds and ``events``
    the per-replica event counts.
    """

    lo: int
    hi: int
    horizon: float
    mode: str
    p: float
    tracked: np.ndarray
    positions: np.ndarray
    cert_left: np.ndarray
    cert_right: np.ndarray
    events: np.ndarray
    labels: np.ndarray | None = None

    def speeds(self) -> np.ndarray:
        return (self.positions - self.tracked[None, :]) / self.horizon

    def certified(self) -> np.ndarray:
        """Replica-wise flag: every tracked position strictly inside the
        certificate."""
        return np.all(
            (self.positions > self.cert_left[:, None])
            & (self.positions < self.cert_right[:, None]),
            axis=1,
        )


def _spawned_generators(seed, replicas: int) -> list[np.random.SeedSequence]:
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(replicas)
    return np.random.SeedSequence(int(seed)).spawn(replicas)


def run_endpoint_batch(
    mode: str,
    lo: int,
    hi: int,
    horizon: float,
    replicas: int,
    tracked,
    seed,
    p: float = 1.0,
    keep_labels: bool = False,
    jobs: int = 1,
) -> EndpointBatch:
    """Replicated endpoint runs from the canonical condition.

    Fast noise path (no event times): per replica the event count is Poisson
    and bonds are iid uniform in time order; marks are drawn only for the
    asymmetric driver.  Results are written into slot ``r`` regardless of
    execution order, so ``jobs`` does not affect output.
    """
    mode = str(mode).lower()
    _check_mode_p(mode, p)
    length = hi - lo + 1
    nbonds = length + 1
    tracked = np.asarray(sorted(int(t) for t in np.atleast_1d(tracked)), dtype=np.int64)
    if tracked.size and (tracked.min() < lo or tracked.max() > hi):
        raise ValueError("tracked labels must start inside the window")
    positions = np.empty((replicas, tracked.size), dtype=np.int64)
    cert_left = np.empty(replicas, dtype=np.int64)
    cert_right = np.empty(replicas, dtype=np.int64)
    events = np.empty(replicas, dtype=np.int64)
    all_labels = (
        np.empty((replicas, length), dtype=np.int64) if keep_labels else None
    )
    seeds = _spawned_generators(seed, replicas)
    template = np.arange(lo, hi + 1, dtype=np.int64)
    mean_events = nbonds * horizon

    def one(r: int) -> None:
        rng = np.random.default_rng(seeds[r])
        n = int(rng.poisson(mean_events))
        bonds = rng.integers(0, nbonds, size=n, dtype=np.int64)
        labels = template.copy()
        if mode == "tasep":
            fl, fr = _kernels.tasep_final(labels, bonds)
        elif mode == "asep":
            marks = rng.random(n) < p
            fl, fr = _kernels.asep_final(labels, bonds, marks)
        else:
            keep = rng.random(n) < p
            aux = rng.random(int(keep.sum()))
            fl, fr = _kernels.pi_final(labels, bonds[keep], aux, (1.0 - p) / p)
        if tracked.size:
            inv = np.empty(length, dtype=np.int64)
            inv[labels - lo] = np.arange(length, dtype=np.int64)
            positions[r] = inv[tracked - lo] + lo
        cert_left[r] = lo + fl
        cert_right[r] = lo + fr
        events[r] = n
        if keep_labels:
            all_labels[r] = labels

    _run_slots(one, replicas, jobs)
    return EndpointBatch(
        lo, hi, float(horizon), mode, float(p), tracked,
        positions, cert_left, cert_right, events, all_labels,
    )


@dataclass
class PairLedgerBatch:
    """Per-replica time-resolved ledgers for one tracked label pair."""

    lo: int
    hi: int
    horizon: float
    p: float
    label_a: int
    label_b: int
    checkpoints: np.ndarray
    r_ck: np.ndarray         # (replicas, nck) overtake counts at checkpoints
    unswapped_ck: np.ndarray  # (replicas, nck) indicator pos_a < pos_b
    intq_ck: np.ndarray       # (replicas, nck) integral of the indicator
    j_total: np.ndarray       # (replicas,) adjacency time at the horizon
    interactions: np.ndarray  # (replicas,) events on the joining bond
    pos_a: np.ndarray
    pos_b: np.ndarray
    cert_left: np.ndarray
    cert_right: np.ndarray


def run_pair_ledger_batch(
    lo: int,
    hi: int,
    horizon: float,
    replicas: int,
    checkpoints,
    seed,
    p: float = 1.0,
    label_a: int = 0,
    label_b: int = 1,
    jobs: int = 1,
) -> PairLedgerBatch:
    """Replicated marked runs with exact time integrals for one label pair.

    Uses full time resolution (exponential-gap cumulative sums); dynamics are
    the marked driver (``p = 1`` reduces to pure sort-decreasing).
    """
    _check_mode_p("asep" if p < 1.0 else "tasep", p)
    length = hi - lo + 1
    nbonds = length + 1
    checkpoints = np.asarray(sorted(float(c) for c in np.atleast_1d(checkpoints)))
    if checkpoints.size == 0 or checkpoints[0] <= 0 or checkpoints[-1] > horizon:
        raise ValueError("checkpoints must lie in (0, horizon]")
    nck = checkpoints.size
    r_ck = np.empty((replicas, nck), dtype=np.int64)
    u_ck = np.empty((replicas, nck), dtype=np.int64)
    intq_ck = np.empty((replicas, nck), dtype=np.float64)
    j_total = np.empty(replicas, dtype=np.float64)
    inter = np.empty(replicas, dtype=np.int64)
    pos_a = np.empty(replicas, dtype=np.int64)
    pos_b = np.empty(replicas, dtype=np.int64)
    cert_left = np.empty(replicas, dtype=np.int64)
    cert_right = np.empty(replicas, dtype=np.int64)
    seeds = _spawned_generators(seed, replicas)
    template = np.arange(lo, hi + 1, dtype=np.int64)
    rate = float(nbonds)
    chunk = int(rate * horizon + 6.0 * math.sqrt(rate * horizon) + 16.0)

    def one(r: int) -> None:
        rng = np.random.default_rng(seeds[r])
        times = np.cumsum(rng.exponential(1.0 / rate, size=chunk))
        while times[-1] < horizon:  # pragma: no cover
            times = np.concatenate(
                [times, times[-1] + np.cumsum(rng.exponential(1.0 / rate, size=chunk))]
            )
        times = times[times < horizon]
        n = times.size
        bonds = rng.integers(0, nbonds, size=n, dtype=np.int64)
        marks = (
            rng.random(n) < p if p < 1.0 else np.ones(n, dtype=bool)
        )
        labels = template.copy()
        out = _kernels.pair_ledger(
            labels, bonds, times, marks, float(horizon), checkpoints,
            label_a, label_b,
        )
        r_ck[r], u_ck[r], intq_ck[r] = out[0], out[1], out[2]
        j_total[r], inter[r] = out[3], out[4]
        pos_a[r], pos_b[r] = lo + out[5], lo + out[6]
        cert_left[r], cert_right[r] = lo + out[7], lo + out[8]

    _run_slots(one, replicas, jobs)
    return PairLedgerBatch(
        lo, hi, float(horizon), float(p), label_a, label_b, checkpoints,
        r_ck, u_ck, intq_ck, j_total, inter, pos_a, pos_b, cert_left, cert_right,
    )


def run_small_window_batch(
    lo: int,
    hi: int,
    horizon: float,
    replicas: int,
    seed,
    p: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Many short independent runs, returning final labels and fronts.

    One flat pre-generated event stream feeds a single kernel call; replica
    ``r`` owns ``counts[r]`` consecutive events.  Returns ``(labels, fronts)``
    with shapes ``(replicas, length)`` and ``(replicas, 2)``; fronts are in
    lattice coordinates.
    """
    length = hi - lo + 1
    nbonds = length + 1
    rng = np.random.default_rng(
        seed if isinstance(seed, np.random.SeedSequence) else int(seed)
    )
    counts = rng.poisson(nbonds * horizon, size=replicas).astype(np.int64)
    total = int(counts.sum())
    bonds = rng.integers(0, nbonds, size=total, dtype=np.int64)
    marks = rng.random(total) < p if p < 1.0 else np.ones(total, dtype=bool)
    out_labels = np.empty((replicas, length), dtype=np.int64)
    out_fronts = np.empty((replicas, 2), dtype=np.int64)
    template = np.arange(lo, hi + 1, dtype=np.int64)
    _kernels.small_window_batch(template, counts, bonds, marks, out_labels, out_fronts)
    out_fronts += lo
    return out_labels, out_fronts


def _run_slots(task, replicas: int, jobs: int) -> None:
    """Run ``task(r)`` for every slot; output location fixed by slot index,
    so any execution order yields identical results."""
    if jobs <= 1:
        for r in range(replicas):
            task(r)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(task, range(replicas)))
