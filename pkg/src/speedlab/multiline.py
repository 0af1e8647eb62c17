"""Exact stationary sampler for the multi-type dynamics via coupled queues.

The stationary law of the (N+1)-type system with class densities
``λ = (λ_1, ..., λ_{N+1})`` is produced from ``N`` independent Bernoulli
*lines*, line ``k`` having density ``x_k = λ_1 + ... + λ_k``, fed through a
chain of ``N - 1`` priority queues processed column by column from right to
left:

* within a column, lines are visited top to bottom;
* a 1 on line 1 is a fresh class-1 arrival to queue 1;
* a 1 on line ``k+1`` serves queue ``k`` *after* that column's arrival has
  been added (arrival-then-service): the lowest occupied class departs and is
  forwarded to queue ``k+1`` (or emitted, for the last line); a service
  finding queue ``k`` empty creates a fresh customer of class ``k+1``;
* a 0 on the last line emits the hole class ``N+1``.

The queue chain is positively recurrent when consecutive line densities
strictly increase, so sampling starts from empty queues at a burn-in distance
to the right of the observation window and discards the burn-in outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import _as_rng

__all__ = [
    "MultiLineState",
    "collapse",
    "default_burn_in",
    "sample_stationary",
    "sample_stationary_batch",
    "sample_queue_states",
    "empty_queue_prob_estimate",
]


def _validate_densities(densities) -> np.ndarray:
    lam = np.asarray(densities, dtype=np.float64)
    if lam.ndim != 1 or lam.size < 1:
        raise ValueError("densities must be a non-empty 1-d probability vector")
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-9:
        raise ValueError("densities must be nonnegative and sum to 1")
    return lam


def _line_densities(lam: np.ndarray) -> np.ndarray:
    """Prefix densities x_k of the N = len(lam) - 1 lines."""
    return np.cumsum(lam)[:-1]


def default_burn_in(densities) -> int:
    """``ceil(50 / δ)`` with δ the smallest gap between consecutive line
    densities (each queue forgets its start geometrically at rate ~δ).

    Queues between deterministic lines (both densities 0 or both 1) never
    build up and are ignored; a zero gap between nondegenerate lines makes
    the queue null-recurrent and is rejected.
    """
    lam = _validate_densities(densities)
    x = _line_densities(lam)
    gaps = []
    for a, b in zip(x, x[1:]):
        if (a == b == 0.0) or (a == b == 1.0):
            continue
        gap = b - a
        if gap <= 0.0:
            raise ValueError(
                "consecutive line densities must strictly increase "
                "(a zero gap makes the queue between them null-recurrent)"
            )
        gaps.append(gap)
    if not gaps:
        return 0
    return math.ceil(50.0 / min(gaps))


@dataclass
class MultiLineState:
    """N Bernoulli lines over a window plus the queue occupancies.

    ``lines[k-1]`` is line ``k`` (density ``x_k``), columns in lattice order;
    ``queues[i-1, j-1]`` counts class-``j`` customers in queue ``i``
    (``j <= i``); ``densities`` are the class densities λ.
    """

    lines: np.ndarray
    queues: np.ndarray
    densities: tuple[float, ...]

    @classmethod
    def sample(cls, densities, length: int, rng=None) -> "MultiLineState":
        lam = _validate_densities(densities)
        gen = _as_rng(rng)
        x = _line_densities(lam)
        lines = (gen.random((x.size, length)) < x[:, None]).astype(np.uint8)
        nq = max(x.size - 1, 0)
        return cls(lines, np.zeros((nq, nq), dtype=np.int64), tuple(lam))

    def collapse(self, return_trace: bool = False):
        return collapse(self.lines, self.queues, return_trace=return_trace)


def collapse(lines, queues=None, return_trace: bool = False):
    """Deterministically collapse ``N`` lines into one class sequence.

    Parameters
    ----------
    lines : array-like, shape (N, L)
        0/1 rows, columns in lattice order (leftmost first).
    queues : array, shape (N-1, N-1), optional
        Initial occupancy counts (class ``j+1`` customers of queue ``i+1`` at
        ``[i, j]``); defaults to all-empty, the right-boundary convention.
    return_trace : bool
        Also return the queue-state snapshot after each processed column, in
        processing order (rightmost column first).

    Returns ``(classes, final_queues)`` — plus the trace if requested.
    """
    rows = [np.asarray(row) for row in lines]
    if not rows:
        raise ValueError("need at least one line")
    length = rows[0].size
    if any(r.ndim != 1 or r.size != length for r in rows):
        raise ValueError("malformed line lengths: all lines must share the window")
    arr = np.stack(rows).astype(np.int64)
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("lines must be 0/1 sequences")
    n_lines = arr.shape[0]
    nq = max(n_lines - 1, 0)
    if queues is None:
        counts = np.zeros((nq, nq), dtype=np.int64)
    else:
        counts = np.array(queues, dtype=np.int64)
        if counts.shape != (nq, nq) or np.any(counts < 0):
            raise ValueError(f"queue state must be a nonnegative ({nq}, {nq}) array")
        if any(counts[i, j] for i in range(nq) for j in range(i + 1, nq)):
            raise ValueError("queue i may hold only classes 1..i")

    out = np.empty(length, dtype=np.int64)
    trace: list[np.ndarray] = []
    for c in range(length - 1, -1, -1):
        dep = 1 if arr[0, c] else 0
        for qi in range(1, n_lines):
            q = counts[qi - 1]
            if dep:
                q[dep - 1] += 1
            if arr[qi, c]:
                occupied = np.nonzero(q)[0]
                if occupied.size:
                    j = occupied[0]
                    q[j] -= 1
                    dep = int(j) + 1
                else:
                    dep = qi + 1
            else:
                dep = 0
        out[c] = dep if dep else n_lines + 1
        if return_trace:
            trace.append(counts.copy())
    if return_trace:
        return out, counts, trace
    return out, counts


# ---------------------------------------------------------------------------
# vectorized sampling
# ---------------------------------------------------------------------------


def _advance_columns(
    counts: np.ndarray,
    x: np.ndarray,
    rng: np.random.Generator,
    ncols: int,
    record_last: int = 0,
) -> np.ndarray | None:
    """Advance all samples ``ncols`` columns; optionally record the outputs
    of the last ``record_last`` columns (the leftmost of the window).

    ``counts`` has shape (samples, nq, nq) and is updated in place.
    """
    samples = counts.shape[0]
    n_lines = x.size
    out = (
        np.empty((samples, record_last), dtype=np.int64) if record_last else None
    )
    for k in range(ncols):
        bits = rng.random((n_lines, samples)) < x[:, None]
        dep = np.where(bits[0], 1, 0).astype(np.int64)
        for qi in range(1, n_lines):
            q = counts[:, qi - 1]
            rows = np.nonzero(dep)[0]
            if rows.size:
                q[rows, dep[rows] - 1] += 1
            occ = q > 0
            first = np.argmax(occ, axis=1)
            has_any = occ.any(axis=1)
            served = bits[qi] & has_any
            rows2 = np.nonzero(served)[0]
            if rows2.size:
                q[rows2, first[rows2]] -= 1
            new_dep = np.zeros(samples, dtype=np.int64)
            new_dep[served] = first[served] + 1
            new_dep[bits[qi] & ~has_any] = qi + 1
            dep = new_dep
        if record_last and k >= ncols - record_last:
            out[:, ncols - 1 - k] = np.where(dep > 0, dep, n_lines + 1)
    return out


def sample_stationary_batch(
    densities, length: int, samples: int, burn_in: int | None = None, rng=None
) -> np.ndarray:
    """``samples`` independent stationary class sequences of ``length`` sites.

    Lines are generated column by column from the right over
    ``length + burn_in`` columns starting from empty queues; the ``burn_in``
    rightmost outputs are discarded.
    """
    lam = _validate_densities(densities)
    if length < 1 or samples < 1:
        raise ValueError("length and samples must be >= 1")
    if burn_in is None:
        burn_in = default_burn_in(lam)
    if burn_in < 0:
        raise ValueError("burn-in must be >= 0")
    x = _line_densities(lam)
    if x.size == 0:
        return np.ones((samples, length), dtype=np.int64)
    nq = max(x.size - 1, 0)
    counts = np.zeros((samples, max(nq, 1), max(nq, 1)), dtype=np.int64)
    gen = _as_rng(rng)
    return _advance_columns(counts, x, gen, length + burn_in, record_last=length)


def sample_stationary(
    densities, length: int, burn_in: int | None = None, rng=None
) -> np.ndarray:
    """One stationary class sequence over ``length`` sites."""
    return sample_stationary_batch(densities, length, 1, burn_in, rng)[0]


def sample_queue_states(
    densities, samples: int, columns: int, rng=None
) -> np.ndarray:
    """Queue occupancies of ``samples`` independent chains after processing
    ``columns`` columns from the empty state; shape (samples, nq, nq)."""
    lam = _validate_densities(densities)
    x = _line_densities(lam)
    if x.size < 2:
        raise ValueError("queue states need at least two lines")
    nq = x.size - 1
    counts = np.zeros((samples, nq, nq), dtype=np.int64)
    _advance_columns(counts, x, _as_rng(rng), columns)
    return counts


def empty_queue_prob_estimate(
    densities, samples: int, rng=None, burn_in: int | None = None
) -> float:
    """Monte Carlo frequency of the all-queues-empty state at a deep column.

    Runs ``burn_in`` (default :func:`default_burn_in`) columns from empty
    queues and reports the fraction of samples with every queue empty.
    """
    lam = _validate_densities(densities)
    if lam.size < 3:
        raise ValueError("need at least two lines (three classes)")
    if burn_in is None:
        burn_in = default_burn_in(lam)
    states = sample_queue_states(lam, samples, burn_in, rng)
    return float(np.mean(~states.any(axis=(1, 2))))
