"""Domain types for exclusion processes on finite lattice windows.

A *configuration* assigns one integer label per site of a window
``[lo, lo + length - 1]`` of the integer lattice; every label occurs exactly
once (the window is a permutation of its initial label set).  Dynamics act
through nearest-neighbour *bond* operations: bond ``n`` couples sites
``(n, n + 1)``.

The three elementary bond operations are

``sort``      put the pair in decreasing order (a swap happens only when the
              pair is increasing),
``antisort``  put the pair in increasing order,
``transpose`` swap unconditionally.

The randomized operation ``pi`` swaps an increasing pair always and a
decreasing pair with probability ``q = (1 - p) / p`` for an asymmetry
parameter ``p in (1/2, 1]``; it consumes randomness only when the pair is
decreasing.

A :class:`NoiseField` is a frozen realization of the driving randomness on a
window: one rate-1 Poisson clock per bond, a Bernoulli(``p``) mark per event,
and one auxiliary uniform per event (used by the ``pi`` driver).  The same
field can drive several runs from different initial conditions, which is what
makes coupling arguments reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Configuration",
    "TrajectoryTracker",
    "ClassProjection",
    "NoiseField",
    "MarkStream",
    "RngStream",
    "canonical_config",
    "project",
    "apply_sort",
    "apply_antisort",
    "apply_transpose",
    "apply_pi",
]


def _as_rng(rng) -> np.random.Generator:
    """Coerce ``None`` / int seed / SeedSequence / RngStream / Generator."""
    if rng is None:
        return np.random.default_rng()
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, np.random.SeedSequence):
        return np.random.default_rng(rng)
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng))
    raise TypeError(f"cannot interpret {rng!r} as a random source")


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible randomness stream.

    Identical ``(seed, stream)`` pairs yield byte-identical generators; child
    streams for replicated experiments are derived with :meth:`spawn`.
    """

    seed: int
    stream: int = 0

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence())

    def spawn(self, n: int) -> list[np.random.SeedSequence]:
        """``n`` independent child sequences, indexed deterministically."""
        return self.seed_sequence().spawn(n)


@dataclass
class Configuration:
    """Labels on a lattice window ``[lo, lo + len(labels) - 1]``.

    ``labels[i]`` is the label sitting at lattice site ``lo + i``.
    """

    lo: int
    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a configuration needs a non-empty 1-d label array")
        if np.unique(arr).size != arr.size:
            raise ValueError("labels must be distinct (exclusion)")
        self.labels = arr
        self.lo = int(self.lo)

    @property
    def length(self) -> int:
        return int(self.labels.size)

    @property
    def hi(self) -> int:
        return self.lo + self.length - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def label_at(self, site: int) -> int:
        if not self.lo <= site <= self.hi:
            raise IndexError(f"site {site} outside window [{self.lo}, {self.hi}]")
        return int(self.labels[site - self.lo])

    def copy(self) -> "Configuration":
        return Configuration(self.lo, self.labels.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.lo == other.lo
            and np.array_equal(self.labels, other.labels)
        )


def canonical_config(lo: int, length: int) -> Configuration:
    """The step initial condition: label ``n`` at site ``n``.

    Every multi-type run in this package starts here; all other initial laws
    are produced by projecting or permuting it.
    """
    if length < 1:
        raise ValueError("window length must be >= 1")
    return Configuration(lo, np.arange(lo, lo + length, dtype=np.int64))


@dataclass
class TrajectoryTracker:
    """Inverse map of a configuration: label -> current site.

    The tracker is the bookkeeping dual of :class:`Configuration`; after every
    bond operation the pair (configuration, tracker) stays mutually inverse.
    """

    lo: int
    label_lo: int
    _positions: np.ndarray  # _positions[label - label_lo] = site

    @classmethod
    def from_config(cls, config: Configuration) -> "TrajectoryTracker":
        labels = config.labels
        label_lo = int(labels.min())
        inv = np.empty(labels.size, dtype=np.int64)
        inv[labels - label_lo] = np.arange(config.lo, config.lo + labels.size)
        return cls(config.lo, label_lo, inv)

    def position(self, label: int) -> int:
        idx = label - self.label_lo
        if not 0 <= idx < self._positions.size:
            raise KeyError(f"label {label} is not tracked")
        return int(self._positions[idx])

    def positions(self, labels: Iterable[int]) -> np.ndarray:
        return np.array([self.position(n) for n in labels], dtype=np.int64)

    def consistent_with(self, config: Configuration) -> bool:
        return all(
            config.label_at(self.position(n)) == n
            for n in config.labels[:: max(1, config.length // 64)]
        )


@dataclass(frozen=True)
class ClassProjection:
    """Monotone projection of speeds onto classes ``1..k+1``.

    Thresholds ``x_1 < ... < x_k`` live on the (0, 1) scale of
    ``u_hat = (1 + u) / 2``.  A speed with ``u_hat < x_i`` lands in a class
    ``<= i``; concretely ``class = 1 + #{i : x_i <= u_hat}``, so classes are
    the left-closed cells ``[x_{i-1}, x_i)``.
    """

    thresholds: tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(t) for t in self.thresholds)
        if not ts:
            raise ValueError("need at least one threshold")
        if any(not 0.0 < t < 1.0 for t in ts):
            raise ValueError("thresholds must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", ts)

    @property
    def num_classes(self) -> int:
        return len(self.thresholds) + 1

    def classify_uhat(self, uhat) -> np.ndarray:
        """Class of each ``u_hat`` value in [0, 1] (vectorized)."""
        uh = np.asarray(uhat, dtype=np.float64)
        if np.any((uh < 0.0) | (uh > 1.0)):
            raise ValueError("u_hat values must lie in [0, 1]")
        return (np.searchsorted(self.thresholds, uh, side="right") + 1).astype(np.int64)

    def classify_speed(self, u) -> np.ndarray:
        """Class of each speed ``u`` in [-1, 1] (vectorized)."""
        uu = np.asarray(u, dtype=np.float64)
        if np.any((uu < -1.0) | (uu > 1.0)):
            raise ValueError("speeds must lie in [-1, 1]")
        return self.classify_uhat((1.0 + uu) / 2.0)


def project(speeds, proj: ClassProjection) -> np.ndarray:
    """Project a sequence of speeds in [-1, 1] onto classes ``1..k+1``.

    Projecting iid uniform speeds yields iid classes with cell probabilities
    ``x_1, x_2 - x_1, ..., 1 - x_k``; the projection is monotone, so it
    commutes with the sorting dynamics entry by entry.
    """
    if not isinstance(proj, ClassProjection):
        proj = ClassProjection(tuple(proj))
    return proj.classify_speed(np.asarray(speeds, dtype=np.float64))


# ---------------------------------------------------------------------------
# elementary bond operations (pure; small-scale / exact use)
# ---------------------------------------------------------------------------


def _bond_slots(config: Configuration, n: int) -> tuple[int, int]:
    if not config.lo <= n <= config.hi - 1:
        raise IndexError(
            f"bond {n} couples sites ({n}, {n + 1}); window is "
            f"[{config.lo}, {config.hi}]"
        )
    i = n - config.lo
    return i, i + 1


def apply_sort(config: Configuration, n: int) -> Configuration:
    """Sort the pair at bond ``n`` into decreasing order."""
    i, j = _bond_slots(config, n)
    out = config.copy()
    a, b = out.labels[i], out.labels[j]
    if a < b:
        out.labels[i], out.labels[j] = b, a
    return out


def apply_antisort(config: Configuration, n: int) -> Configuration:
    """Sort the pair at bond ``n`` into increasing order."""
    i, j = _bond_slots(config, n)
    out = config.copy()
    a, b = out.labels[i], out.labels[j]
    if a > b:
        out.labels[i], out.labels[j] = b, a
    return out


def apply_transpose(config: Configuration, n: int) -> Configuration:
    """Swap the pair at bond ``n`` unconditionally."""
    i, j = _bond_slots(config, n)
    out = config.copy()
    out.labels[i], out.labels[j] = out.labels[j], out.labels[i]
    return out


@dataclass
class MarkStream:
    """Lazy uniform stream bound to an asymmetry parameter ``p``.

    ``q = (1 - p) / p`` is the probability that a decreasing pair is still
    swapped under the ``pi`` operation.  The stream records how many uniforms
    were consumed, which lets tests assert that increasing pairs cost no
    randomness.
    """

    p: float
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    consumed: int = 0

    def __post_init__(self):
        if not 0.5 < self.p <= 1.0:
            raise ValueError("asymmetry parameter p must lie in (1/2, 1]")
        self.rng = _as_rng(self.rng)

    @property
    def q(self) -> float:
        return (1.0 - self.p) / self.p

    def uniform(self) -> float:
        self.consumed += 1
        return float(self.rng.random())


def apply_pi(config: Configuration, n: int, marks: MarkStream) -> Configuration:
    """Randomized sorting at bond ``n``.

    An increasing pair is always swapped; a decreasing pair is swapped with
    probability ``q = (1 - p) / p`` (one uniform is consumed only in that
    case).  With ``p = 1`` we have ``q = 0`` and this reduces exactly to
    :func:`apply_sort`.
    """
    i, j = _bond_slots(config, n)
    out = config.copy()
    a, b = out.labels[i], out.labels[j]
    if a < b:
        out.labels[i], out.labels[j] = b, a
    elif marks.uniform() < marks.q:
        out.labels[i], out.labels[j] = b, a
    return out


# ---------------------------------------------------------------------------
# frozen driving noise
# ---------------------------------------------------------------------------


@dataclass
class NoiseField:
    """A frozen realization of the driving noise on a window of bonds.

    Bonds ``first_bond .. first_bond + nbonds - 1`` each carry a rate-1
    Poisson clock up to time ``horizon``.  Events are stored in time order
    (ties broken by bond index): ``offsets[e]`` is the bond (as an offset from
    ``first_bond``), ``times[e]`` the event time, ``marks[e]`` a Bernoulli(p)
    mark and ``aux[e]`` an independent uniform.  Arrays are write-protected so
    one field can drive any number of coupled runs identically.
    """

    first_bond: int
    nbonds: int
    horizon: float
    p: float
    offsets: np.ndarray
    times: np.ndarray
    marks: np.ndarray
    aux: np.ndarray

    def __post_init__(self):
        if self.nbonds < 1:
            raise ValueError("a noise field needs at least one bond")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("mark probability p must lie in (0, 1]")
        n = len(self.times)
        if not (len(self.offsets) == len(self.marks) == len(self.aux) == n):
            raise ValueError("event arrays must have equal length")
        for name in ("offsets", "times", "marks", "aux"):
            getattr(self, name).setflags(write=False)

    @classmethod
    def for_window(
        cls,
        lo: int,
        length: int,
        horizon: float,
        p: float = 1.0,
        rng=None,
    ) -> "NoiseField":
        """Sample the noise needed to drive a window ``[lo, lo+length-1]``.

        Covers the ``length + 1`` bonds ``lo - 1 .. lo + length - 1`` (the two
        extreme bonds only feed the contamination fronts).  Event times are
        the cumulative sums of exponential gaps of the merged rate-``nbonds``
        process, so they come out sorted without a sorting pass; bonds are
        then iid uniform and marks/aux iid per event.
        """
        gen = _as_rng(rng)
        nbonds = length + 1
        rate = float(nbonds)
        times = _exponential_cumsum(gen, rate, float(horizon))
        n = times.size
        offsets = gen.integers(0, nbonds, size=n, dtype=np.int64)
        marks = gen.random(n) < p
        aux = gen.random(n)
        return cls(lo - 1, nbonds, float(horizon), float(p), offsets, times, marks, aux)

    @classmethod
    def from_events(
        cls,
        first_bond: int,
        nbonds: int,
        horizon: float,
        p: float,
        bonds: Sequence[int],
        times: Sequence[float],
        marks: Sequence[bool] | None = None,
        aux: Sequence[float] | None = None,
    ) -> "NoiseField":
        """Build a field from explicit events (normalizing to time order)."""
        bonds = np.asarray(bonds, dtype=np.int64)
        times = np.asarray(times, dtype=np.float64)
        if np.any((bonds < first_bond) | (bonds >= first_bond + nbonds)):
            raise ValueError("event bond outside declared bond range")
        if np.any((times < 0) | (times > horizon)):
            raise ValueError("event time outside [0, horizon]")
        n = times.size
        marks = (
            np.ones(n, dtype=bool) if marks is None else np.asarray(marks, dtype=bool)
        )
        aux = (
            np.zeros(n, dtype=np.float64)
            if aux is None
            else np.asarray(aux, dtype=np.float64)
        )
        order = np.lexsort((bonds, times))
        return cls(
            first_bond,
            nbonds,
            float(horizon),
            float(p),
            (bonds - first_bond)[order].copy(),
            times[order].copy(),
            marks[order].copy(),
            aux[order].copy(),
        )

    @property
    def event_count(self) -> int:
        return int(self.times.size)

    @property
    def last_bond(self) -> int:
        return self.first_bond + self.nbonds - 1

    def bond_times(self, n: int) -> np.ndarray:
        """Event times on lattice bond ``n`` (increasing)."""
        if not self.first_bond <= n <= self.last_bond:
            raise IndexError(f"bond {n} not covered by this noise field")
        return self.times[self.offsets == n - self.first_bond]

    def bond_marks(self, n: int) -> np.ndarray:
        if not self.first_bond <= n <= self.last_bond:
            raise IndexError(f"bond {n} not covered by this noise field")
        return self.marks[self.offsets == n - self.first_bond]


def _exponential_cumsum(
    gen: np.random.Generator, rate: float, horizon: float
) -> np.ndarray:
    """Event times of a rate-``rate`` Poisson process on [0, horizon]."""
    if horizon == 0.0 or rate == 0.0:
        return np.empty(0, dtype=np.float64)
    mean = rate * horizon
    chunk = int(mean + 6.0 * math.sqrt(mean) + 16.0)
    times = np.cumsum(gen.exponential(1.0 / rate, size=chunk))
    while times[-1] < horizon:  # pragma: no cover - astronomically rare
        extra = np.cumsum(gen.exponential(1.0 / rate, size=chunk)) + times[-1]
        times = np.concatenate([times, extra])
    return times[times < horizon]
