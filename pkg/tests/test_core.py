"""Configurations, trackers, projections, bond operations, frozen noise."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speedlab.core import (
    ClassProjection,
    Configuration,
    MarkStream,
    NoiseField,
    RngStream,
    TrajectoryTracker,
    apply_antisort,
    apply_pi,
    apply_sort,
    apply_transpose,
    canonical_config,
    project,
)


def config_of(lo, labels):
    return Configuration(lo, np.asarray(labels, dtype=np.int64))


# ---------------------------------------------------------------------------
# Configuration / canonical_config / TrajectoryTracker
# ---------------------------------------------------------------------------


def test_canonical_config_is_the_step_state():
    c = canonical_config(-3, 7)
    assert c.lo == -3 and c.hi == 3 and c.length == 7
    assert np.array_equal(c.labels, np.arange(-3, 4))
    assert np.array_equal(c.sites, c.labels)
    assert c.label_at(-3) == -3 and c.label_at(3) == 3


def test_canonical_config_rejects_empty_window():
    with pytest.raises(ValueError):
        canonical_config(0, 0)


def test_configuration_rejects_duplicate_labels():
    with pytest.raises(ValueError, match="distinct"):
        config_of(0, [1, 1, 2])


def test_configuration_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Configuration(0, np.array([], dtype=np.int64))
    with pytest.raises(ValueError):
        Configuration(0, np.array([[0, 1]], dtype=np.int64))


def test_configuration_copy_is_independent():
    c = config_of(2, [5, 3, 4])
    d = c.copy()
    d.labels[0] = 99
    assert c.label_at(2) == 5
    assert c == config_of(2, [5, 3, 4])
    assert c != d


def test_label_at_outside_window_raises():
    c = config_of(0, [0, 1])
    with pytest.raises(IndexError):
        c.label_at(2)


def test_tracker_is_the_inverse_map():
    c = config_of(-1, [4, -1, 2, 0])
    tr = TrajectoryTracker.from_config(c)
    assert tr.position(4) == -1
    assert tr.position(-1) == 0
    assert tr.position(0) == 2
    assert np.array_equal(tr.positions([4, 2]), [-1, 1])
    assert tr.consistent_with(c)
    with pytest.raises(KeyError):
        tr.position(99)


# ---------------------------------------------------------------------------
# bond operations
# ---------------------------------------------------------------------------


def test_sort_orders_decreasing_only_when_needed():
    c = config_of(0, [2, 1, 3])
    assert apply_sort(c, 0) == c          # (2, 1) already decreasing
    assert apply_sort(c, 1) == config_of(0, [2, 3, 1])
    assert c == config_of(0, [2, 1, 3])   # purity: input untouched


def test_antisort_orders_increasing():
    c = config_of(0, [2, 1, 3])
    assert apply_antisort(c, 0) == config_of(0, [1, 2, 3])
    assert apply_antisort(c, 1) == c


def test_transpose_always_swaps():
    c = config_of(0, [2, 1, 3])
    assert apply_transpose(c, 0) == config_of(0, [1, 2, 3])
    assert apply_transpose(apply_transpose(c, 1), 1) == c


def test_bond_outside_window_raises():
    c = config_of(0, [0, 1, 2])
    for op in (apply_sort, apply_antisort, apply_transpose):
        with pytest.raises(IndexError):
            op(c, -1)
        with pytest.raises(IndexError):
            op(c, 2)  # bond 2 would couple site 3, outside the window


@st.composite
def windows(draw, max_len=6):
    length = draw(st.integers(2, max_len))
    lo = draw(st.integers(-5, 5))
    labels = draw(st.permutations(list(range(lo, lo + length))))
    return config_of(lo, labels)


@given(windows(), st.data())
@settings(max_examples=60, deadline=None)
def test_sort_and_antisort_are_idempotent(c, data):
    n = data.draw(st.integers(c.lo, c.hi - 1))
    once = apply_sort(c, n)
    assert apply_sort(once, n) == once
    inc = apply_antisort(c, n)
    assert apply_antisort(inc, n) == inc
    # both orderings place the same multiset on the bond
    assert sorted(once.labels.tolist()) == sorted(inc.labels.tolist())


@given(windows(max_len=8), st.data())
@settings(max_examples=60, deadline=None)
def test_distant_bond_operations_commute(c, data):
    n = data.draw(st.integers(c.lo, c.hi - 1))
    m = data.draw(st.integers(c.lo, c.hi - 1))
    if abs(n - m) < 2:
        return
    for op_a in (apply_sort, apply_transpose):
        for op_b in (apply_sort, apply_antisort):
            assert op_a(op_b(c, m), n) == op_b(op_a(c, n), m)


def test_pi_with_p_one_is_sort_and_consumes_nothing():
    marks = MarkStream(1.0, np.random.default_rng(0))
    c = config_of(0, [1, 2, 0])
    assert apply_pi(c, 0, marks) == apply_sort(c, 0)   # increasing pair
    assert marks.consumed == 0
    assert apply_pi(c, 1, marks) == c                  # decreasing pair stays
    assert marks.consumed == 1


def test_pi_swaps_decreasing_pairs_at_rate_q():
    p = 0.6
    marks = MarkStream(p, np.random.default_rng(7))
    assert marks.q == pytest.approx((1.0 - p) / p)
    c = config_of(0, [1, 0])
    n = 4000
    swaps = sum(apply_pi(c, 0, marks) != c for _ in range(n))
    assert marks.consumed == n
    se = (marks.q * (1 - marks.q) / n) ** 0.5
    assert abs(swaps / n - marks.q) < 4.5 * se


def test_mark_stream_rejects_symmetric_and_super_unit_p():
    for p in (0.5, 0.2, 1.1):
        with pytest.raises(ValueError):
            MarkStream(p)


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


def test_projection_threshold_validation():
    with pytest.raises(ValueError):
        ClassProjection(())
    with pytest.raises(ValueError):
        ClassProjection((0.0, 0.5))
    with pytest.raises(ValueError):
        ClassProjection((0.6, 0.3))
    with pytest.raises(ValueError):
        ClassProjection((0.3, 0.3))


def test_projection_cells_are_left_closed():
    proj = ClassProjection((0.3, 0.6))
    assert proj.num_classes == 3
    got = proj.classify_uhat([0.0, 0.29, 0.3, 0.59, 0.6, 1.0])
    assert got.tolist() == [1, 1, 2, 2, 3, 3]
    with pytest.raises(ValueError):
        proj.classify_uhat([1.2])


def test_classify_speed_matches_uhat_map():
    proj = ClassProjection((0.25, 0.5, 0.75))
    u = np.linspace(-1.0, 1.0, 41)
    assert np.array_equal(proj.classify_speed(u),
                          proj.classify_uhat((1.0 + u) / 2.0))
    with pytest.raises(ValueError):
        proj.classify_speed([1.5])


def test_project_accepts_raw_thresholds_and_is_monotone():
    u = np.linspace(-0.99, 0.99, 201)
    classes = project(u, (0.3, 0.6))
    assert np.array_equal(classes, ClassProjection((0.3, 0.6)).classify_speed(u))
    assert np.all(np.diff(classes) >= 0)


# ---------------------------------------------------------------------------
# frozen noise
# ---------------------------------------------------------------------------


def test_for_window_covers_the_bond_range():
    noise = NoiseField.for_window(-5, 11, 3.0, rng=np.random.default_rng(1))
    assert noise.first_bond == -6            # bond lo-1 included
    assert noise.nbonds == 12                # through bond lo+length-1
    assert noise.last_bond == 5
    assert noise.horizon == 3.0
    assert noise.event_count == noise.times.size
    assert np.all(np.diff(noise.times) >= 0.0)
    assert np.all((noise.times >= 0.0) & (noise.times <= 3.0))
    assert np.all((noise.offsets >= 0) & (noise.offsets < noise.nbonds))
    assert np.all((noise.aux >= 0.0) & (noise.aux < 1.0))


def test_noise_arrays_are_write_protected():
    noise = NoiseField.for_window(0, 4, 2.0, rng=np.random.default_rng(2))
    with pytest.raises(ValueError):
        noise.times[0] = 0.0


def test_from_events_sorts_by_time():
    noise = NoiseField.from_events(
        first_bond=-1, nbonds=3, horizon=5.0, p=1.0,
        bonds=[1, -1, 0], times=[3.0, 1.0, 2.0],
    )
    assert noise.times.tolist() == [1.0, 2.0, 3.0]
    assert (noise.offsets + noise.first_bond).tolist() == [-1, 0, 1]
    assert noise.bond_times(0).tolist() == [2.0]
    assert noise.bond_times(1).tolist() == [3.0]
    with pytest.raises(IndexError):
        noise.bond_times(2)


def test_from_events_validates_range():
    with pytest.raises(ValueError):
        NoiseField.from_events(0, 2, 1.0, 1.0, bonds=[5], times=[0.5])
    with pytest.raises(ValueError):
        NoiseField.from_events(0, 2, 1.0, 1.0, bonds=[0], times=[2.0])


def test_bond_marks_align_with_bond_times():
    noise = NoiseField.for_window(0, 6, 4.0, p=0.7,
                                  rng=np.random.default_rng(3))
    for bond in range(noise.first_bond, noise.last_bond + 1):
        assert noise.bond_marks(bond).size == noise.bond_times(bond).size
    total = sum(noise.bond_times(b).size
                for b in range(noise.first_bond, noise.last_bond + 1))
    assert total == noise.event_count


def test_rng_stream_is_deterministic():
    a = RngStream(42, stream=1).spawn(3)
    b = RngStream(42, stream=1).spawn(3)
    assert len(a) == 3
    assert [s.spawn_key for s in a] == [s.spawn_key for s in b]
    assert RngStream(42).generator().random() == RngStream(42).generator().random()
    # distinct streams of one seed give distinct draws
    assert RngStream(42, 0).generator().random() != RngStream(42, 1).generator().random()
