"""Line collapse, queue semantics, and the stationary class sampler.

The key check here is dual-route: an exact truncated-queue-chain oracle
(independent power iteration over the single-queue birth-death chain) must
agree with the closed-form pair matrix to near machine precision, and the
Monte Carlo sampler must agree with both.
"""

import math

import numpy as np
import pytest

from speedlab.formulas import empty_queue_prob
from speedlab.harness import WORKED_LINES, WORKED_OUTPUT, WORKED_TRACE
from speedlab.multiline import (
    MultiLineState,
    collapse,
    default_burn_in,
    empty_queue_prob_estimate,
    sample_queue_states,
    sample_stationary,
    sample_stationary_batch,
)

RNG = np.random.default_rng


# ---------------------------------------------------------------------------
# collapse semantics
# ---------------------------------------------------------------------------


def test_collapse_three_line_worked_example_with_trace():
    classes, queues, trace = collapse(WORKED_LINES, return_trace=True)
    assert tuple(classes) == WORKED_OUTPUT
    got = tuple(tuple(tuple(int(v) for v in row) for row in q) for q in trace)
    assert got == WORKED_TRACE
    assert np.array_equal(queues, np.asarray(WORKED_TRACE[-1]))
    assert len(trace) == WORKED_LINES.shape[1]  # one snapshot per column


def test_collapse_single_line_maps_holes_to_class_two():
    classes, queues = collapse([[1, 0, 1, 1, 0]])
    assert classes.tolist() == [1, 2, 1, 1, 2]
    assert queues.shape == (0, 0)


def test_collapse_two_lines_hand_traced():
    # rightmost column first: no line-1 arrival, line 2 fires on an empty
    # queue -> class 2; then an arrival is served immediately -> class 1
    classes, queues = collapse([[1, 0], [1, 1]])
    assert classes.tolist() == [1, 2]
    assert queues.tolist() == [[0]]
    # a seeded queue turns the class-2 departure into a class-1 one
    classes, queues = collapse([[1, 0], [1, 1]], queues=[[1]])
    assert classes.tolist() == [1, 1]
    assert queues.tolist() == [[0]]


def test_collapse_unserved_columns_emit_the_lowest_priority():
    classes, _ = collapse([[0, 0], [0, 0]])
    assert classes.tolist() == [3, 3]


def test_collapse_validates_input():
    with pytest.raises(ValueError, match="at least one line"):
        collapse([])
    with pytest.raises(ValueError, match="share the window"):
        collapse([[1, 0], [1]])
    with pytest.raises(ValueError, match="0/1"):
        collapse([[2, 0]])
    with pytest.raises(ValueError, match="queue state"):
        collapse([[1], [0]], queues=[[-1]])
    with pytest.raises(ValueError, match="queue i"):
        collapse([[1], [0], [1]], queues=[[0, 1], [0, 0]])


def test_multi_line_state_sample_collapses():
    state = MultiLineState.sample((0.3, 0.3, 0.4), 50, rng=RNG(2))
    assert state.lines.shape == (2, 50)
    assert state.queues.shape == (1, 1)
    classes, _ = state.collapse()
    assert set(np.unique(classes)) <= {1, 2, 3}


# ---------------------------------------------------------------------------
# exact queue-chain oracle
# ---------------------------------------------------------------------------


def queue_chain(x1, x2, cap=120):
    """Transition and emission tensors of the single-queue column chain.

    Per column (processed right to left): a line-1 arrival (rate ``x1``)
    enqueues first, then a line-2 slot (rate ``x2``) serves the queue (class
    1) or passes through (class 2); without a slot the column emits class 3.
    Truncation error decays like ``(x1 (1-x2) / ((1-x1) x2))^cap``.
    """
    T = np.zeros((cap + 1, cap + 1))
    R = np.zeros((cap + 1, 3, cap + 1))
    for s in range(cap + 1):
        for a1, pa in ((1, x1), (0, 1.0 - x1)):
            mid = min(s + a1, cap)
            for a2, pb in ((1, x2), (0, 1.0 - x2)):
                if a2 and mid > 0:
                    s2, cls = mid - 1, 1
                elif a2:
                    s2, cls = mid, 2
                else:
                    s2, cls = mid, 3
                T[s, s2] += pa * pb
                R[s, cls - 1, s2] += pa * pb
    return T, R


def chain_stationary(T, iters=4000):
    pi = np.zeros(T.shape[0])
    pi[0] = 1.0
    for _ in range(iters):
        pi = pi @ T
    return pi / pi.sum()


def chain_pair_matrix(x1, x2, cap=120):
    """mu[a-1, b-1] = P(class a at a site, class b at the site to its right);
    the right site is emitted first, the left from the updated state."""
    T, R = queue_chain(x1, x2, cap)
    pi = chain_stationary(T)
    mu = np.empty((3, 3))
    emit = R.sum(axis=2)  # P(emit cls | state)
    for a in range(3):
        for b in range(3):
            mu[a, b] = pi @ (R[:, b, :] @ emit[:, a])
    return pi, mu


# stationary nearest-neighbour class matrix at line densities (0.3, 0.6),
# mu[a-1][b-1] = P(class a here, class b one site right); derived offline
# from the same chain at cap 400 and cross-checked against the product
# formulas for the middle column
FROZEN_PAIR_MATRIX = np.array([
    [0.090, 0.054, 0.156],
    [0.090, 0.126, 0.084],
    [0.120, 0.120, 0.160],
])


def test_chain_oracle_reproduces_the_frozen_pair_matrix():
    x1, x2 = 0.3, 0.6
    pi, mu = chain_pair_matrix(x1, x2)
    # all-empty probability matches the determinant closed form
    assert abs(pi[0] - empty_queue_prob([x1, x2])) < 1e-12
    lam = np.array([x1, x2 - x1, 1.0 - x2])
    assert np.abs(mu.sum(axis=1) - lam).max() < 1e-12   # rows are densities
    assert np.abs(mu.sum(axis=0) - lam).max() < 1e-12   # so are columns
    assert np.abs(mu - FROZEN_PAIR_MATRIX).max() < 1e-9
    # the cross-class column has closed product forms; the verification
    # suite leans on these three entries
    assert abs(mu[0, 1] - x1 * x2 * (x2 - x1)) < 1e-12
    assert abs(mu[1, 1] - (1.0 - x1) * x2 * (x2 - x1)) < 1e-12
    assert abs(mu[2, 1] - (1.0 - x2) * (x2 - x1)) < 1e-12


def test_sampler_matches_the_chain_oracle():
    x1, x2 = 0.3, 0.6
    _, mu = chain_pair_matrix(x1, x2)
    seqs = sample_stationary_batch((x1, x2 - x1, 1.0 - x2), 101, 2000,
                                   rng=RNG(31))
    for a in range(3):
        for b in range(3):
            hits = (seqs[:, :-1] == a + 1) & (seqs[:, 1:] == b + 1)
            freq = hits.mean(axis=1).mean()
            # adjacent pairs within a sequence are correlated; 0.01 is ~10
            # iid sigmas at this volume, still far below the 0.03+ spacing
            # between distinct entries
            assert abs(freq - mu[a, b]) < 0.01, (a + 1, b + 1, freq, mu[a, b])


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def test_sample_stationary_batch_shape_and_determinism():
    a = sample_stationary_batch((0.5, 0.5), 40, 12, rng=RNG(9))
    b = sample_stationary_batch((0.5, 0.5), 40, 12, rng=RNG(9))
    assert a.shape == (12, 40)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {1, 2}
    single = sample_stationary((0.5, 0.5), 40, rng=RNG(9))
    again = sample_stationary((0.5, 0.5), 40, rng=RNG(9))
    assert single.shape == (40,)
    assert np.array_equal(single, again)


def test_sample_marginals_match_the_densities():
    lam = (0.2, 0.5, 0.3)
    seqs = sample_stationary_batch(lam, 200, 400, rng=RNG(13))
    n = seqs.size
    for cls, rho in enumerate(lam, start=1):
        freq = np.mean(seqs == cls)
        assert abs(freq - rho) < 6.0 * math.sqrt(rho * (1 - rho) / n) + 0.01


def test_degenerate_single_class_sampler():
    seqs = sample_stationary_batch((1.0,), 10, 3, rng=RNG(1))
    assert np.all(seqs == 1)


def test_sampler_validates_arguments():
    with pytest.raises(ValueError, match="sum to 1"):
        sample_stationary_batch((0.5, 0.6), 10, 2)
    with pytest.raises(ValueError, match=">= 1"):
        sample_stationary_batch((0.5, 0.5), 0, 2)
    with pytest.raises(ValueError, match="burn-in"):
        sample_stationary_batch((0.5, 0.5), 2, 2, burn_in=-1)


def test_default_burn_in_uses_the_smallest_line_gap():
    assert default_burn_in((0.3, 0.3, 0.4)) == math.ceil(50.0 / 0.3)
    assert default_burn_in((0.5, 0.5)) == 0  # one line, no queues
    with pytest.raises(ValueError, match="strictly increase"):
        default_burn_in((0.3, 0.0, 0.7))


def test_queue_states_respect_the_class_constraint():
    # four classes -> three lines -> two queues; queue 1 may only hold
    # class-1 customers, so its class-2 slot must stay at zero
    states = sample_queue_states((0.25, 0.25, 0.25, 0.25), 500, 200,
                                 rng=RNG(17))
    assert states.shape == (500, 2, 2)
    assert np.all(states >= 0)
    assert np.all(states[:, 0, 1] == 0)
    assert states.any()  # the chains did accumulate customers
    with pytest.raises(ValueError, match="two lines"):
        sample_queue_states((0.5, 0.5), 10, 10)


def test_empty_queue_estimate_agrees_with_the_closed_form():
    lam = (0.3, 0.3, 0.4)
    est = empty_queue_prob_estimate(lam, 4000, rng=RNG(23))
    exact = empty_queue_prob([0.3, 0.6])
    assert abs(est - exact) < 5.0 * math.sqrt(exact * (1 - exact) / 4000)
    with pytest.raises(ValueError, match="three classes"):
        empty_queue_prob_estimate((0.5, 0.5), 100)
