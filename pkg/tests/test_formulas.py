"""Closed-form laws: frozen spot values, integral identities, and
brute-force cross-checks.

Every nontrivial formula gets a second, independent route: exhaustive path
enumeration for the lazy-walk maximum, adaptive quadrature for densities
that must integrate to known masses, and hand-computed rational constants.
"""

import itertools
import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from speedlab.formulas import (
    ASEPValues,
    ExactValue,
    LazyWalkSpec,
    asep_values,
    convoy_gap_pmf,
    convoy_gap_tail,
    dist2,
    dist2_diagonal_asymptotic,
    empty_queue_prob,
    equal_speeds_prob,
    joint2_density,
    joint3_density,
    ordered_density,
    rightmost_intermediate_density,
    rightmost_prob,
    vandermonde,
    walk_max_zero_prob,
)


# ---------------------------------------------------------------------------
# two-point law
# ---------------------------------------------------------------------------


def test_joint2_density_piecewise_values():
    assert joint2_density(0.5, -0.5).continuous == 0.25
    assert joint2_density(-0.5, 0.5).continuous == 0.25
    assert joint2_density(0.5, -0.5).diagonal is None
    d = joint2_density(0.2, 0.2)
    assert d.continuous == 0.0
    assert abs(d.diagonal - (1.0 - 0.04) / 8.0) < 1e-15
    with pytest.raises(ValueError, match="outside"):
        joint2_density(1.2, 0.0)
    with pytest.raises(ValueError, match="outside"):
        joint2_density(0.0, -1.0001)


def test_joint2_density_integrates_to_the_three_masses():
    cont = lambda u1, u0: joint2_density(u0, u1).continuous
    swapped, _ = dblquad(cont, -1, 1, -1, lambda u0: u0)
    unswapped, _ = dblquad(cont, -1, 1, lambda u0: u0, 1)
    diagonal, _ = quad(lambda u: joint2_density(u, u).diagonal, -1, 1)
    assert abs(swapped - 0.5) < 1e-9
    assert abs(unswapped - 1.0 / 3.0) < 1e-9
    assert abs(diagonal - 1.0 / 6.0) < 1e-9


@pytest.mark.parametrize("u0", [-0.9, -0.3, 0.0, 0.4, 0.8])
def test_joint2_marginal_is_uniform(u0):
    # integrating out u1 (continuous part plus the diagonal atom) must give
    # the uniform[-1, 1] density 1/2 at every u0
    cont, _ = quad(lambda u1: joint2_density(u0, u1).continuous, -1, 1,
                   points=[u0])
    total = cont + joint2_density(u0, u0).diagonal
    assert abs(total - 0.5) < 1e-9


# ---------------------------------------------------------------------------
# lazy walk maximum
# ---------------------------------------------------------------------------


def brute_paths(p_plus, p_minus, p_zero, n):
    """All 3^n lazy-walk paths with their probabilities."""
    weight = {1: p_plus, -1: p_minus, 0: p_zero}
    for steps in itertools.product((1, -1, 0), repeat=n):
        prob = math.prod(weight[s] for s in steps)
        yield np.cumsum(steps), prob


def brute_stay_nonpositive(p_plus, p_minus, p_zero, n):
    return sum(prob for path, prob in brute_paths(p_plus, p_minus, p_zero, n)
               if n == 0 or path.max() <= 0)


def test_walk_max_zero_matches_exhaustive_enumeration():
    for a in (0.2, 0.45):
        for n in range(8):
            spec = LazyWalkSpec(a, a, 1.0 - 2.0 * a, n)
            brute = brute_stay_nonpositive(a, a, 1.0 - 2.0 * a, n)
            assert abs(walk_max_zero_prob(spec) - brute) < 1e-12, (a, n)


def test_walk_max_zero_equals_endpoint_mass_by_reflection():
    # for symmetric lazy walks P(M_n = 0) = P(S_n in {0, -1}); both sides
    # computed by independent routes (dynamic program vs path enumeration)
    a = 0.3
    for n in range(1, 7):
        endpoint = sum(
            prob for path, prob in brute_paths(a, a, 1.0 - 2.0 * a, n)
            if path[-1] in (0, -1)
        )
        assert abs(walk_max_zero_prob(LazyWalkSpec(a, a, 0.4, n)) - endpoint) < 1e-12


def test_walk_spec_validation():
    with pytest.raises(ValueError, match="symmetric"):
        walk_max_zero_prob(LazyWalkSpec(0.3, 0.4, 0.3, 5))
    with pytest.raises(ValueError, match="nonnegative"):
        LazyWalkSpec(-0.1, 0.6, 0.5, 3)
    with pytest.raises(ValueError, match="sum to 1"):
        LazyWalkSpec(0.3, 0.3, 0.3, 3)
    with pytest.raises(ValueError, match=">= 0"):
        LazyWalkSpec(0.25, 0.25, 0.5, -1)
    assert walk_max_zero_prob(LazyWalkSpec(0.5, 0.5, 0.0, 0)) == 1.0


# ---------------------------------------------------------------------------
# two speeds at lattice distance k
# ---------------------------------------------------------------------------


def test_dist2_region_values_at_the_reference_thresholds():
    x, y = 0.2, 0.6
    below = dist2(4, "below", x, y)
    diag = dist2(4, "diag", x, y)
    above = dist2(4, "above", x, y)
    assert abs(below - 0.16) < 1e-12
    # the walk behind the diagonal term, enumerated exhaustively
    p_plus, p_minus = x * (1.0 - y), (1.0 - x) * y
    stay = brute_stay_nonpositive(p_plus, p_minus, 1.0 - p_plus - p_minus, 3)
    assert abs(diag - (y - x) * (1.0 - x) * y * stay) < 1e-15
    assert 0.0 < above < y - x
    assert abs((below + diag + above) - (y - x)) < 1e-15


@pytest.mark.parametrize("k", [1, 2, 3, 7, 20])
@pytest.mark.parametrize("x,y", [(0.2, 0.6), (0.0, 1.0), (0.45, 0.55)])
def test_dist2_regions_partition_the_strip(k, x, y):
    total = sum(dist2(k, region, x, y) for region in ("below", "diag", "above"))
    assert abs(total - (y - x)) < 1e-14


def test_dist2_adjacent_pair_has_no_walk():
    # k = 1 leaves a zero-step walk, so the diagonal term is the bare product
    x, y = 0.3, 0.7
    assert dist2(1, "diag", x, y) == (y - x) * (1.0 - x) * y


def test_dist2_validation():
    with pytest.raises(ValueError, match="region"):
        dist2(4, "sideways", 0.2, 0.6)
    with pytest.raises(ValueError, match="thresholds"):
        dist2(4, "below", 0.6, 0.2)
    with pytest.raises(ValueError, match="thresholds"):
        dist2(4, "below", -0.1, 0.5)
    with pytest.raises(ValueError, match="k must be"):
        dist2(0, "below", 0.2, 0.6)


def test_dist2_diagonal_asymptotic_form_and_scaling():
    u, k = 0.3, 25
    assert abs(dist2_diagonal_asymptotic(u, k)
               - math.sqrt((1.0 - u * u) / (16.0 * math.pi * k))) < 1e-15
    # 1/sqrt(k) decay: quadrupling k halves the value
    assert abs(dist2_diagonal_asymptotic(u, 4 * k)
               - 0.5 * dist2_diagonal_asymptotic(u, k)) < 1e-15
    with pytest.raises(ValueError, match="outside"):
        dist2_diagonal_asymptotic(1.5, 4)
    with pytest.raises(ValueError, match="k must be"):
        dist2_diagonal_asymptotic(0.0, 0)


# ---------------------------------------------------------------------------
# three-point law
# ---------------------------------------------------------------------------


def test_joint3_density_stratum_values():
    # strict descending order: constant density 1/8
    d = joint3_density(0.5, 0.1, -0.4)
    assert (d.value, d.dim, d.order) == (0.125, 3, "u2<u1<u0")
    # strict ascending order: 3/32 (u1-u0)(u2-u1)(u2-u0)
    d = joint3_density(-0.5, 0.0, 0.5)
    assert d.dim == 3 and d.order == "u0<u1<u2"
    assert abs(d.value - (3.0 / 32.0) * 0.5 * 0.5 * 1.0) < 1e-15
    # two partially swapped orders keep a difference factor over 8
    d = joint3_density(0.5, -0.3, 0.1)
    assert d.order == "u1<u2<u0"
    assert abs(d.value - (0.1 - (-0.3)) / 8.0) < 1e-15
    d = joint3_density(0.2, 0.6, -0.1)
    assert d.order == "u2<u0<u1"
    assert abs(d.value - (0.6 - 0.2) / 8.0) < 1e-15
    # coincidence planes
    d = joint3_density(0.3, 0.3, -0.2)
    assert d.dim == 2 and d.order == "u2<u0=u1"
    assert abs(d.value - (1.0 - 0.09) / 16.0) < 1e-15
    d = joint3_density(0.7, 0.1, 0.1)
    assert d.dim == 2 and d.order == "u1=u2<u0"
    assert abs(d.value - (1.0 - 0.01) / 16.0) < 1e-15
    # full diagonal
    d = joint3_density(0.4, 0.4, 0.4)
    assert d.dim == 1 and d.order == "u0=u1=u2"
    assert abs(d.value - (1.0 - 0.16) ** 2 / 32.0) < 1e-15
    with pytest.raises(ValueError, match="outside"):
        joint3_density(0.0, 2.0, 0.0)


SPOTS3 = [
    (-0.5, 0.0, 0.5), (0.5, 0.0, -0.5), (0.1, 0.7, -0.2), (0.7, -0.2, 0.1),
    (-0.2, 0.1, 0.7), (0.1, -0.2, 0.7), (0.3, 0.3, -0.2), (0.3, 0.3, 0.8),
    (-0.1, 0.4, 0.4), (0.9, 0.4, 0.4), (0.2, 0.6, 0.2), (0.2, -0.3, 0.2),
    (0.25, 0.25, 0.25),
]


@pytest.mark.parametrize("u0,u1,u2", SPOTS3)
def test_joint3_density_mirror_symmetry_is_exact(u0, u1, u2):
    a = joint3_density(u0, u1, u2)
    b = joint3_density(-u2, -u1, -u0)
    assert a.value == b.value  # bit-identical by construction
    assert a.dim == b.dim


# ---------------------------------------------------------------------------
# ordered speeds / Vandermonde family
# ---------------------------------------------------------------------------


def test_vandermonde_products_and_slices():
    assert vandermonde([1.0, 2.0, 4.0]) == (2 - 1) * (4 - 1) * (4 - 2)
    assert vandermonde([1.0, 2.0, 4.0], 1, 2) == 2.0
    assert vandermonde([1.0, 2.0, 4.0], 2, 2) == 1.0  # singleton
    assert vandermonde([3.0, 1.0]) == -2.0             # order-sensitive
    with pytest.raises(IndexError, match="range"):
        vandermonde([1.0, 2.0], 0, 2)
    with pytest.raises(IndexError, match="range"):
        vandermonde([1.0, 2.0], -1, 1)


def test_ordered_density_value_and_validation():
    val = ordered_density([0.2, 0.5, 0.9])
    assert abs(val - 6.0 * 0.3 * 0.7 * 0.4) < 1e-15
    assert ordered_density([0.4]) == 1.0
    with pytest.raises(ValueError, match="strictly increasing"):
        ordered_density([0.5, 0.5])
    with pytest.raises(ValueError, match="strictly increasing"):
        ordered_density([0.9, 0.2])
    with pytest.raises(ValueError, match="lie in"):
        ordered_density([-0.2, 0.5])
    with pytest.raises(ValueError, match="non-empty"):
        ordered_density([])


def test_empty_queue_prob_values_and_validation():
    assert abs(empty_queue_prob([0.3, 0.6]) - 5.0 / 7.0) < 1e-15
    assert empty_queue_prob([0.4]) == 1.0  # no queues at all
    # three lines, against the spelled-out product
    x = [0.2, 0.5, 0.7]
    delta = 0.3 * 0.5 * 0.2
    denom = (0.8 ** 2) * (0.5 * 0.5) * (0.7 ** 2)
    assert abs(empty_queue_prob(x) - delta / denom) < 1e-15
    with pytest.raises(ValueError, match="strictly increasing"):
        empty_queue_prob([0.6, 0.3])
    with pytest.raises(ValueError, match="strictly increasing"):
        empty_queue_prob([0.0, 0.5])
    with pytest.raises(ValueError, match="non-empty"):
        empty_queue_prob([])


# ---------------------------------------------------------------------------
# fastest particle / equal speeds
# ---------------------------------------------------------------------------


def test_rightmost_prob_closed_values():
    assert rightmost_prob(3, 1) == 0.5
    assert rightmost_prob(3, 2) == 0.3
    assert rightmost_prob(3, 3) == 0.2
    for n in (1, 2, 5, 9):
        assert abs(sum(rightmost_prob(n, k) for k in range(1, n + 1)) - 1.0) < 1e-12
    with pytest.raises(ValueError, match="1 <= k <= n"):
        rightmost_prob(3, 0)
    with pytest.raises(ValueError, match="1 <= k <= n"):
        rightmost_prob(3, 4)


@pytest.mark.parametrize("n,k", [(3, 1), (3, 3), (5, 2), (7, 6)])
def test_rightmost_intermediate_density_integrates_to_the_probability(n, k):
    val, _ = quad(lambda y: rightmost_intermediate_density(n, k, y), 0.0, 1.0)
    assert abs(val - rightmost_prob(n, k)) < 1e-10
    with pytest.raises(ValueError, match="lie in"):
        rightmost_intermediate_density(n, k, 1.5)


def test_equal_speeds_prob_sequence():
    assert equal_speeds_prob(0) == 1.0
    assert abs(equal_speeds_prob(1) - 1.0 / 6.0) < 1e-15
    assert abs(equal_speeds_prob(2) - 1.0 / 30.0) < 1e-15
    assert abs(equal_speeds_prob(3) - 1.0 / 140.0) < 1e-15
    with pytest.raises(ValueError, match=">= 0"):
        equal_speeds_prob(-1)


# ---------------------------------------------------------------------------
# convoy gaps
# ---------------------------------------------------------------------------


def test_convoy_gap_pmf_small_distances_by_hand():
    # distance 1: a single geometric succeeds immediately, K = 1 w.p. 1/2
    assert abs(convoy_gap_pmf(0.0, 1) - 0.25) < 1e-15
    # distance 3: K = 1 with two failures, or K = 3 with three instant hits
    assert abs(convoy_gap_pmf(0.0, 3) - 5.0 / 64.0) < 1e-14
    # the law depends on the speed only through u^2
    for m in (1, 2, 5, 11):
        assert convoy_gap_pmf(0.3, m) == convoy_gap_pmf(-0.3, m)
    with pytest.raises(ValueError, match=">= 1"):
        convoy_gap_pmf(0.0, 0)
    with pytest.raises(ValueError, match="strictly inside"):
        convoy_gap_pmf(1.0, 3)


@pytest.mark.parametrize("u", [0.0, 0.5, -0.8])
def test_convoy_gap_pmf_and_tail_close_to_one(u):
    m = 200
    head = sum(convoy_gap_pmf(u, j) for j in range(1, m + 1))
    assert abs(head + convoy_gap_tail(u, m) - 1.0) < 1e-12
    tails = [convoy_gap_tail(u, j) for j in (1, 5, 25, 125)]
    assert all(a > b for a, b in zip(tails, tails[1:]))


def test_convoy_gap_tail_validation():
    with pytest.raises(ValueError, match=">= 1"):
        convoy_gap_tail(0.0, 0)


# ---------------------------------------------------------------------------
# asymmetric dynamics constants
# ---------------------------------------------------------------------------


def test_asep_values_at_the_reference_asymmetry():
    v = asep_values(0.7)
    assert abs(v.rho - 0.4) < 1e-15
    assert abs(v.swap_limit - 13.0 / 30.0) < 1e-15
    assert abs(v.r_slope - 2.0 / 15.0) < 1e-15
    total = asep_values(1.0)
    assert total.rho == 1.0
    assert abs(total.swap_limit - 1.0 / 3.0) < 1e-15
    assert abs(total.r_slope - 1.0 / 3.0) < 1e-15
    for bad in (0.5, 0.4, 1.1):
        with pytest.raises(ValueError, match="asymmetry"):
            asep_values(bad)


def test_asep_signed_density_support():
    v = asep_values(0.7)
    assert v.signed_density(0.3, -0.2) == 0.0
    assert v.signed_density(0.1, 0.1) == 0.0
    got = v.signed_density(-0.2, 0.3)
    assert abs(got - 0.5 / (4.0 * v.rho ** 2)) < 1e-15
    with pytest.raises(ValueError, match="-rho, rho"):
        v.signed_density(-0.5, 0.3)


def test_asep_interaction_prob_decay():
    v = asep_values(0.7)
    assert v.interaction_prob(0.0) == 1.0
    assert abs(v.interaction_prob(1.0) - (0.3 + 0.7 * math.exp(-1.0))) < 1e-15
    assert abs(v.interaction_prob(50.0) - 0.3) < 1e-12
    with pytest.raises(ValueError, match=">= 0"):
        v.interaction_prob(-0.1)
    assert isinstance(v, ASEPValues)


# ---------------------------------------------------------------------------
# tagged exact values
# ---------------------------------------------------------------------------


def test_exact_value_validation():
    ok = ExactValue(0.25, "probability", "two-point swap mass")
    assert ok.value == 0.25
    ExactValue(-0.5, "signed-density", "swapped-region density")  # allowed
    with pytest.raises(ValueError, match="kind must be"):
        ExactValue(0.1, "few", "x")
    with pytest.raises(ValueError, match="outside"):
        ExactValue(1.5, "probability", "x")
    with pytest.raises(ValueError, match="nonnegative"):
        ExactValue(-0.1, "density", "x")
