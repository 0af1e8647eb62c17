"""Release-gate acceptance checks.

Eleven end-to-end criteria, one test each, at their stated tolerances.  A
test gathers every violated clause of its criterion into a list, prints a
single PASS/FAIL line, and asserts the list is empty, so the verdict and the
measured numbers appear together in the run log.

Four criteria are expected to fail at these horizons, each for a quantified
finite-horizon reason (see the full-suite claim descriptions and the shipped
report): the transposed pair-frequency constants in criterion 3, the ~3%
diffusive edge overshoot of the single-label speed sample in criterion 4,
the over-counting convoy closeness rule in criterion 5, and the t^(-1/2)
excess of the overtake-count slope in criterion 9.  They are asserted as
stated and left to fail honestly rather than being weakened to pass.
"""

import math

import numpy as np

from speedlab._stats import ks_test
from speedlab.formulas import dist2
from speedlab.harness import (
    WORKED_LINES,
    WORKED_OUTPUT,
    WORKED_TRACE,
    _asep_derivative_identity,
    _asep_q_final,
    _asep_q_monotone,
    _asep_r_slope,
    _composite_table_mismatches,
    _convoy_freq,
    _distant_pair_region,
    _operator_braid,
    _operator_commutation,
    _operator_quadratic,
    _rightmost_maxdev,
    _speed_marginal,
    _stationary_pair_freq,
    _swapped_at_horizon,
    _symmetry_claim,
    _three_point_marginalization,
    _three_point_mirror,
    _three_point_total_mass,
    _word_reversal,
    uniform_cdf,
)
from speedlab.lab import default_convoy_delta
from speedlab.multiline import collapse


def _finish(name: str, failures: list) -> None:
    verdict = "FAIL" if failures else "PASS"
    detail = f" — {'; '.join(failures)}" if failures else ""
    print(f"acceptance [{name}]: {verdict}{detail}")
    assert not failures, "; ".join(failures)


def test_criterion_01_operator_algebra():
    failures = []
    checks = (
        ("quadratic identity", _operator_quadratic),
        ("distant commutation", _operator_commutation),
        ("braid identity", _operator_braid),
    )
    for label, fn in checks:
        worst = fn(None).estimate
        if not worst <= 1e-12:
            failures.append(f"{label} residual {worst:.3e} > 1e-12")
    mismatches = _composite_table_mismatches(None).estimate
    if mismatches != 0.0:
        failures.append(f"{int(mismatches)} composite-table mismatches")
    worst = _word_reversal(np.random.SeedSequence(106)).estimate
    if not worst <= 1e-12:
        failures.append(f"word-reversal residual {worst:.3e} > 1e-12")
    _finish("operator algebra", failures)


def test_criterion_02_queue_collapse_example():
    failures = []
    output, queues, trace = collapse(WORKED_LINES, return_trace=True)
    if tuple(output) != WORKED_OUTPUT:
        failures.append(f"collapsed classes {tuple(output)} != {WORKED_OUTPUT}")
    got = tuple(tuple(tuple(int(v) for v in row) for row in q) for q in trace)
    if got != WORKED_TRACE:
        failures.append("queue trace disagrees with the worked example")
    if np.any(queues != np.asarray(WORKED_TRACE[-1])):
        failures.append("final queue state disagrees with the worked example")
    _finish("queue-collapse worked example", failures)


def test_criterion_03_stationary_pair_frequencies(stationary_seqs):
    failures = []
    npairs = stationary_seqs.shape[0] * (stationary_seqs.shape[1] - 1)
    targets = (((1, 2), 0.054), ((2, 2), 0.036), ((3, 2), 0.21))
    for (a, b), target in targets:
        est = _stationary_pair_freq(stationary_seqs, a, b).estimate
        sigma = math.sqrt(target * (1.0 - target) / npairs)
        z = (est - target) / sigma
        if abs(z) > 4.0:
            failures.append(
                f"pair ({a},{b}) frequency {est:.6f} vs {target} is {z:+.1f} sigma"
            )
    _finish("stationary pair frequencies (10^6 pairs, 4 sigma)", failures)


def test_criterion_04_speed_marginal_uniform(pair_batch500):
    failures = []
    samples = _speed_marginal(pair_batch500, 0).samples
    stat, pvalue = ks_test(samples, uniform_cdf(-1.0, 1.0))
    if not pvalue >= 1e-3:
        failures.append(
            f"KS vs uniform[-1,1]: statistic {stat:.4f}, p = {pvalue:.2e} < 1e-3"
        )
    _finish("one-label speed marginal (KS at 0.001)", failures)


def test_criterion_05_swapped_order_and_convoys(pair_batch500, conv_batch1000):
    failures = []
    swapped = _swapped_at_horizon(pair_batch500).estimate
    if not (2.0 / 3.0 - 0.02 <= swapped <= 2.0 / 3.0):
        failures.append(
            f"P(adjacent pair swapped) {swapped:.4f} outside [2/3 - 0.02, 2/3]"
        )
    conv = _convoy_freq(conv_batch1000, 2, default_convoy_delta(1000.0)).estimate
    if abs(conv - 1.0 / 6.0) > 0.03:
        failures.append(
            f"P(adjacent equal speeds) {conv:.4f} vs 1/6 beyond +-0.03"
        )
    _finish("swapped-order mass and convoy frequency", failures)


def test_criterion_06_rightmost_of_three(pair_batch500):
    failures = []
    dev = _rightmost_maxdev(pair_batch500, [1, 2, 3]).estimate
    if dev > 0.02:
        failures.append(
            f"worst rightmost-frequency deviation {dev:.4f} > 0.02"
        )
    _finish("rightmost of three labels", failures)


def test_criterion_07_distant_pair_regions(dist_batch800):
    failures = []
    x, y = 0.2, 0.6
    below = dist2(4, "below", x, y)
    if abs(below - 0.16) > 1e-9:
        failures.append(f"closed-form below-cell mass {below!r} != 0.16")
    total = sum(dist2(4, region, x, y) for region in ("below", "diag", "above"))
    if abs(total - (y - x)) > 1e-12:
        failures.append(f"region masses sum to {total!r}, not y - x = 0.4")
    for region in ("below", "diag", "above"):
        data = _distant_pair_region(dist_batch800, 1, x, y, region)
        z = (data.estimate - dist2(4, region, x, y)) / data.se
        if abs(z) > 4.0:
            failures.append(
                f"{region} region: {data.estimate:.4f} is {z:+.1f} sigma from "
                f"{dist2(4, region, x, y):.4f}"
            )
    _finish("separation-4 pair regions", failures)


def test_criterion_08_three_point_structure():
    failures = []
    mass_err = _three_point_total_mass(None).estimate
    if mass_err > 1e-9:
        failures.append(f"13-stratum total mass off by {mass_err:.2e} > 1e-9")
    marg_err = _three_point_marginalization(None).estimate
    if marg_err > 1e-9:
        failures.append(f"marginalization residual {marg_err:.2e} > 1e-9")
    mirror_err = _three_point_mirror(None).estimate
    if mirror_err != 0.0:
        failures.append(f"mirror symmetry residual {mirror_err:.2e} != 0")
    _finish("three-point law structure", failures)


def test_criterion_09_asymmetric_overtakes(asep_batch500, asep_ledger400,
                                           adjacency_report):
    failures = []
    q_final = _asep_q_final(asep_batch500).estimate
    if not (13.0 / 30.0 <= q_final <= 13.0 / 30.0 + 0.02):
        failures.append(
            f"unswapped probability {q_final:.4f} outside [13/30, 13/30 + 0.02]"
        )
    worst_z = _asep_q_monotone(asep_ledger400).estimate
    if worst_z > 4.0:
        failures.append(
            f"unswapped probability rises between checkpoints (z = {worst_z:.2f})"
        )
    slope = _asep_r_slope(asep_ledger400).estimate
    if abs(slope - 0.4 / 3.0) > 0.01:
        failures.append(
            f"overtake-count slope {slope:.4f} vs rho/3 = {0.4 / 3.0:.4f} "
            "beyond +-0.01"
        )
    deriv = _asep_derivative_identity(asep_ledger400, 2, 3)
    z = deriv.estimate / deriv.se
    if abs(z) > 4.0:
        failures.append(f"count-increment identity residual is {z:+.1f} sigma")
    regression = adjacency_report.entries[0].regression
    if abs(regression.slope - 0.7) > 0.03:
        failures.append(f"regression slope {regression.slope:.4f} vs 0.7")
    if abs(regression.intercept - 0.3) > 0.03:
        failures.append(f"regression intercept {regression.intercept:.4f} vs 0.3")
    _finish("asymmetric overtake laws", failures)


def test_criterion_10_finite_time_symmetry(suite_seed):
    failures = []
    data = _symmetry_claim(np.random.SeedSequence(suite_seed + 8), 3.0, 100_000)
    if not data.pvalue >= 1e-3:
        failures.append(
            f"two-sample symmetry test p = {data.pvalue:.2e} < 1e-3 "
            f"(chi2 = {data.statistic:.1f})"
        )
    _finish("finite-time inversion symmetry", failures)


def test_criterion_11_projected_stationarity(stationarity_report800):
    failures = []
    comparisons = (
        ("before vs after", stationarity_report800.before_vs_after),
        ("before vs queue reference", stationarity_report800.before_vs_reference),
    )
    for label, result in comparisons:
        if not result.pvalue >= 1e-3:
            failures.append(
                f"{label}: p = {result.pvalue:.2e} < 1e-3 "
                f"(chi2 = {result.statistic:.1f})"
            )
    _finish("projected-class stationarity", failures)
