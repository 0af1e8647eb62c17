"""Shared fixtures: the heavy replica batches behind the acceptance tests.

Each fixture reproduces one cached batch of the default verification suite —
same builder, same seed offset from the suite's frozen base seed — so every
acceptance criterion reads the exact sample the shipped suite verifies, and
the expensive horizon-500 runs are built once per session.
"""

import inspect

import numpy as np
import pytest

from speedlab.harness import _pair_ledger, _tracked_batch, full_suite
from speedlab.lab import adjacency_experiment, stationarity_experiment
from speedlab.multiline import sample_stationary_batch

SUITE_SEED = inspect.signature(full_suite).parameters["seed"].default


def _ss(offset: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(SUITE_SEED + offset)


@pytest.fixture(scope="session")
def suite_seed() -> int:
    return SUITE_SEED


@pytest.fixture(scope="session")
def pair_batch500():
    """Labels 0..3 to horizon 500, 10^4 replicas (symmetric-free driver)."""
    return _tracked_batch(_ss(1), 500.0, 10_000, [0, 1, 2, 3])


@pytest.fixture(scope="session")
def conv_batch1000():
    """Labels 0..2 to horizon 1000, for the convoy-frequency criterion."""
    return _tracked_batch(_ss(2), 1000.0, 1500, [0, 1, 2])


@pytest.fixture(scope="session")
def dist_batch800():
    """Labels 0 and 4 to horizon 800, for the distant-pair criterion."""
    return _tracked_batch(_ss(3), 800.0, 2000, [0, 4])


@pytest.fixture(scope="session")
def asep_batch500():
    """Adjacent pair to horizon 500 under the p = 0.7 driver."""
    return _tracked_batch(_ss(4), 500.0, 10_000, [0, 1], mode="asep", p=0.7)


@pytest.fixture(scope="session")
def asep_ledger400():
    """Pair ledger with checkpoints 50/100/200/400 under p = 0.7."""
    return _pair_ledger(_ss(5), 400.0, 2500, 0.7, [50.0, 100.0, 200.0, 400.0])


@pytest.fixture(scope="session")
def adjacency_report():
    """Interaction-time regression batch at horizon 50 under p = 0.7."""
    return adjacency_experiment([(0, 1)], 50.0, replicas=30_000, p=0.7,
                                seed=_ss(6))


@pytest.fixture(scope="session")
def stationarity_report800():
    """Projected-class stationarity run: t1 = 800, t2 = 100, 10^4 replicas."""
    return stationarity_experiment((0.3, 0.6), 800.0, 100.0, 10_000,
                                   seed=_ss(9), reference_samples=200_000)


@pytest.fixture(scope="session")
def stationary_seqs():
    """5000 stationary class sequences of 201 sites: 10^6 adjacent pairs."""
    return sample_stationary_batch((0.3, 0.3, 0.4), 201, 5000,
                                   rng=np.random.default_rng(_ss(10)))
