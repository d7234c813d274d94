"""Shared fixtures: seeded rng and a session cache of expensive ladders.

The minimization ladders dominate the suite runtime (several minutes each at
the finest rungs), and several test modules want the same ones. The cache
computes each ladder once, on first request, and keeps the full per-rung
reports so diagnostics tests can reuse the converged profiles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from neelwall.asymptotics import DEFAULT_LADDER, EXTENDED_LADDER, run_ladder
from neelwall.corelab import DEFAULT_CORE_LADDER, extract_core_energy
from neelwall.domain import WallConfig

ALPHA = math.pi / 2

STUDY_CONFIGS = {
    # single wall at three positions, used for absolute sweeps, position
    # differences, and the full-vs-linear shift comparison
    "a0": WallConfig(alpha=ALPHA, positions=(0.0,), signs=(1,)),
    "a3": WallConfig(alpha=ALPHA, positions=(0.3,), signs=(1,)),
    "a5": WallConfig(alpha=ALPHA, positions=(0.5,), signs=(1,)),
    # same-sign pair at two separations, used for the N=2 difference
    "s06": WallConfig(alpha=ALPHA, positions=(-0.3, 0.3), signs=(1, 1)),
    "s03": WallConfig(alpha=ALPHA, positions=(-0.15, 0.15), signs=(1, 1)),
}

STUDY_LADDERS = {
    "a0": DEFAULT_LADDER,
    "a3": DEFAULT_LADDER,
    "a5": DEFAULT_LADDER,
    "s06": EXTENDED_LADDER,
    "s03": EXTENDED_LADDER,
}


class LadderCache:
    def __init__(self):
        self._full = {}
        self._linear = {}
        self._core = None

    @staticmethod
    def config(key: str) -> WallConfig:
        return STUDY_CONFIGS[key]

    @staticmethod
    def epsilons(key: str):
        return STUDY_LADDERS[key]

    def full(self, key: str):
        if key not in self._full:
            points, _ = run_ladder(STUDY_CONFIGS[key], STUDY_LADDERS[key],
                                   model="full")
            self._full[key] = points
        return self._full[key]

    def full_many(self, keys, threads: int = 2):
        """Compute several full ladders concurrently (chains release the GIL
        in the FFT and linear algebra kernels, so two threads nearly halve
        the wall time)."""
        missing = [k for k in keys if k not in self._full]
        if len(missing) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                futures = {k: ex.submit(run_ladder, STUDY_CONFIGS[k],
                                        STUDY_LADDERS[k], "full")
                           for k in missing}
                for k, fut in futures.items():
                    self._full[k] = fut.result()[0]
        return [self.full(k) for k in keys]

    def linear(self, key: str):
        if key not in self._linear:
            points, _ = run_ladder(STUDY_CONFIGS[key], STUDY_LADDERS[key],
                                   model="linear")
            self._linear[key] = points
        return self._linear[key]

    def core(self):
        if self._core is None:
            self._core = extract_core_energy(1.0, DEFAULT_CORE_LADDER)
        return self._core


@pytest.fixture(scope="session")
def ladders():
    return LadderCache()


@pytest.fixture
def rng():
    return np.random.default_rng(20601)
