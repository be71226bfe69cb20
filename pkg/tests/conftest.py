"""Shared fixtures; the expensive default-scale artifacts build once per session."""

from __future__ import annotations

import numpy as np
import pytest

import deg
from deg.synth import SynthSpec, generate


@pytest.fixture(scope="session")
def small_uniform():
    """300 uniform points, handy for oracle-checked unit tests."""
    rng = np.random.default_rng(11)
    dataset = deg.normalize_dataset(
        rng.uniform(size=(300, 6)).astype(np.float32),
        rng.uniform(size=(300, 3)).astype(np.float32),
    )
    queries_e = rng.uniform(size=(100, 6)).astype(np.float32)
    queries_s = rng.uniform(size=(100, 3)).astype(np.float32)
    return dataset, queries_e, queries_s


@pytest.fixture(scope="session")
def small_index(small_uniform):
    dataset, _, _ = small_uniform
    return deg.build(dataset, m_max=10, ef_construction=40, th=0.1)


@pytest.fixture(scope="session")
def default_synth():
    """The default desk-scale synthetic set: 5000 objects plus held-out queries."""
    return generate(SynthSpec())


@pytest.fixture(scope="session")
def default_index(default_synth):
    dataset, _, _ = default_synth
    return deg.build(dataset)


@pytest.fixture(scope="session")
def fusion_half(default_synth):
    dataset, _, _ = default_synth
    return deg.build_fusion_baseline(dataset, 0.5, 40, 200)
