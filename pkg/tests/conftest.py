"""Shared fixtures: cycle-graph spectral setups and the full default heatmap.

The default-configuration heatmap is expensive (21x21 cells, 30 trials,
100 steps), so it is computed once per session and shared between the
experiment tests and the acceptance suite.
"""
from __future__ import annotations

import numpy as np
import pytest

from graphkalman import (
    ExperimentConfig,
    build_shift,
    cycle_graph,
    distinct_eigenvalues,
    eigendecompose,
)
from graphkalman.experiment import run_heatmap


def cycle_laplacian_eigenvalues(n: int) -> np.ndarray:
    """Independent oracle: eigenvalues of the cycle Laplacian are 2 - 2cos(2 pi k / n)."""
    k = np.arange(n)
    return np.sort(2.0 - 2.0 * np.cos(2.0 * np.pi * k / n))


@pytest.fixture(scope="session")
def c4():
    graph = cycle_graph(4)
    shift = build_shift(graph, "laplacian")
    decomposition = eigendecompose(shift)
    spectrum = distinct_eigenvalues(decomposition)
    return graph, shift, decomposition, spectrum


@pytest.fixture(scope="session")
def c30():
    graph = cycle_graph(30)
    shift = build_shift(graph, "laplacian")
    decomposition = eigendecompose(shift)
    spectrum = distinct_eigenvalues(decomposition)
    return graph, shift, decomposition, spectrum


@pytest.fixture(scope="session")
def default_config() -> ExperimentConfig:
    return ExperimentConfig()


@pytest.fixture(scope="session")
def default_heatmap(default_config):
    return run_heatmap(default_config)
