"""Shared fixtures: bundled cases, hand-built toy networks, and cached
selections for the expensive 118-bus experiments."""

from __future__ import annotations

import json

import numpy as np
import pytest

from gridgsp import build_laplacian, load_case, parse_json_case
from gridgsp.placement import greedy_selection
from gridgsp.spectral import eig_laplacian

CHAIN3_JSON = json.dumps({
    "name": "chain3",
    "base_mva": 100.0,
    "buses": [
        {"id": 1, "type": "ref", "p_inj": 0.5, "q_inj": 0.0},
        {"id": 2, "type": "pq", "p_inj": -0.2, "q_inj": 0.0},
        {"id": 3, "type": "pq", "p_inj": -0.3, "q_inj": 0.0},
    ],
    "branches": [
        {"from": 1, "to": 2, "r": 0.0, "x": 0.1},
        {"from": 2, "to": 3, "r": 0.0, "x": 0.2},
    ],
})

TOY5_JSON = json.dumps({
    "name": "toy5",
    "base_mva": 100.0,
    "buses": [
        {"id": 1, "type": "ref", "p_inj": 0.9},
        {"id": 2, "type": "pq", "p_inj": -0.3},
        {"id": 3, "type": "pq", "p_inj": -0.2},
        {"id": 4, "type": "pq", "p_inj": -0.25},
        {"id": 5, "type": "pq", "p_inj": -0.15},
    ],
    "branches": [
        {"from": 1, "to": 2, "r": 0.01, "x": 0.10},
        {"from": 2, "to": 3, "r": 0.02, "x": 0.20},
        {"from": 3, "to": 4, "r": 0.02, "x": 0.25},
        {"from": 4, "to": 5, "r": 0.03, "x": 0.50},
        {"from": 5, "to": 1, "r": 0.02, "x": 0.20},
        {"from": 2, "to": 5, "r": 0.03, "x": 0.40},
    ],
})


@pytest.fixture(scope="session")
def chain3():
    return parse_json_case(CHAIN3_JSON)


@pytest.fixture(scope="session")
def chain3_lap(chain3):
    return build_laplacian(chain3)


@pytest.fixture(scope="session")
def toy5():
    return parse_json_case(TOY5_JSON)


@pytest.fixture(scope="session")
def toy5_lap(toy5):
    return build_laplacian(toy5)


@pytest.fixture(scope="session")
def case14():
    return load_case("case14")


@pytest.fixture(scope="session")
def case14_lap(case14):
    return build_laplacian(case14)


@pytest.fixture(scope="session")
def case30():
    return load_case("case30")


@pytest.fixture(scope="session")
def case30_lap(case30):
    return build_laplacian(case30)


@pytest.fixture(scope="session")
def case57():
    return load_case("case57")


@pytest.fixture(scope="session")
def case118():
    return load_case("case118")


@pytest.fixture(scope="session")
def case118_lap(case118):
    return build_laplacian(case118)


@pytest.fixture(scope="session")
def case118_greedy48(case118, case118_lap):
    """Greedy 48-bus selection at the headline parameters; computed once."""
    return greedy_selection(case118_lap, 48, mu=0.1, R=0.01,
                            reference_bus=case118.reference_bus)


def random_connected_laplacian(rng, n_max=20):
    """Random connected weighted graph for property checks.

    Spanning tree over a random permutation plus a few extra edges, weights
    uniform in [0.5, 5].  Returns a LaplacianMatrix.
    """
    from gridgsp.netcase import LaplacianMatrix

    n = int(rng.integers(3, n_max + 1))
    order = rng.permutation(n) + 1
    weights = {}
    for i in range(1, n):
        a = int(order[i])
        b = int(order[rng.integers(0, i)])
        weights[tuple(sorted((a, b)))] = float(rng.uniform(0.5, 5.0))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False) + 1
        weights.setdefault(tuple(sorted((int(a), int(b)))), float(rng.uniform(0.5, 5.0)))
    weights = dict(sorted(weights.items()))
    L = np.zeros((n, n))
    for (k, m), w in weights.items():
        L[k - 1, m - 1] -= w
        L[m - 1, k - 1] -= w
        L[k - 1, k - 1] += w
        L[m - 1, m - 1] += w
    return LaplacianMatrix(matrix=L, edge_weights=weights)
