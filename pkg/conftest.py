"""
Shared fixtures for the test suite
"""

import sys
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from services.monoid_service import SimpleGraph, WeightMap  # noqa: E402
from services.transfer_service import TraceVec, TransferSystem, trivial_system  # noqa: E402


def scalar_system(F: float, N: float, name: str = "a") -> TransferSystem:
    """One generator acting on a one-point coefficient space"""
    graph = SimpleGraph.complete([name])
    return TransferSystem.build(graph, [np.array([[F]])], WeightMap((float(N),)))


def all_graphs(n: int):
    """Every simple graph on the vertices a, b, ... of size n"""
    names = [chr(ord("a") + i) for i in range(n)]
    pairs = list(combinations(names, 2))
    for mask in range(1 << len(pairs)):
        yield SimpleGraph.from_names(names, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def random_artin_system(rng: np.random.Generator, max_generators: int = 3, max_dim: int = 3,
                        weight_floor: float = 1.0, edge_probability: float = 0.5) -> TransferSystem:
    """Random graph with matrices a_s I + b_s M, which commute pairwise"""
    n = int(rng.integers(1, max_generators + 1))
    d = int(rng.integers(1, max_dim + 1))
    names = [chr(ord("a") + i) for i in range(n)]
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_probability]
    graph = SimpleGraph.from_names(names, edges)
    base = rng.uniform(0.0, 1.0, size=(d, d))
    matrices = [rng.uniform(0.0, 1.0) * np.eye(d) + rng.uniform(0.0, 1.0) * base for _ in names]
    weights = WeightMap(tuple(float(rng.uniform(weight_floor, weight_floor + 2.0)) for _ in names))
    return TransferSystem.build(graph, matrices, weights)


@pytest.fixture
def free_pair():
    """Free monoid on a, b with trivial fibres and N = 2"""
    graph = SimpleGraph.edgeless(["a", "b"])
    return trivial_system(graph, WeightMap.constant(graph, 2.0))


@pytest.fixture
def abelian_pair():
    """Z^2_+ with F_1 = [[1, 1], [1, 1]], N_1 = 2 and F_2 = 2I, N_2 = 4"""
    graph = SimpleGraph.complete(["e1", "e2"])
    matrices = [np.array([[1, 1], [1, 1]]), 2 * np.eye(2, dtype=np.int64)]
    return TransferSystem.build(graph, matrices, WeightMap((2.0, 4.0)), [2, 2])


@pytest.fixture
def mixed_diagonal():
    """One generator, F = diag(2, 1), N = 2: mixed at beta = 1 for tau = (1, 1)"""
    graph = SimpleGraph.complete(["a"])
    system = TransferSystem.build(graph, [np.diag([2, 1])], WeightMap((2.0,)))
    return system, TraceVec.of([1.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
