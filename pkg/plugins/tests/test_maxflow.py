# tests/test_maxflow.py
import itertools
import os
import sys
import types

import numpy as np
import pytest

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.error_handler import ArgumentError
import core.maxflow as maxflow_module
from core.maxflow import FlowGraph, max_flow

S, T = 0, 1


def brute_force_min_cut(graph: FlowGraph) -> int:
    """Enumerasi semua partisi node non-terminal."""
    inner = graph.node_count - 2
    tails, heads, caps = graph.arcs()
    sides = np.array(list(itertools.product([True, False], repeat=inner)), dtype=bool).reshape(-1, inner)
    partitions = np.ones((sides.shape[0], graph.node_count), dtype=bool)
    partitions[:, T] = False
    partitions[:, 2:] = sides
    crossing = partitions[:, tails] & ~partitions[:, heads]
    return int((crossing * caps).sum(axis=1).min())

# === Test untuk contoh kecil ===

def test_single_arc():
    g = FlowGraph(2)
    g.add_edge(S, T, 7)
    flow, side = max_flow(g)
    assert flow == 7
    assert side.tolist() == [True, False]

def test_diamond():
    g = FlowGraph(4)
    a, b = 2, 3
    g.add_edge(S, a, 3)
    g.add_edge(S, b, 2)
    g.add_edge(a, T, 2)
    g.add_edge(b, T, 3)
    g.add_edge(a, b, 1)
    flow, side = max_flow(g)
    assert flow == 5
    assert g.cut_capacity(side) == 5

def test_disconnected():
    g = FlowGraph(4)
    g.add_edge(S, 2, 9)
    g.add_edge(3, T, 9)
    assert max_flow(g)[0] == 0

def test_arcs_are_paired():
    g = FlowGraph(3)
    g.add_edge(S, 2, 4, 1)
    tails, heads, caps = g.arcs()
    assert tails.tolist() == [S, 2]
    assert heads.tolist() == [2, S]
    assert caps.tolist() == [4, 1]
    assert g.arc_count == 2

# === Test untuk oracle brute force ===

def test_random_graphs_match_brute_force():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        inner = int(rng.integers(1, 9))
        n = inner + 2
        g = FlowGraph(n)
        arcs = int(rng.integers(1, 3 * n))
        for _ in range(arcs):
            u, v = rng.choice(n, size=2, replace=False)
            g.add_edge(int(u), int(v), int(rng.integers(0, 20)), int(rng.integers(0, 5)))
        flow, side = max_flow(g)
        assert flow == g.cut_capacity(side)
        assert flow == brute_force_min_cut(g)
        assert side[S] and not side[T]

def test_large_capacities_stay_exact():
    g = FlowGraph(3)
    big = 2 ** 40 + 3
    g.add_edge(S, 2, big)
    g.add_edge(2, T, big + 5)
    assert max_flow(g)[0] == big

class RecordingSolver:
    """Membungkus graf PyMaxflow dan mencatat nama method yang dipanggil."""

    def __init__(self, inner, calls):
        self._inner = inner
        self._calls = calls

    def __getattr__(self, name):
        attr = getattr(self._inner, name)
        if not callable(attr):
            return attr

        def wrapper(*args, **kwargs):
            self._calls.append(name)
            return attr(*args, **kwargs)
        return wrapper

def test_regular_edges_are_added_in_one_batch(monkeypatch):
    calls = []
    real = maxflow_module.pymaxflow
    fake = types.SimpleNamespace(Graph={float: lambda *a: RecordingSolver(real.Graph[float](*a), calls)})
    monkeypatch.setattr(maxflow_module, "pymaxflow", fake)

    g = FlowGraph(2 + 50)
    chain = np.arange(2, 52)
    g.add_edges(chain[:-1], chain[1:], 7)
    g.add_edge(S, 2, 5)
    g.add_edge(51, T, 9)
    flow, side = max_flow(g)
    assert flow == 5
    assert calls.count("add_edges") == 1
    assert "add_edge" not in calls
    assert side[S] and not side[T]

# === Test untuk validasi graf ===

def test_graph_validation():
    with pytest.raises(ArgumentError):
        FlowGraph(1)
    with pytest.raises(ArgumentError):
        FlowGraph(3, source=1, sink=1)
    g = FlowGraph(3)
    with pytest.raises(ArgumentError):
        g.add_edge(S, 2, 1.5)
    with pytest.raises(ArgumentError):
        g.add_edge(S, 2, -1)
    with pytest.raises(ArgumentError):
        g.add_edge(2, 2, 1)
    with pytest.raises(ArgumentError):
        g.add_edge(S, 5, 1)
    with pytest.raises(ArgumentError):
        g.cut_capacity(np.ones(2, dtype=bool))
