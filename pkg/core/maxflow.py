# core/maxflow.py
"""
Graf s-t berarah dengan kapasitas integer dan solver max-flow/min-cut.

FlowGraph menyimpan busur berpasangan (busur 2k maju, 2k+1 balik) agar
kapasitas cut bisa dihitung ulang secara independen dari solver.
Penyelesaian didelegasikan ke PyMaxflow (Boykov-Kolmogorov); hasilnya
selalu diverifikasi dengan dualitas flow == kapasitas cut.
"""
import logging
from numbers import Integral
from typing import List, Tuple

import maxflow as pymaxflow
import numpy as np

from core.error_handler import ArgumentError, MultiscopicError

LARGE = 2 ** 30
# Kapasitas disimpan sebagai double di solver; integer eksak sampai 2^53
MAX_CAPACITY = 2 ** 52


def _as_capacity_array(values, count: int) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim == 0:
        array = np.full(count, array)
    if array.shape != (count,):
        raise ArgumentError(f"Jumlah kapasitas ({array.shape}) tidak sama dengan jumlah busur ({count}).")
    if array.size and not np.issubdtype(array.dtype, np.integer):
        if not np.issubdtype(array.dtype, np.floating) or not np.all(array == np.round(array)):
            raise ArgumentError("Kapasitas harus bilangan bulat.")
    array = array.astype(np.int64)
    if array.size and (array.min() < 0 or array.max() > MAX_CAPACITY):
        raise ArgumentError(f"Kapasitas harus di [0, {MAX_CAPACITY}].")
    return array


class FlowGraph:
    """Node padat [0, n); source dan sink adalah dua node di antaranya."""

    def __init__(self, node_count: int, source: int = 0, sink: int = 1):
        if node_count < 2:
            raise ArgumentError("FlowGraph membutuhkan minimal dua node (source dan sink).")
        for name, node in (("source", source), ("sink", sink)):
            if not 0 <= node < node_count:
                raise ArgumentError(f"Node {name} {node} di luar rentang [0, {node_count}).")
        if source == sink:
            raise ArgumentError("Source dan sink harus node yang berbeda.")
        self.node_count = node_count
        self.source = source
        self.sink = sink
        self._tails: List[np.ndarray] = []
        self._heads: List[np.ndarray] = []
        self._caps: List[np.ndarray] = []
        self._rev_caps: List[np.ndarray] = []

    def _check_nodes(self, nodes: np.ndarray):
        if nodes.size and (nodes.min() < 0 or nodes.max() >= self.node_count):
            raise ArgumentError(f"Id node di luar rentang [0, {self.node_count}).")

    def add_edge(self, tail: int, head: int, capacity: int, rev_capacity: int = 0):
        for value in (capacity, rev_capacity):
            if not isinstance(value, (Integral, np.integer)) and not (isinstance(value, float) and value.is_integer()):
                raise ArgumentError(f"Kapasitas harus bilangan bulat, diberikan {value!r}.")
        self.add_edges([tail], [head], [int(capacity)], [int(rev_capacity)])

    def add_edges(self, tails, heads, capacities, rev_capacities=0):
        """Versi vektor dari add_edge; satu pasangan busur per elemen."""
        tails = np.asarray(tails, dtype=np.int64).ravel()
        heads = np.asarray(heads, dtype=np.int64).ravel()
        if tails.shape != heads.shape:
            raise ArgumentError("Jumlah tail dan head busur harus sama.")
        self._check_nodes(tails)
        self._check_nodes(heads)
        if np.any(tails == heads):
            raise ArgumentError("Self-loop tidak diizinkan.")
        self._tails.append(tails)
        self._heads.append(heads)
        self._caps.append(_as_capacity_array(capacities, tails.size))
        self._rev_caps.append(_as_capacity_array(rev_capacities, tails.size))

    @property
    def arc_count(self) -> int:
        return 2 * sum(t.size for t in self._tails)

    def arcs(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(tail, head, capacity) untuk semua busur, busur 2k maju dan 2k+1 baliknya."""
        if not self._tails:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        tails = np.concatenate(self._tails)
        heads = np.concatenate(self._heads)
        caps = np.concatenate(self._caps)
        rev = np.concatenate(self._rev_caps)
        arc_tails = np.empty(2 * tails.size, dtype=np.int64)
        arc_heads = np.empty_like(arc_tails)
        arc_caps = np.empty_like(arc_tails)
        arc_tails[0::2], arc_tails[1::2] = tails, heads
        arc_heads[0::2], arc_heads[1::2] = heads, tails
        arc_caps[0::2], arc_caps[1::2] = caps, rev
        return arc_tails, arc_heads, arc_caps

    def cut_capacity(self, source_side: np.ndarray) -> int:
        """Jumlah kapasitas busur dari sisi source ke sisi sink."""
        source_side = np.asarray(source_side, dtype=bool)
        if source_side.shape != (self.node_count,):
            raise ArgumentError("Partisi harus berisi satu boolean per node.")
        tails, heads, caps = self.arcs()
        crossing = source_side[tails] & ~source_side[heads]
        return int(caps[crossing].sum())


def _add_regular_edges(solver, tails: np.ndarray, heads: np.ndarray, caps: np.ndarray):
    """Semua busur non-terminal dalam satu panggilan ke solver."""
    capacities = caps.astype(np.float64)
    if hasattr(solver, "add_edges"):
        solver.add_edges(tails.astype(np.int_), heads.astype(np.int_), capacities, np.zeros_like(capacities))
        return
    # PyMaxflow lama tanpa add_edges
    for u, v, c in zip(tails.tolist(), heads.tolist(), capacities.tolist()):
        solver.add_edge(u, v, c, 0.0)


def max_flow(graph: FlowGraph) -> Tuple[int, np.ndarray]:
    """
    Menghitung max-flow dan min-cut.
    Mengembalikan (nilai flow, array boolean True = node di sisi source).
    """
    tails, heads, caps = graph.arcs()
    s, t = graph.source, graph.sink
    n = graph.node_count

    direct = int(caps[(tails == s) & (heads == t)].sum())
    # Busur ke source / dari sink tidak bisa membawa flow s-t
    inner = (caps > 0) & (tails != t) & (heads != s) & ~((tails == s) & (heads == t))
    from_source = inner & (tails == s)
    to_sink = inner & (heads == t)
    regular = inner & ~from_source & ~to_sink

    source_caps = np.zeros(n, dtype=np.float64)
    sink_caps = np.zeros(n, dtype=np.float64)
    np.add.at(source_caps, heads[from_source], caps[from_source])
    np.add.at(sink_caps, tails[to_sink], caps[to_sink])

    solver = pymaxflow.Graph[float](n, int(regular.sum()))
    nodes = solver.add_nodes(n)
    solver.add_grid_tedges(nodes, source_caps, sink_caps)
    _add_regular_edges(solver, tails[regular], heads[regular], caps[regular])
    flow = int(round(solver.maxflow())) + direct

    source_side = ~np.asarray(solver.get_grid_segments(nodes), dtype=bool)
    source_side[s] = True
    source_side[t] = False

    cut = graph.cut_capacity(source_side)
    if cut != flow:
        raise MultiscopicError(f"Dualitas max-flow dilanggar: flow {flow} != kapasitas cut {cut}.")
    logging.debug(f"[MAXFLOW] {n} node, {graph.arc_count} busur, flow {flow}")
    return flow, source_side
