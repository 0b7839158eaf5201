# core/graphcut.py
"""
Optimasi disparitas berbasis energi dengan penanganan oklusi.

E = data (cost BT hasil fusion) + K per piksel occluded + smoothness
antar tetangga 4-connected, diminimalkan dengan expansion move via min-cut.
Satu label per piksel tengah: OCCLUDED atau disparitas di [d_min, d_max].

Semua energi dihitung dalam "unit" integer (koefisien x energy_scale, dibulatkan).
"""
import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, replace
from typing import Callable, List, Mapping, Optional, Tuple, Union

import numpy as np

from core.capture import MultiscopicSet, ViewDirection
from core.cost import CostVolume, bt_volume
from core.error_handler import ArgumentError, MultiscopicError
from core.fusion import DEFAULT_RATIO, STRATEGIES, fuse
from core.imgio import DisparityMap, resize_bilinear, round_half_up
from core.maxflow import LARGE, FlowGraph, max_flow

OCCLUDED = -1
SOURCE, SINK = 0, 1

Labeling = np.ndarray
ProgressCallback = Callable[[str, str], None]


@dataclass(frozen=True)
class GcParams:
    K: float = 10.0
    lambda1: float = 9.0
    lambda2: float = 3.0
    theta: float = 8.0
    d_cutoff: int = 5
    d_min: int = 1
    d_max: int = 60
    upscale: int = 1
    max_sweeps: int = 4
    seed: int = 0
    fusion: str = "heuristic"
    heuristic_ratio: float = DEFAULT_RATIO
    bt_literal: bool = False
    energy_scale: int = 16

    def __post_init__(self):
        if not self.K > 0:
            raise ArgumentError(f"Penalti oklusi K harus > 0, diberikan {self.K}.")
        if not self.lambda1 >= self.lambda2 >= 0:
            raise ArgumentError(f"Harus lambda1 >= lambda2 >= 0, diberikan {self.lambda1}, {self.lambda2}.")
        if self.theta < 0:
            raise ArgumentError(f"theta harus >= 0, diberikan {self.theta}.")
        if self.d_cutoff < 1:
            raise ArgumentError(f"d_cutoff harus >= 1, diberikan {self.d_cutoff}.")
        if self.d_min < 0 or self.d_max < self.d_min:
            raise ArgumentError(f"Rentang disparitas tidak valid: [{self.d_min}, {self.d_max}].")
        if int(self.upscale) != self.upscale or self.upscale < 1:
            raise ArgumentError(f"upscale harus bilangan bulat >= 1, diberikan {self.upscale}.")
        if self.max_sweeps < 1:
            raise ArgumentError(f"max_sweeps harus >= 1, diberikan {self.max_sweeps}.")
        if self.fusion not in STRATEGIES:
            raise ArgumentError(f"Strategi fusion tidak dikenal: '{self.fusion}'.")
        if self.energy_scale < 1:
            raise ArgumentError(f"energy_scale harus >= 1, diberikan {self.energy_scale}.")

    def scaled(self) -> "GcParams":
        """Parameter pada resolusi kerja: rentang disparitas dan cutoff dikali upscale."""
        u = int(self.upscale)
        if u == 1:
            return self
        return replace(self, d_min=self.d_min * u, d_max=self.d_max * u, d_cutoff=self.d_cutoff * u, upscale=1)


def _units(value: Union[float, np.ndarray], scale: int):
    return round_half_up(np.asarray(value, dtype=np.float64) * scale).astype(np.int64)


@dataclass
class MoveTerms:
    """
    Energi satu expansion move atas dua variabel biner per piksel:
    y = 1 meninggalkan label saat ini, a = 1 mengambil alpha.
    (0,0) label lama, (1,1) alpha, (1,0) occluded, (0,1) terlarang.

    Term pasangan per edge (p, q) = const + linear . (yp, ap, yq, aq)
    + quadratic . (yp*yq, yp*aq, ap*yq), dengan semua koefisien kuadratik <= 0.
    """
    unary: np.ndarray      # (n, 2, 2) indeks [y, a]
    edge_p: np.ndarray
    edge_q: np.ndarray
    const: np.ndarray      # (E,)
    linear: np.ndarray     # (E, 4)
    quadratic: np.ndarray  # (E, 3)

    def evaluate(self, y: np.ndarray, a: np.ndarray) -> int:
        y = np.asarray(y, dtype=np.int64).ravel()
        a = np.asarray(a, dtype=np.int64).ravel()
        unary = self.unary[np.arange(y.size), y, a].sum()
        yp, ap, yq, aq = y[self.edge_p], a[self.edge_p], y[self.edge_q], a[self.edge_q]
        variables = np.stack([yp, ap, yq, aq], axis=1)
        products = np.stack([yp * yq, yp * aq, ap * yq], axis=1)
        pair = self.const + (self.linear * variables).sum(axis=1) + (self.quadratic * products).sum(axis=1)
        return int(unary + pair.sum())

    def build_graph(self) -> Tuple[FlowGraph, int]:
        """Graf min-cut; node di sisi sink berarti variabel bernilai 1."""
        if np.any(self.quadratic > 0):
            raise MultiscopicError("Term pasangan move tidak submodular.")
        n = self.unary.shape[0]
        y_nodes = 2 + np.arange(n)
        a_nodes = 2 + n + np.arange(n)
        graph = FlowGraph(2 + 2 * n, SOURCE, SINK)
        e1 = np.zeros(2 + 2 * n, dtype=np.int64)

        e00, e01, e10, e11 = (self.unary[:, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
        constant = int(e00.sum())
        np.add.at(e1, y_nodes, e10 - e00)
        np.add.at(e1, a_nodes, e11 - e10)
        coupling = e01 + e10 - e00 - e11
        if np.any(coupling < 0):
            raise MultiscopicError("Term unary move tidak submodular.")
        graph.add_edges(y_nodes, a_nodes, coupling)

        yp, ap = y_nodes[self.edge_p], a_nodes[self.edge_p]
        yq, aq = y_nodes[self.edge_q], a_nodes[self.edge_q]
        constant += int(self.const.sum())
        for column, nodes in enumerate((yp, ap, yq, aq)):
            np.add.at(e1, nodes, self.linear[:, column])
        # Suku perkalian c*x*z (c <= 0) = c*z + (-c)*(1-x)*z
        for column, (x, z) in enumerate(((yp, yq), (yp, aq), (ap, yq))):
            c = self.quadratic[:, column]
            used = c < 0
            np.add.at(e1, z[used], c[used])
            graph.add_edges(x[used], z[used], -c[used])

        nodes = np.arange(2, 2 + 2 * n)
        terms = e1[2:]
        constant += int(np.minimum(terms, 0).sum())
        graph.add_edges(np.full(nodes.size, SOURCE), nodes, np.maximum(terms, 0))
        graph.add_edges(nodes, np.full(nodes.size, SINK), np.maximum(-terms, 0))
        return graph, constant


@dataclass
class MoveSpace:
    """
    Pilihan per piksel dalam satu expansion move.
    take_ok: boleh pindah ke alpha. occlude_ok: boleh pindah ke OCCLUDED.
    disagree: edge dengan dua label berbeda yang bukan OCCLUDED.
    tied: edge yang kedua ujungnya harus sama-sama tetap atau sama-sama ke alpha.
    """
    take_ok: np.ndarray
    occlude_ok: np.ndarray
    disagree: np.ndarray
    tied: np.ndarray


class EnergyModel:
    """Term data, oklusi dan smoothness yang sudah dikuantisasi ke unit integer."""

    def __init__(self, data: CostVolume, center: np.ndarray, views: Mapping[ViewDirection, np.ndarray],
                 params: GcParams):
        center = np.asarray(center, dtype=np.float64)
        if center.shape != (data.height, data.width):
            raise ArgumentError("Dimensi gambar tengah tidak cocok dengan cost volume data.")
        for direction, img in views.items():
            if np.shape(img) != center.shape:
                raise ArgumentError(f"Dimensi view {direction.value} tidak cocok dengan gambar tengah.")
        self.params = params
        self.scale = params.energy_scale
        self.shape = center.shape
        self.d_min, self.d_max = data.d_min, data.d_max
        self.K = int(_units(params.K, self.scale))
        self.lambda1 = int(_units(params.lambda1, self.scale))
        self.lambda2 = int(_units(params.lambda2, self.scale))

        labels = data.cost.shape[0]
        self.data_units = _units(data.cost, self.scale).reshape(labels, -1)
        self.data_ok = data.valid.reshape(labels, -1)

        h, w = self.shape
        index = np.arange(h * w).reshape(h, w)
        self.edge_p = np.concatenate([index[:, :-1].ravel(), index[:-1, :].ravel()])
        self.edge_q = np.concatenate([index[:, 1:].ravel(), index[1:, :].ravel()])
        self.ys, self.xs = (a.ravel() for a in np.indices(self.shape))
        flat = center.ravel()
        self.center_diff = np.abs(flat[self.edge_p] - flat[self.edge_q])
        self.views = [(d.offset, np.asarray(img, dtype=np.float64)) for d, img in views.items()]

    @classmethod
    def from_set(cls, mset: MultiscopicSet, params: GcParams, executor: Optional[Executor] = None) -> "EnergyModel":
        """Cost BT per view surround (paralel bila ada executor), digabung dengan aturan fusion BM."""
        gray = mset.grayscale()

        def build(direction):
            return bt_volume(gray.center, gray.surround[direction], direction, params.d_min, params.d_max,
                             literal=params.bt_literal)

        if executor is not None:
            volumes = list(executor.map(build, gray.directions))
        else:
            volumes = [build(d) for d in gray.directions]
        fused = fuse(volumes, params.fusion, params.heuristic_ratio)
        views = {direction: img.as_float() for direction, img in gray.surround.items()}
        return cls(fused, gray.center.as_float(), views, params)

    def _lookup(self, img: np.ndarray, pixels: np.ndarray, d: np.ndarray, offset) -> Tuple[np.ndarray, np.ndarray]:
        h, w = self.shape
        x = self.xs[pixels] + offset[0] * d
        y = self.ys[pixels] + offset[1] * d
        inside = (x >= 0) & (x < w) & (y >= 0) & (y < h)
        return img[np.clip(y, 0, h - 1), np.clip(x, 0, w - 1)], inside

    def pair_units(self, d_p: np.ndarray, d_q: np.ndarray) -> np.ndarray:
        """
        Smoothness per edge: lambda * min(|d_p - d_q|, cutoff); lambda1 jika selisih intensitas
        maksimum (tengah + korespondensi tiap view) < theta, selain itu lambda2. Pasangan occluded = 0.
        """
        d_p = np.asarray(d_p, dtype=np.int64)
        d_q = np.asarray(d_q, dtype=np.int64)
        occluded = (d_p == OCCLUDED) | (d_q == OCCLUDED)
        diff = self.center_diff
        for offset, img in self.views:
            v_p, in_p = self._lookup(img, self.edge_p, d_p, offset)
            v_q, in_q = self._lookup(img, self.edge_q, d_q, offset)
            both = in_p & in_q & ~occluded
            diff = np.where(both, np.maximum(diff, np.abs(v_p - v_q)), diff)
        lam = np.where(diff < self.params.theta, self.lambda1, self.lambda2)
        delta = np.minimum(np.abs(d_p - d_q), self.params.d_cutoff)
        return np.where(occluded, 0, lam * delta)

    def _flat_labels(self, labeling: Labeling) -> np.ndarray:
        labels = np.asarray(labeling)
        if labels.shape != self.shape:
            raise ArgumentError(f"Dimensi labeling {labels.shape} tidak cocok dengan gambar {self.shape}.")
        labels = labels.astype(np.int64).ravel()
        bad = (labels != OCCLUDED) & ((labels < self.d_min) | (labels > self.d_max))
        if bad.any():
            raise ArgumentError(f"Label di luar rentang [{self.d_min}, {self.d_max}] atau OCCLUDED.")
        return labels

    def _data_terms(self, labels: np.ndarray) -> Tuple[np.ndarray, bool]:
        occluded = labels == OCCLUDED
        terms = np.full(labels.size, self.K, dtype=np.int64)
        pixels = np.nonzero(~occluded)[0]
        index = labels[pixels] - self.d_min
        terms[pixels] = self.data_units[index, pixels]
        return terms, bool(self.data_ok[index, pixels].all())

    def energy_units(self, labeling: Labeling) -> Union[int, float]:
        """Energi total dalam unit; inf jika ada label tanpa cost valid di semua view."""
        labels = self._flat_labels(labeling)
        terms, finite = self._data_terms(labels)
        if not finite:
            return math.inf
        smooth = self.pair_units(labels[self.edge_p], labels[self.edge_q])
        return int(terms.sum() + smooth.sum())

    def _move_pairs(self, labels: np.ndarray, alpha: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(C, A, B) per edge: pair(lama, lama), pair(alpha, lama_q), pair(lama_p, alpha)."""
        cur_p, cur_q = labels[self.edge_p], labels[self.edge_q]
        alphas = np.full(cur_p.size, alpha, dtype=np.int64)
        return self.pair_units(cur_p, cur_q), self.pair_units(alphas, cur_q), self.pair_units(cur_p, alphas)

    def _space(self, labels: np.ndarray, alpha: int, C: np.ndarray, A: np.ndarray, B: np.ndarray) -> MoveSpace:
        take_ok = self.data_ok[alpha - self.d_min] & (labels != alpha)
        cur_p, cur_q = labels[self.edge_p], labels[self.edge_q]
        disagree = (cur_p != OCCLUDED) & (cur_q != OCCLUDED) & (cur_p != cur_q)
        boundary = np.zeros(labels.size, dtype=bool)
        boundary[self.edge_p[disagree]] = True
        boundary[self.edge_q[disagree]] = True
        tied = disagree & take_ok[self.edge_p] & take_ok[self.edge_q] & (C > A + B)
        return MoveSpace(take_ok, ~boundary, disagree, tied)

    def _check_alpha(self, alpha: int):
        if not self.d_min <= alpha <= self.d_max:
            raise ArgumentError(f"alpha {alpha} di luar rentang [{self.d_min}, {self.d_max}].")

    def move_space(self, labeling: Labeling, alpha: int) -> MoveSpace:
        """
        Ruang move untuk alpha. Piksel batas (berlabel, bertetangga dengan label lain
        yang bukan OCCLUDED) tidak boleh menjadi OCCLUDED. Pada edge batas yang kedua
        ujungnya boleh ke alpha dan pair(lama) > pair(alpha, q) + pair(p, alpha),
        kedua piksel bergerak bersama.
        """
        self._check_alpha(alpha)
        labels = self._flat_labels(labeling)
        return self._space(labels, alpha, *self._move_pairs(labels, alpha))

    def move_terms(self, labeling: Labeling, alpha: int) -> MoveTerms:
        self._check_alpha(alpha)
        labels = self._flat_labels(labeling)
        C, A, B = self._move_pairs(labels, alpha)
        space = self._space(labels, alpha, C, A, B)
        d_cur, finite = self._data_terms(labels)
        if not finite:
            raise ArgumentError("Labeling awal memiliki energi tak hingga.")
        n = labels.size
        d_alpha = self.data_units[alpha - self.d_min]
        allowed = space.take_ok

        unary = np.empty((n, 2, 2), dtype=np.int64)
        unary[:, 0, 0] = d_cur
        unary[:, 1, 0] = np.where(space.occlude_ok, self.K, self.K + LARGE)
        unary[:, 0, 1] = np.where(allowed, LARGE, d_cur + LARGE)
        unary[:, 1, 1] = np.where(allowed, d_alpha, self.K + LARGE)

        edges = C.size
        const = C.copy()
        linear = np.zeros((edges, 4), dtype=np.int64)
        quadratic = np.zeros((edges, 3), dtype=np.int64)

        # Edge tanpa batas: C = 0, f = B(1-yp)aq + A ap(1-yq)
        calm = ~space.disagree
        linear[calm, 1] = A[calm]
        linear[calm, 3] = B[calm]
        quadratic[calm, 1] = -B[calm]
        quadratic[calm, 2] = -A[calm]

        # Edge batas: OCCLUDED terlarang di kedua ujung sehingga a = y
        move_p = allowed[self.edge_p] & space.disagree
        move_q = allowed[self.edge_q] & space.disagree
        linear[move_p, 0] = (A - C)[move_p]
        linear[move_q, 2] = (B - C)[move_q]
        both = move_p & move_q & ~space.tied
        quadratic[both, 0] = (C - A - B)[both]
        tied = space.tied
        linear[tied, 0] = LARGE - C[tied]
        linear[tied, 2] = LARGE - C[tied]
        quadratic[tied, 0] = C[tied] - 2 * LARGE
        return MoveTerms(unary, self.edge_p, self.edge_q, const, linear, quadratic)

    def expand(self, labeling: Labeling, alpha: int) -> Tuple[Labeling, int]:
        """
        Satu expansion move, optimal atas ruang move_space. Mengembalikan
        (labeling baru, energi dalam unit); labeling lama dikembalikan bila energi tidak turun.
        """
        labels = self._flat_labels(labeling)
        current = self.energy_units(labeling)
        if not current < LARGE:
            raise MultiscopicError(f"Energi {current} melebihi konstanta LARGE; perkecil energy_scale atau gambar.")
        terms = self.move_terms(labeling, alpha)
        graph, constant = terms.build_graph()
        flow, source_side = max_flow(graph)

        n = labels.size
        sink_side = ~source_side
        leave, take = sink_side[2:2 + n], sink_side[2 + n:]
        if np.any(take & ~leave):
            raise MultiscopicError(f"Min-cut memilih state terlarang pada alpha {alpha}.")
        move_energy = flow + constant
        if terms.evaluate(leave, take) != move_energy:
            raise MultiscopicError(f"Energi move {move_energy} tidak cocok dengan nilai cut pada alpha {alpha}.")

        proposal = np.where(leave, np.where(take, alpha, OCCLUDED), labels).reshape(self.shape)
        proposed = self.energy_units(proposal)
        if proposed != move_energy:
            raise MultiscopicError(f"Energi {proposed} tidak sama dengan energi move {move_energy} pada alpha {alpha}.")
        logging.debug(f"[GC] alpha {alpha}: energi {current} -> {proposed}")
        if proposed < current:
            return proposal, proposed
        return np.asarray(labeling, dtype=np.int64).copy(), current


def occluded_labeling(shape: Tuple[int, int]) -> Labeling:
    return np.full(shape, OCCLUDED, dtype=np.int64)

def energy(mset: MultiscopicSet, labeling: Labeling, params: GcParams) -> float:
    """Energi total labeling pada resolusi set (tanpa upscale)."""
    model = EnergyModel.from_set(mset, params)
    return model.energy_units(labeling) / model.scale

def expand(labeling: Labeling, alpha: int, mset: MultiscopicSet, params: GcParams) -> Labeling:
    new_labels, _ = EnergyModel.from_set(mset, params).expand(labeling, alpha)
    return new_labels


class GraphCutMatcher:
    """
    Matcher graph cuts: upscale opsional, inisialisasi semua OCCLUDED, sweep label
    dalam urutan acak ber-seed, lalu downscale hasil.
    """

    def __init__(self, mset: MultiscopicSet, params: GcParams, executor: Optional[Executor] = None,
                 progress: Optional[ProgressCallback] = None):
        self.params = params
        self.progress = progress
        self.original_shape = mset.shape
        work = mset.grayscale()
        if params.upscale > 1:
            work = work.map_images(lambda img: resize_bilinear(img, params.upscale))
        self.work_params = params.scaled()
        self._report("cost", "RUNNING")
        self.model = EnergyModel.from_set(work, self.work_params, executor)
        self._report("cost", "COMPLETED")
        self.energy_history: List[float] = []
        self.sweeps_run = 0

    def _report(self, stage: str, status: str):
        if self.progress:
            self.progress(stage, status)

    def run(self) -> DisparityMap:
        params = self.work_params
        labels = occluded_labeling(self.model.shape)
        current = self.model.energy_units(labels)
        rng = np.random.default_rng(params.seed)
        alphas = np.arange(params.d_min, params.d_max + 1)
        logging.info(f"[GC] Mulai: {len(alphas)} label, energi awal {current / self.model.scale:.2f}")

        self._report("optimize", "RUNNING")
        for sweep in range(params.max_sweeps):
            improved = False
            for alpha in rng.permutation(alphas):
                labels_new, value = self.model.expand(labels, int(alpha))
                if value > current:
                    raise MultiscopicError(f"Energi naik pada alpha {alpha}: {current} -> {value}.")
                self.energy_history.append(value / self.model.scale)
                if value < current:
                    labels, current, improved = labels_new, value, True
            self.sweeps_run = sweep + 1
            logging.info(f"[GC] Sweep {sweep + 1}/{params.max_sweeps}: energi {current / self.model.scale:.2f}")
            if not improved:
                break
        self._report("optimize", "COMPLETED")
        return self._downscale(labels)

    def _downscale(self, labels: Labeling) -> DisparityMap:
        u = int(self.params.upscale)
        if u > 1:
            labels = labels[u // 2::u, u // 2::u]
        if labels.shape != self.original_shape:
            raise MultiscopicError(f"Dimensi hasil {labels.shape} tidak sama dengan input {self.original_shape}.")
        valid = labels != OCCLUDED
        return DisparityMap(np.where(valid, labels / u, 0.0), valid)


def match_gc(mset: MultiscopicSet, params: GcParams, executor: Optional[Executor] = None,
             progress: Optional[ProgressCallback] = None) -> DisparityMap:
    return GraphCutMatcher(mset, params, executor, progress).run()
