# core/fusion.py
"""
Fusion cost volume per arah menjadi satu volume: mean, minimum, atau aturan heuristik.
Semua operasi per sel (u, v, d) dan hanya memakai entri yang valid.
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from core.cost import CostVolume
from core.error_handler import ArgumentError

STRATEGIES = ("mean", "min", "heuristic")
DEFAULT_RATIO = 3.0


def _stack(volumes: Sequence[CostVolume]) -> Tuple[np.ndarray, np.ndarray]:
    volumes = list(volumes)
    if not volumes:
        raise ArgumentError("Fusion membutuhkan minimal satu cost volume.")
    first = volumes[0]
    for vol in volumes[1:]:
        if not first.same_grid(vol):
            raise ArgumentError(
                f"Cost volume tidak seragam: {vol.cost.shape} [{vol.d_min}, {vol.d_max}] "
                f"vs {first.cost.shape} [{first.d_min}, {first.d_max}]."
            )
    return np.stack([v.cost for v in volumes]), np.stack([v.valid for v in volumes])

def _wrap(cost: np.ndarray, valid: np.ndarray, like: CostVolume) -> CostVolume:
    return CostVolume(np.where(valid, cost, 0.0), valid, like.d_min, like.d_max)


def fuse_mean(volumes: Sequence[CostVolume]) -> CostVolume:
    """Rata-rata aritmetika atas entri valid; sel yang invalid di semua volume tetap invalid."""
    cost, valid = _stack(volumes)
    count = valid.sum(axis=0)
    total = np.where(valid, cost, 0.0).sum(axis=0)
    fused = np.divide(total, count, out=np.zeros_like(total), where=count > 0)
    return _wrap(fused, count > 0, volumes[0])

def fuse_min(volumes: Sequence[CostVolume]) -> CostVolume:
    cost, valid = _stack(volumes)
    fused = np.where(valid, cost, np.inf).min(axis=0)
    ok = valid.any(axis=0)
    return _wrap(np.where(ok, fused, 0.0), ok, volumes[0])

def fuse_heuristic(volumes: Sequence[CostVolume], ratio: float = DEFAULT_RATIO) -> CostVolume:
    """
    Urutkan cost valid naik c1 <= c2 <= c3 <= c4, buang c4.
    Jika c3 > ratio * c2 -> (c1 + c2) / 2, selain itu (c1 + c2 + c3) / 3.
    Fallback: 3 entri memakai aturan yang sama, 2 entri -> minimum, 1 entri -> apa adanya.
    """
    if not ratio > 0:
        raise ArgumentError(f"Rasio heuristik harus > 0, diberikan {ratio}.")
    cost, valid = _stack(volumes)
    ordered = np.sort(np.where(valid, cost, np.inf), axis=0)
    ordered = np.where(np.isfinite(ordered), ordered, 0.0)
    count = valid.sum(axis=0)

    c1 = ordered[0]
    fused = c1.copy()
    if ordered.shape[0] >= 3:
        c2, c3 = ordered[1], ordered[2]
        rule = np.where(c3 > ratio * c2, (c1 + c2) / 2.0, (c1 + c2 + c3) / 3.0)
        fused = np.where(count >= 3, rule, fused)
    return _wrap(fused, count > 0, volumes[0])


def fuse(volumes: Sequence[CostVolume], strategy: str = "heuristic", ratio: float = DEFAULT_RATIO) -> CostVolume:
    """Dispatcher berdasarkan nama strategi; satu volume (kasus stereo) dikembalikan apa adanya."""
    volumes = list(volumes)
    if strategy not in STRATEGIES:
        raise ArgumentError(f"Strategi fusion tidak dikenal: '{strategy}' (pilihan: {', '.join(STRATEGIES)}).")
    if len(volumes) == 1:
        _stack(volumes)
        return volumes[0]
    logging.debug(f"[FUSION] {strategy} atas {len(volumes)} volume")
    if strategy == "mean":
        return fuse_mean(volumes)
    if strategy == "min":
        return fuse_min(volumes)
    return fuse_heuristic(volumes, ratio)
