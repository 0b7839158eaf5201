# core/blockmatch.py
"""
Winner-take-all + penyempurnaan subpiksel, dan pipeline block matching
(stereo BM untuk satu view surround, multiscopic BM untuk 2-4 view).
"""
import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.capture import MultiscopicSet
from core.cost import CostVolume, sad_volume
from core.error_handler import ArgumentError
from core.fusion import DEFAULT_RATIO, STRATEGIES, fuse
from core.imgio import DisparityMap
from core.utils import block_size_to_radius

ProgressCallback = Callable[[str, str], None]


@dataclass(frozen=True)
class BmParams:
    radius: int = 5
    d_min: int = 1
    d_max: int = 60
    fusion: str = "heuristic"
    heuristic_ratio: float = DEFAULT_RATIO
    subpixel: bool = True

    def __post_init__(self):
        if self.radius < 0:
            raise ArgumentError(f"Radius blok harus >= 0, diberikan {self.radius}.")
        if self.d_min < 0 or self.d_max < self.d_min:
            raise ArgumentError(f"Rentang disparitas tidak valid: [{self.d_min}, {self.d_max}].")
        if self.fusion not in STRATEGIES:
            raise ArgumentError(f"Strategi fusion tidak dikenal: '{self.fusion}'.")
        if not self.heuristic_ratio > 0:
            raise ArgumentError(f"Rasio heuristik harus > 0, diberikan {self.heuristic_ratio}.")

    @classmethod
    def from_block_size(cls, block_size: int, **kwargs) -> "BmParams":
        return cls(radius=block_size_to_radius(block_size), **kwargs)


def wta(volume: CostVolume) -> DisparityMap:
    """Argmin per piksel; seri dimenangkan disparitas terkecil; tanpa entri valid -> invalid."""
    index = np.argmin(volume.with_inf(), axis=0)
    return DisparityMap((volume.d_min + index).astype(np.float64), volume.valid.any(axis=0))

def subpixel_refine(volume: CostVolume, integer_map: DisparityMap) -> DisparityMap:
    """
    d_s = d + (c(d-1) - c(d+1)) / (2c(d-1) + 2c(d+1) - 4c(d)).
    Hanya untuk d interior dengan kedua tetangga valid dan minimum lokal tegas;
    selain itu nilai integer dipertahankan.
    """
    if integer_map.shape != (volume.height, volume.width):
        raise ArgumentError("Dimensi peta disparitas tidak cocok dengan cost volume.")
    count = volume.cost.shape[0]
    if count < 3:
        return integer_map
    values = integer_map.values
    index = np.rint(values).astype(np.intp) - volume.d_min
    interior = integer_map.valid & (values == np.rint(values)) & (index >= 1) & (index <= count - 2)
    safe = np.clip(index, 1, count - 2)

    rows, cols = np.indices(values.shape)
    c_prev = volume.cost[safe - 1, rows, cols]
    c_mid = volume.cost[safe, rows, cols]
    c_next = volume.cost[safe + 1, rows, cols]
    neighbors_ok = volume.valid[safe - 1, rows, cols] & volume.valid[safe, rows, cols] & volume.valid[safe + 1, rows, cols]
    denom = 2 * c_prev + 2 * c_next - 4 * c_mid
    refine = interior & neighbors_ok & (denom > 0) & (c_prev > c_mid) & (c_next > c_mid)
    offset = np.divide(c_prev - c_next, denom, out=np.zeros_like(denom), where=refine)
    return DisparityMap(values + offset, integer_map.valid)


def match_bm(mset: MultiscopicSet, params: BmParams, executor: Optional[Executor] = None,
             progress: Optional[ProgressCallback] = None) -> DisparityMap:
    """
    Satu volume SAD per view surround, fusion sesuai `params.fusion`, lalu WTA (+ subpiksel).
    Dengan satu view surround pipeline ini identik dengan stereo BM.
    """
    def report(stage: str, status: str):
        if progress:
            progress(stage, status)

    gray = mset.grayscale()
    directions = gray.directions
    logging.info(f"[BM] Block matching {len(directions)} view, blok {2 * params.radius + 1}, "
                 f"d=[{params.d_min}, {params.d_max}], fusion {params.fusion}")

    def build(direction):
        return sad_volume(gray.center, gray.surround[direction], direction, params.radius, params.d_min, params.d_max)

    report("cost", "RUNNING")
    if executor is not None:
        volumes = list(executor.map(build, directions))
    else:
        volumes = [build(d) for d in directions]
    report("cost", "COMPLETED")

    report("fusion", "RUNNING")
    fused = fuse(volumes, params.fusion, params.heuristic_ratio)
    report("fusion", "COMPLETED")

    report("wta", "RUNNING")
    disparity = wta(fused)
    if params.subpixel:
        disparity = subpixel_refine(fused, disparity)
    report("wta", "COMPLETED")

    invalid = int((~disparity.valid).sum())
    if invalid:
        logging.debug(f"[BM] {invalid} piksel tanpa disparitas valid")
    return disparity
