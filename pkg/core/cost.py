# core/cost.py
"""
Cost volume per view: SAD blok (stereo BM dan empat arah multiscopic) dan
dissimilarity Birchfield-Tomasi piksel per piksel untuk graph cuts.

Sel yang jendela pencocokannya keluar dari gambar ditandai di mask `valid`
(bukan diisi konstanta besar) agar fusion bisa melewatinya.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from core.capture import ViewDirection
from core.error_handler import ArgumentError, ImageFormatError, ImageIOError
from core.imgio import ImageBuffer

VOLUME_MAGIC = b"MSVOL"
# Tetangga subpiksel BT: pusat, kiri/kanan, atas/bawah
BT_OFFSETS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class CostVolume:
    """cost[d - d_min, v, u] >= 0; valid[...] False untuk sel out-of-bounds (cost-nya 0)."""
    cost: np.ndarray
    valid: np.ndarray
    d_min: int
    d_max: int

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if self.d_min < 0 or self.d_max < self.d_min:
            raise ArgumentError(f"Rentang disparitas tidak valid: [{self.d_min}, {self.d_max}].")
        expected = self.d_max - self.d_min + 1
        if cost.ndim != 3 or cost.shape != valid.shape or cost.shape[0] != expected:
            raise ArgumentError(f"Bentuk cost {cost.shape} / mask {valid.shape} tidak cocok dengan {expected} disparitas.")
        if np.any(cost[valid] < 0) or not np.all(np.isfinite(cost[valid])):
            raise ArgumentError("Cost volume harus non-negatif dan berhingga pada sel valid.")
        cost = np.where(valid, cost, 0.0)
        cost.setflags(write=False)
        valid = valid.copy()
        valid.setflags(write=False)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "valid", valid)

    @property
    def height(self) -> int:
        return self.cost.shape[1]

    @property
    def width(self) -> int:
        return self.cost.shape[2]

    @property
    def disparities(self) -> np.ndarray:
        return np.arange(self.d_min, self.d_max + 1)

    def at(self, d: int) -> np.ndarray:
        return self.cost[d - self.d_min]

    def with_inf(self) -> np.ndarray:
        """Cost dengan +inf pada sel out-of-bounds (untuk argmin/sort)."""
        return np.where(self.valid, self.cost, np.inf)

    def same_grid(self, other: "CostVolume") -> bool:
        return self.cost.shape == other.cost.shape and (self.d_min, self.d_max) == (other.d_min, other.d_max)


def _check_pair(ref: ImageBuffer, other: ImageBuffer, d_min: int, d_max: int):
    if ref.shape != other.shape:
        raise ArgumentError(f"Dimensi gambar berbeda: {ref.width}x{ref.height} vs {other.width}x{other.height}.")
    if ref.channels != 1 or other.channels != 1:
        raise ArgumentError("Cost volume membutuhkan gambar grayscale (gunakan to_grayscale).")
    if int(d_min) != d_min or int(d_max) != d_max or d_min < 0 or d_max < d_min:
        raise ArgumentError(f"Rentang disparitas tidak valid: [{d_min}, {d_max}].")

def shift_image(image: np.ndarray, dx: int, dy: int, fill: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    shifted[y, x] = image[y + dy, x + dx]; mengembalikan juga mask posisi yang berada di dalam gambar.
    """
    h, w = image.shape
    shifted = np.full((h, w), fill, dtype=np.float64)
    inside = np.zeros((h, w), dtype=bool)
    x0, x1 = max(0, -dx), min(w, w - dx)
    y0, y1 = max(0, -dy), min(h, h - dy)
    if x0 < x1 and y0 < y1:
        shifted[y0:y1, x0:x1] = image[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
        inside[y0:y1, x0:x1] = True
    return shifted, inside

def box_sum(values: np.ndarray, radius: int) -> np.ndarray:
    """Jumlah jendela (2r+1)^2 via integral image; baris/kolom tepi (< r) diisi 0."""
    h, w = values.shape
    k = 2 * radius + 1
    integral = np.zeros((h + 1, w + 1))
    integral[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    sums = integral[k:, k:] - integral[:-k, k:] - integral[k:, :-k] + integral[:-k, :-k]
    out = np.zeros((h, w))
    out[radius:h - radius, radius:w - radius] = sums
    return out

def _block_inside(h: int, w: int, radius: int, dx: int, dy: int) -> np.ndarray:
    ys, xs = np.mgrid[0:h, 0:w]
    inside = (xs >= radius) & (xs < w - radius) & (ys >= radius) & (ys < h - radius)
    sx, sy = xs + dx, ys + dy
    return inside & (sx >= radius) & (sx < w - radius) & (sy >= radius) & (sy < h - radius)


def sad_volume(ref: ImageBuffer, other: ImageBuffer, direction: ViewDirection, radius: int,
               d_min: int, d_max: int) -> CostVolume:
    """
    cost(u, v, d) = jumlah |I_other(posisi korespondensi) - I_ref| atas blok (2r+1)^2.
    Korespondensi mengikuti konvensi arah: kanan x-d, kiri x+d, atas y+d, bawah y-d.
    """
    _check_pair(ref, other, d_min, d_max)
    if radius < 0 or 2 * radius + 1 > min(ref.width, ref.height):
        raise ArgumentError(f"Radius blok {radius} terlalu besar untuk gambar {ref.width}x{ref.height}.")

    base = ref.as_float()
    source = other.as_float()
    h, w = base.shape
    ox, oy = direction.offset
    slices, masks = [], []
    for d in range(int(d_min), int(d_max) + 1):
        shifted, _ = shift_image(source, ox * d, oy * d)
        valid = _block_inside(h, w, radius, ox * d, oy * d)
        slices.append(np.where(valid, box_sum(np.abs(shifted - base), radius), 0.0))
        masks.append(valid)
    logging.debug(f"[COST] SAD {direction.value}: r={radius}, d=[{d_min}, {d_max}]")
    return CostVolume(np.stack(slices), np.stack(masks), int(d_min), int(d_max))


def bt_interval(image: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """I_min / I_max per piksel atas rata-rata setengah-piksel dengan tetangga sigma (tepi direplikasi)."""
    padded = np.pad(image, 1, mode="edge")
    h, w = image.shape
    halves = [0.5 * (image + padded[1 + sy:1 + sy + h, 1 + sx:1 + sx + w]) for sx, sy in BT_OFFSETS]
    stacked = np.stack(halves)
    return stacked.min(axis=0), stacked.max(axis=0)

def bt_volume(ref: ImageBuffer, other: ImageBuffer, direction: ViewDirection, d_min: int, d_max: int,
              literal: bool = False) -> CostVolume:
    """
    Dissimilarity BT: max{0, I_ref - I_max, I_min - I_ref} terhadap interval di piksel korespondensi.
    `literal=True` memakai orientasi min/max seperti rumus tercetak (selalu positif di dalam interval).
    """
    _check_pair(ref, other, d_min, d_max)
    base = ref.as_float()
    low, high = bt_interval(other.as_float())
    ox, oy = direction.offset
    slices, masks = [], []
    for d in range(int(d_min), int(d_max) + 1):
        low_d, inside = shift_image(low, ox * d, oy * d)
        high_d, _ = shift_image(high, ox * d, oy * d)
        if literal:
            cost = np.maximum(0.0, np.maximum(base - low_d, high_d - base))
        else:
            cost = np.maximum(0.0, np.maximum(base - high_d, low_d - base))
        slices.append(np.where(inside, cost, 0.0))
        masks.append(inside)
    logging.debug(f"[COST] BT {direction.value}: d=[{d_min}, {d_max}], literal={literal}")
    return CostVolume(np.stack(slices), np.stack(masks), int(d_min), int(d_max))


def cost_volume(kind: str, ref: ImageBuffer, other: ImageBuffer, direction: ViewDirection,
                d_min: int, d_max: int, radius: int = 0, literal: bool = False) -> CostVolume:
    if kind == "sad":
        return sad_volume(ref, other, direction, radius, d_min, d_max)
    if kind == "bt":
        return bt_volume(ref, other, direction, d_min, d_max, literal=literal)
    raise ArgumentError(f"Jenis cost tidak dikenal: '{kind}' (gunakan sad atau bt).")


# ===============================
# Dump debug
# ===============================

def dump_volume(volume: CostVolume, path: Union[str, Path]):
    """Header teks 'MSVOL' + 'w h dmin dmax', lalu float32 little-endian urutan (d, v, u); NaN = out-of-bounds."""
    header = f"MSVOL\n{volume.width} {volume.height} {volume.d_min} {volume.d_max}\n".encode("ascii")
    payload = np.where(volume.valid, volume.cost, np.nan).astype("<f4").tobytes()
    try:
        Path(path).write_bytes(header + payload)
    except OSError as e:
        raise ImageIOError(f"Tidak dapat menulis dump volume '{path}': {e}") from e
    logging.debug(f"[COST] Volume {volume.width}x{volume.height}x{volume.cost.shape[0]} di-dump ke {path}")

def load_volume(path: Union[str, Path]) -> CostVolume:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ImageIOError(f"Tidak dapat membaca dump volume '{path}': {e}") from e
    parts = raw.split(b"\n", 2)
    if len(parts) < 3 or parts[0] != VOLUME_MAGIC:
        raise ImageFormatError(f"File '{path}' bukan dump volume MSVOL.")
    try:
        width, height, d_min, d_max = (int(t) for t in parts[1].split())
    except ValueError as e:
        raise ImageFormatError(f"Header dump volume '{path}' tidak valid.") from e
    count = (d_max - d_min + 1) * height * width
    if len(parts[2]) < count * 4:
        raise ImageIOError(f"Payload dump volume '{path}' terpotong.")
    cells = np.frombuffer(parts[2][:count * 4], dtype="<f4").astype(np.float64)
    cells = cells.reshape(d_max - d_min + 1, height, width)
    valid = ~np.isnan(cells)
    return CostVolume(np.nan_to_num(cells, nan=0.0), valid, d_min, d_max)
