# core/capture.py
"""
Model geometri capture multiscopic (bidang gambar ko-planar, parallax sama)
dan generator scene sintetis dengan ground truth untuk pengujian.

Konvensi tanda (sama dengan empat rumus SAD): konten gambar kanan muncul di
x-d, kiri di x+d, atas di y+d, bawah di y-d relatif terhadap gambar tengah.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from core.error_handler import ArgumentError
from core.imgio import DisparityMap, ImageBuffer, round_half_up, to_grayscale
from core.utils import parse_key_value_lines


class ViewDirection(Enum):
    """Arah perpindahan kamera relatif terhadap view tengah."""
    RIGHT = "right"
    LEFT = "left"
    TOP = "top"
    BOTTOM = "bottom"

    @property
    def letter(self) -> str:
        return self.value[0]

    @property
    def offset(self) -> Tuple[int, int]:
        """(dx, dy) posisi korespondensi di gambar surround per satu unit disparitas."""
        return _OFFSETS[self]

    @property
    def camera_offset(self) -> Tuple[int, int]:
        """Perpindahan pusat kamera (arah berlawanan dengan pergeseran konten)."""
        dx, dy = self.offset
        return -dx, -dy

    @property
    def is_horizontal(self) -> bool:
        return self.offset[1] == 0

    @property
    def opposite(self) -> "ViewDirection":
        return _OPPOSITES[self]

    @classmethod
    def from_letter(cls, letter: str) -> "ViewDirection":
        for direction in cls:
            if direction.letter == letter.lower() or direction.value == letter.lower():
                return direction
        raise ArgumentError(f"Arah view tidak dikenal: '{letter}' (gunakan l, r, t, b).")

    @classmethod
    def parse(cls, letters: str) -> Tuple["ViewDirection", ...]:
        """'lrtb' -> (LEFT, RIGHT, TOP, BOTTOM); duplikat ditolak."""
        directions = [cls.from_letter(ch) for ch in letters.strip() if ch not in ", "]
        if not directions:
            raise ArgumentError("Minimal satu arah view diperlukan.")
        if len(set(directions)) != len(directions):
            raise ArgumentError(f"Arah view duplikat pada '{letters}'.")
        return tuple(directions)


_OFFSETS = {
    ViewDirection.RIGHT: (-1, 0),
    ViewDirection.LEFT: (1, 0),
    ViewDirection.TOP: (0, 1),
    ViewDirection.BOTTOM: (0, -1),
}
_OPPOSITES = {
    ViewDirection.RIGHT: ViewDirection.LEFT,
    ViewDirection.LEFT: ViewDirection.RIGHT,
    ViewDirection.TOP: ViewDirection.BOTTOM,
    ViewDirection.BOTTOM: ViewDirection.TOP,
}


@dataclass(frozen=True)
class MultiscopicSet:
    """
    Gambar tengah (referensi) plus hingga empat gambar surround dengan baseline sama.
    baseline dalam milimeter, focal_length (opsional) dalam piksel.
    """
    center: ImageBuffer
    surround: Mapping[ViewDirection, ImageBuffer]
    baseline: float = 1.0
    focal_length: Optional[float] = None

    def __post_init__(self):
        surround = dict(self.surround)
        if not surround:
            raise ArgumentError("MultiscopicSet membutuhkan minimal satu gambar surround.")
        for direction, img in surround.items():
            if not isinstance(direction, ViewDirection):
                raise ArgumentError(f"Kunci surround harus ViewDirection, bukan {direction!r}.")
            if img.shape != self.center.shape or img.channels != self.center.channels:
                raise ArgumentError(
                    f"Dimensi view {direction.value} ({img.width}x{img.height}x{img.channels}) "
                    f"berbeda dari tengah ({self.center.width}x{self.center.height}x{self.center.channels})."
                )
        if not self.baseline > 0:
            raise ArgumentError(f"Baseline harus > 0, diberikan {self.baseline}.")
        if self.focal_length is not None and not self.focal_length > 0:
            raise ArgumentError(f"Focal length harus > 0, diberikan {self.focal_length}.")
        ordered = {d: surround[d] for d in ViewDirection if d in surround}
        object.__setattr__(self, "surround", MappingProxyType(ordered))

    @classmethod
    def from_views(cls, center: ImageBuffer, views: Iterable[Tuple[ViewDirection, ImageBuffer]],
                   baseline: float = 1.0, focal_length: Optional[float] = None) -> "MultiscopicSet":
        surround: Dict[ViewDirection, ImageBuffer] = {}
        for direction, img in views:
            if direction in surround:
                raise ArgumentError(f"Arah view duplikat: {direction.value}.")
            surround[direction] = img
        return cls(center, surround, baseline, focal_length)

    @property
    def directions(self) -> Tuple[ViewDirection, ...]:
        return tuple(self.surround.keys())

    @property
    def shape(self) -> Tuple[int, int]:
        return self.center.shape

    def subset(self, directions: Iterable[ViewDirection]) -> "MultiscopicSet":
        """Membatasi set ke sebagian view (mis. pasangan stereo dari capture multiscopic)."""
        wanted = tuple(directions)
        missing = [d.value for d in wanted if d not in self.surround]
        if missing:
            raise ArgumentError(f"View tidak tersedia di set: {', '.join(missing)}.")
        return MultiscopicSet(self.center, {d: self.surround[d] for d in wanted},
                              self.baseline, self.focal_length)

    def map_images(self, func) -> "MultiscopicSet":
        return MultiscopicSet(func(self.center), {d: func(img) for d, img in self.surround.items()},
                              self.baseline, self.focal_length)

    def grayscale(self) -> "MultiscopicSet":
        return self.map_images(to_grayscale)

    def depth_map(self, disparity: DisparityMap) -> np.ndarray:
        """Konversi disparitas -> kedalaman (satuan baseline); NaN untuk sel tidak valid atau d <= 0."""
        if self.focal_length is None:
            raise ArgumentError("focal_length diperlukan untuk konversi kedalaman.")
        values = disparity.masked()
        with np.errstate(divide="ignore", invalid="ignore"):
            depth = self.focal_length * self.baseline / values
        return np.where(values > 0, depth, np.nan)


def disparity_from_depth(depth: float, baseline: float, focal: float) -> float:
    """Triangulasi standar kamera paralel: d = f * B / Z."""
    for name, value in (("depth", depth), ("baseline", baseline), ("focal", focal)):
        if math.isnan(value) or not value > 0:
            raise ArgumentError(f"{name} harus > 0, diberikan {value}.")
    return focal * baseline / depth


# ===============================
# Scene sintetis
# ===============================

@dataclass(frozen=True)
class Texture:
    """Tekstur layer: 'noise' (seed, noise uniform dihaluskan box 3x3) atau 'flat' (nilai abu-abu)."""
    kind: str
    value: int

    def __post_init__(self):
        if self.kind not in ("noise", "flat"):
            raise ArgumentError(f"Jenis tekstur tidak dikenal: '{self.kind}'.")
        if self.kind == "flat" and not 0 <= self.value <= 255:
            raise ArgumentError(f"Nilai tekstur flat harus di [0, 255], diberikan {self.value}.")

    @classmethod
    def parse(cls, text: str) -> "Texture":
        kind, _, value = text.partition(":")
        try:
            return cls(kind.strip().lower(), int(value))
        except ValueError as e:
            raise ArgumentError(f"Spesifikasi tekstur tidak valid: '{text}' (contoh: noise:3, flat:128).") from e

    def generate(self, height: int, width: int) -> np.ndarray:
        if self.kind == "flat":
            return np.full((height, width), float(self.value))
        rng = np.random.default_rng(self.value)
        noise = rng.integers(0, 256, size=(height, width)).astype(np.float64)
        return ndimage.uniform_filter(noise, size=3, mode="reflect")


@dataclass(frozen=True)
class Layer:
    """Layer bidang fronto-paralel. rect = (x, y, w, h) di koordinat view tengah; None = background."""
    name: str
    disparity: float
    texture: Texture
    rect: Optional[Tuple[int, int, int, int]] = None

    def __post_init__(self):
        if self.rect is not None and (len(self.rect) != 4 or self.rect[2] < 1 or self.rect[3] < 1):
            raise ArgumentError(f"Rect layer '{self.name}' tidak valid: {self.rect}.")

    @property
    def is_background(self) -> bool:
        return self.rect is None

    def covers(self, cx: np.ndarray, cy: np.ndarray) -> np.ndarray:
        if self.rect is None:
            return np.ones(np.shape(cx), dtype=bool)
        x, y, w, h = self.rect
        return (cx >= x) & (cx < x + w) & (cy >= y) & (cy < y + h)


@dataclass(frozen=True)
class SyntheticScene:
    """Scene berlapis, layer diurutkan dari depan ke belakang; background wajib dan paling belakang."""
    width: int
    height: int
    layers: Tuple[Layer, ...]
    d_min: float = 0.0
    d_max: float = 64.0

    def __post_init__(self):
        layers = tuple(sorted(self.layers, key=lambda layer: -layer.disparity))
        object.__setattr__(self, "layers", layers)
        if self.width < 1 or self.height < 1:
            raise ArgumentError("Dimensi scene minimal 1x1.")
        if not layers:
            raise ArgumentError("Scene membutuhkan minimal satu layer background.")
        backgrounds = [layer for layer in layers if layer.is_background]
        if len(backgrounds) != 1 or not layers[-1].is_background:
            raise ArgumentError("Scene membutuhkan tepat satu background dengan disparitas terkecil.")
        disparities = [layer.disparity for layer in layers]
        if any(a <= b for a, b in zip(disparities, disparities[1:])):
            raise ArgumentError(f"Disparitas layer harus berbeda dan menurun dari depan ke belakang: {disparities}.")
        if not self.d_min <= min(disparities) <= max(disparities) <= self.d_max:
            raise ArgumentError(f"Disparitas layer {disparities} di luar rentang [{self.d_min}, {self.d_max}].")


class RenderedScene(NamedTuple):
    views: MultiscopicSet
    ground_truth: DisparityMap
    occlusion: np.ndarray


def default_scene(seed: int = 7) -> SyntheticScene:
    """Scene bawaan dua layer: persegi 32x32 (d=10) di depan background (d=2)."""
    return SyntheticScene(
        width=128,
        height=96,
        layers=(
            Layer("square", 10, Texture("noise", seed + 1), (48, 32, 32, 32)),
            Layer("background", 2, Texture("noise", seed)),
        ),
        d_min=0,
        d_max=16,
    )

def _parse_layer(line: str) -> Layer:
    parts = line.split()
    if len(parts) < 2 or parts[0].lower() != "layer":
        raise ArgumentError(f"Baris scene tidak dikenal: '{line}'.")
    name, fields = parts[1], {}
    for item in parts[2:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise ArgumentError(f"Atribut layer '{name}' harus berbentuk key=value: '{item}'.")
        fields[key.strip().lower()] = value.strip()
    try:
        disparity = float(fields.pop("disparity"))
        texture = Texture.parse(fields.pop("texture", "flat:128"))
        rect_keys = ("x", "y", "w", "h")
        rect = None
        if any(k in fields for k in rect_keys):
            rect = tuple(int(fields.pop(k)) for k in rect_keys)
    except KeyError as e:
        raise ArgumentError(f"Layer '{name}' tidak memiliki atribut wajib {e}.") from e
    except ValueError as e:
        raise ArgumentError(f"Atribut layer '{name}' tidak valid: {e}.") from e
    if fields:
        raise ArgumentError(f"Atribut layer '{name}' tidak dikenal: {', '.join(sorted(fields))}.")
    return Layer(name, disparity, texture, rect)

def load_scene(path: Union[str, Path]) -> SyntheticScene:
    """
    Memuat deskripsi scene teks: baris `key = value` (width, height, d_min, d_max)
    dan baris `layer NAMA x=.. y=.. w=.. h=.. disparity=.. texture=noise:SEED`.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ArgumentError(f"File scene '{path}' tidak bisa dibaca: {e}") from e
    values, layer_lines = parse_key_value_lines(lines)
    try:
        scene = SyntheticScene(
            width=int(values.pop("width")),
            height=int(values.pop("height")),
            layers=tuple(_parse_layer(line) for line in layer_lines),
            d_min=float(values.pop("d_min", 0)),
            d_max=float(values.pop("d_max", 64)),
        )
    except KeyError as e:
        raise ArgumentError(f"File scene '{path}' tidak memiliki kunci {e}.") from e
    except ValueError as e:
        raise ArgumentError(f"Nilai pada file scene '{path}' tidak valid: {e}") from e
    if values:
        logging.warning(f"[CAPTURE] Kunci scene diabaikan: {', '.join(sorted(values))}")
    return scene


def _sample(canvas: np.ndarray, cx: np.ndarray, cy: np.ndarray, pad: int) -> np.ndarray:
    px, py = cx + pad, cy + pad
    if np.all(px == np.round(px)) and np.all(py == np.round(py)):
        return canvas[py.astype(np.intp), px.astype(np.intp)]
    return ndimage.map_coordinates(canvas, [py, px], order=1, mode="nearest")

def _composite(scene: SyntheticScene, canvases: Sequence[np.ndarray], pad: int,
               offset: Tuple[int, int], units: int) -> Tuple[np.ndarray, np.ndarray]:
    """Painter's algorithm dari belakang ke depan; mengembalikan gambar dan indeks layer per piksel."""
    ys, xs = np.mgrid[0:scene.height, 0:scene.width].astype(np.float64)
    image = np.zeros((scene.height, scene.width))
    owner = np.zeros((scene.height, scene.width), dtype=np.intp)
    for index in range(len(scene.layers) - 1, -1, -1):
        layer = scene.layers[index]
        shift = units * layer.disparity
        cx, cy = xs - offset[0] * shift, ys - offset[1] * shift
        mask = layer.covers(cx, cy)
        if not mask.any():
            continue
        image[mask] = _sample(canvases[index], cx[mask], cy[mask], pad)
        owner[mask] = index
    return image, owner

def _occluded_in_view(scene: SyntheticScene, owner: np.ndarray, offset: Tuple[int, int], units: int) -> np.ndarray:
    """Piksel tengah yang korespondensinya tertutup layer yang lebih dekat."""
    ys, xs = np.mgrid[0:scene.height, 0:scene.width].astype(np.float64)
    disparity = np.array([layer.disparity for layer in scene.layers])[owner] * units
    qx, qy = xs + offset[0] * disparity, ys + offset[1] * disparity
    occluded = np.zeros(owner.shape, dtype=bool)
    for index, layer in enumerate(scene.layers[:-1]):
        shift = units * layer.disparity
        in_front = owner > index
        occluded |= in_front & layer.covers(qx - offset[0] * shift, qy - offset[1] * shift)
    return occluded

def render_multiscopic(scene: SyntheticScene, directions: Iterable[ViewDirection],
                       baseline_units: int = 1) -> RenderedScene:
    """
    Merender view tengah dan view surround yang diminta.

    Mengembalikan (MultiscopicSet, ground truth disparitas view tengah, mask oklusi);
    mask menandai piksel tengah yang tidak terlihat di SEMUA view surround yang diminta.
    """
    directions = tuple(directions)
    if not directions:
        raise ArgumentError("Minimal satu arah view surround diperlukan.")
    if len(set(directions)) != len(directions):
        raise ArgumentError("Arah view surround duplikat.")
    if int(baseline_units) != baseline_units or baseline_units < 1:
        raise ArgumentError(f"baseline_units harus bilangan bulat positif, diberikan {baseline_units}.")

    max_shift = baseline_units * max(layer.disparity for layer in scene.layers)
    if max_shift >= scene.width or (any(not d.is_horizontal for d in directions) and max_shift >= scene.height):
        raise ArgumentError(f"Pergeseran maksimum {max_shift} px melebihi batas gambar {scene.width}x{scene.height}.")

    pad = int(math.ceil(max_shift)) + 2
    canvases = [layer.texture.generate(scene.height + 2 * pad, scene.width + 2 * pad) for layer in scene.layers]

    def quantize(image: np.ndarray) -> ImageBuffer:
        return ImageBuffer(np.clip(round_half_up(image), 0, 255).astype(np.uint8))

    center, owner = _composite(scene, canvases, pad, (0, 0), baseline_units)
    surround = {}
    occluded_all = np.ones(owner.shape, dtype=bool)
    for direction in directions:
        image, _ = _composite(scene, canvases, pad, direction.offset, baseline_units)
        surround[direction] = quantize(image)
        occluded_all &= _occluded_in_view(scene, owner, direction.offset, baseline_units)
        logging.debug(f"[CAPTURE] View {direction.value} dirender")

    gt_values = np.array([layer.disparity for layer in scene.layers])[owner]
    ground_truth = DisparityMap(gt_values, np.ones(owner.shape, dtype=bool))
    views = MultiscopicSet(quantize(center), surround)
    return RenderedScene(views, ground_truth, occluded_all)


# ===============================
# Diagnostik alignment
# ===============================

def _phase_shift(reference: np.ndarray, moved: np.ndarray) -> float:
    """Estimasi pergeseran 1D via phase correlation, dengan penyempurnaan parabola di puncak."""
    a = np.fft.fft(reference - reference.mean())
    b = np.fft.fft(moved - moved.mean())
    cross = b * np.conj(a)
    response = np.fft.ifft(cross / np.maximum(np.abs(cross), 1e-12)).real
    n = response.size
    peak = int(np.argmax(response))
    left, mid, right = response[(peak - 1) % n], response[peak], response[(peak + 1) % n]
    denom = left - 2 * mid + right
    frac = 0.5 * (left - right) / denom if denom < 0 else 0.0
    shift = peak + frac
    return shift - n if shift > n / 2 else shift

def rectify_check(mset: MultiscopicSet, tolerance: float = 0.5) -> bool:
    """
    Cek alignment advisory: pasangan horizontal tidak boleh bergeser vertikal
    (dan sebaliknya) lebih dari `tolerance` piksel. Menggunakan phase correlation
    proyeksi baris/kolom. Default tolerance adalah tebakan, bukan nilai terukur.
    """
    height, _ = mset.shape
    if tolerance >= height:
        return True
    gray = mset.grayscale()
    center = gray.center.as_float()
    aligned = True
    for direction, img in gray.surround.items():
        other = img.as_float()
        # Pasangan horizontal: proyeksi per baris (sumbu y); vertikal: per kolom (sumbu x)
        axis = 1 if direction.is_horizontal else 0
        shift = _phase_shift(center.mean(axis=axis), other.mean(axis=axis))
        logging.debug(f"[CAPTURE] Deviasi epipolar view {direction.value}: {shift:+.2f} px")
        if abs(shift) > tolerance:
            logging.warning(f"[CAPTURE] View {direction.value} menyimpang {shift:+.2f} px dari sumbu (toleransi {tolerance}).")
            aligned = False
    return aligned
