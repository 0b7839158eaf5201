# core/imgio.py
"""
Baca/tulis format gambar dan disparitas (PGM/PPM/PFM), konversi grayscale,
dan resampling bilinear.

Semua buffer bersifat immutable setelah dibuat (array di-set read-only),
sehingga aman dibagi antar worker.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from core.error_handler import ArgumentError, ImageFormatError, ImageIOError

PathLike = Union[str, Path]

_PNM_MAGICS = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}
_TOKEN_RE = re.compile(rb"[^\s#]+")
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Pembulatan .5 ke atas (bukan banker's rounding bawaan numpy)."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


@dataclass(frozen=True)
class ImageBuffer:
    """Grid intensitas 2D, 1 kanal (H, W) atau 3 kanal (H, W, 3), nilai di [0, 255]."""
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim == 3 and data.shape[2] == 1:
            data = data[:, :, 0]
        if data.ndim not in (2, 3) or (data.ndim == 3 and data.shape[2] != 3):
            raise ArgumentError(f"Bentuk buffer gambar tidak valid: {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ArgumentError("Lebar dan tinggi gambar minimal 1 piksel.")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def as_float(self) -> np.ndarray:
        return self.data.astype(np.float64)


@dataclass(frozen=True)
class DisparityMap:
    """
    Peta disparitas pecahan dengan mask validitas.
    Sel tidak valid (occluded / tanpa estimasi) selalu bernilai 0 di `values`.
    """
    values: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if values.ndim != 2 or values.shape != valid.shape:
            raise ArgumentError(f"Dimensi values {values.shape} dan mask {valid.shape} harus sama (2D).")
        valid = valid & np.isfinite(values)
        values = np.where(valid, values, 0.0)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "valid", _frozen(valid))

    @classmethod
    def from_array(cls, values: np.ndarray, valid: Optional[np.ndarray] = None) -> "DisparityMap":
        values = np.asarray(values, dtype=np.float64)
        if valid is None:
            valid = np.isfinite(values)
        return cls(values, valid)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def masked(self) -> np.ndarray:
        """Salinan values dengan NaN di sel tidak valid."""
        return np.where(self.valid, self.values, np.nan)


# ===============================
# PGM / PPM
# ===============================

def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise ImageIOError(f"Tidak dapat membaca file '{path}': {e}") from e

def _write_bytes(path: PathLike, payload: bytes):
    try:
        Path(path).write_bytes(payload)
    except OSError as e:
        raise ImageIOError(f"Tidak dapat menulis file '{path}': {e}") from e

def _header_tokens(raw: bytes, count: int, path: PathLike) -> Tuple[List[bytes], int]:
    """
    Membaca `count` token header setelah magic number, melewati komentar '#'.
    Mengembalikan token dan offset awal payload (setelah satu whitespace).
    """
    pos = 2
    tokens: List[bytes] = []
    size = len(raw)
    while len(tokens) < count:
        if pos >= size:
            raise ImageFormatError(f"Header '{path}' terpotong.")
        ch = raw[pos:pos + 1]
        if ch == b"#":
            newline = raw.find(b"\n", pos)
            pos = size if newline < 0 else newline + 1
        elif ch.isspace():
            pos += 1
        else:
            match = _TOKEN_RE.match(raw, pos)
            tokens.append(match.group(0))
            pos = match.end()
    if pos < size and not raw[pos:pos + 1].isspace():
        raise ImageFormatError(f"Header '{path}' tidak diakhiri whitespace.")
    return tokens, pos + 1

def _parse_int(token: bytes, what: str, path: PathLike) -> int:
    if not token.isdigit():
        raise ImageFormatError(f"Nilai {what} '{token.decode(errors='replace')}' pada '{path}' bukan bilangan bulat.")
    return int(token)

def load_image(path: PathLike) -> ImageBuffer:
    """
    Memuat gambar PGM (P2/P5) atau PPM (P3/P6).
    maxval > 255 diskalakan linear: floor(v * 255 / maxval).
    """
    raw = _read_bytes(path)
    magic = raw[:2]
    if magic not in _PNM_MAGICS or len(raw) < 3 or not raw[2:3].isspace():
        raise ImageFormatError(f"File '{path}' bukan PGM/PPM (magic {magic!r}).")
    channels, binary = _PNM_MAGICS[magic]

    tokens, offset = _header_tokens(raw, 3, path)
    width = _parse_int(tokens[0], "lebar", path)
    height = _parse_int(tokens[1], "tinggi", path)
    maxval = _parse_int(tokens[2], "maxval", path)
    if width < 1 or height < 1 or not 1 <= maxval <= 65535:
        raise ImageFormatError(f"Header '{path}' tidak valid: {width}x{height}, maxval {maxval}.")

    count = width * height * channels
    if binary:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        expected = count * dtype.itemsize
        payload = raw[offset:offset + expected]
        if len(payload) < expected:
            raise ImageIOError(f"Payload '{path}' terpotong: {len(payload)} dari {expected} byte.")
        samples = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    else:
        text = re.sub(rb"#[^\n]*", b"", raw[offset:])
        words = text.split()
        if len(words) < count:
            raise ImageIOError(f"Payload ASCII '{path}' terpotong: {len(words)} dari {count} sampel.")
        samples = np.array([_parse_int(w, "sampel", path) for w in words[:count]], dtype=np.int64)

    if samples.max(initial=0) > maxval:
        raise ImageFormatError(f"Sampel pada '{path}' melebihi maxval {maxval}.")
    if maxval > 255:
        samples = (samples * 255) // maxval

    shape = (height, width) if channels == 1 else (height, width, 3)
    logging.debug(f"[IMGIO] Memuat {path}: {width}x{height}x{channels}, maxval {maxval}")
    return ImageBuffer(samples.reshape(shape).astype(np.uint8))

def save_image(img: ImageBuffer, path: PathLike):
    """Menulis gambar sebagai P5 (1 kanal) atau P6 (3 kanal), maxval 255."""
    magic = "P5" if img.channels == 1 else "P6"
    samples = np.clip(round_half_up(img.data), 0, 255).astype(np.uint8)
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    _write_bytes(path, header + samples.tobytes())


# ===============================
# PFM
# ===============================

def load_pfm(path: PathLike) -> np.ndarray:
    """Memuat PFM grayscale ('Pf'); baris disimpan dari bawah ke atas."""
    raw = _read_bytes(path)
    magic = raw[:2]
    if magic == b"PF":
        raise ImageFormatError(f"PFM berwarna '{path}' tidak didukung, hanya grayscale 'Pf'.")
    if magic != b"Pf" or len(raw) < 3 or not raw[2:3].isspace():
        raise ImageFormatError(f"File '{path}' bukan PFM (magic {magic!r}).")

    tokens, offset = _header_tokens(raw, 3, path)
    width = _parse_int(tokens[0], "lebar", path)
    height = _parse_int(tokens[1], "tinggi", path)
    try:
        scale = float(tokens[2])
    except ValueError as e:
        raise ImageFormatError(f"Skala PFM '{path}' tidak valid.") from e
    if width < 1 or height < 1 or scale == 0.0:
        raise ImageFormatError(f"Header PFM '{path}' tidak valid.")

    dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
    expected = width * height * 4
    payload = raw[offset:offset + expected]
    if len(payload) < expected:
        raise ImageIOError(f"Payload PFM '{path}' terpotong: {len(payload)} dari {expected} byte.")
    values = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return np.flipud(values).astype(np.float64)

def save_pfm(values: np.ndarray, path: PathLike):
    """Menulis PFM grayscale little-endian (skala -1.0)."""
    values = np.asarray(values)
    height, width = values.shape
    header = f"Pf\n{width} {height}\n-1.0\n".encode("ascii")
    _write_bytes(path, header + np.flipud(values).astype("<f4").tobytes())


# ===============================
# Disparitas
# ===============================

def save_disparity(disparity: DisparityMap, path: PathLike, scale: float = 1.0):
    """
    Menyimpan peta disparitas. Akhiran '.pfm' -> float lossless (sel invalid = +inf);
    selain itu PGM 8-bit dengan round(d * scale) di-clamp ke [0, 255], sel invalid = 0.
    Sampel 0 berarti tidak diketahui, jadi sel valid yang terkode 0 ditolak (pakai .pfm).
    """
    if not scale > 0:
        raise ArgumentError(f"Skala disparitas harus > 0, diberikan {scale}.")
    if str(path).lower().endswith(".pfm"):
        save_pfm(np.where(disparity.valid, disparity.values, np.inf), path)
        return
    samples = np.clip(round_half_up(disparity.values * scale), 0, 255)
    zeroed = disparity.valid & (samples == 0)
    if np.any(zeroed):
        raise ArgumentError(
            f"{int(zeroed.sum())} disparitas valid terkode 0 di PGM (dibaca sebagai tidak diketahui). "
            "Gunakan --dmin >= 1, --disp-scale lebih besar, atau output .pfm."
        )
    samples = np.where(disparity.valid, samples, 0).astype(np.uint8)
    save_image(ImageBuffer(samples), path)

def load_disparity(path: PathLike, scale: float = 1.0) -> DisparityMap:
    """
    Kebalikan dari save_disparity. PGM: nilai / scale, sampel 0 = tidak diketahui
    (konvensi ground truth Middlebury 2006). PFM: nilai non-finite = tidak valid.
    """
    if not scale > 0:
        raise ArgumentError(f"Skala disparitas harus > 0, diberikan {scale}.")
    if str(path).lower().endswith(".pfm"):
        return DisparityMap.from_array(load_pfm(path))
    img = load_image(path)
    if img.channels != 1:
        raise ImageFormatError(f"Peta disparitas '{path}' harus grayscale.")
    samples = img.as_float()
    return DisparityMap(samples / scale, samples != 0)


# ===============================
# Konversi & resampling
# ===============================

def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """Luma ITU-R 601 (0.299/0.587/0.114), dibulatkan ke bilangan bulat terdekat."""
    if img.channels == 1:
        return img
    rgb = img.as_float()
    luma = sum(w * rgb[:, :, c] for c, w in enumerate(LUMA_WEIGHTS))
    return ImageBuffer(np.clip(round_half_up(luma), 0, 255).astype(np.uint8))

def _scaled_dim(size: int, factor: Fraction) -> int:
    scaled = size * factor
    if scaled.denominator != 1 or scaled < 1:
        raise ArgumentError(f"Faktor {factor} menghasilkan dimensi non-integral ({size} -> {float(scaled)}).")
    return int(scaled)

def _source_coords(size_out: int, size_in: int, factor: Fraction) -> np.ndarray:
    # Pusat piksel di setengah-piksel: src = (dst + 0.5) / f - 0.5
    coords = (np.arange(size_out, dtype=np.float64) + 0.5) / float(factor) - 0.5
    return np.clip(coords, 0.0, size_in - 1.0)

def resize_bilinear(img: ImageBuffer, factor: Union[int, float, Fraction]) -> ImageBuffer:
    """Resampling bilinear dengan pusat setengah-piksel; faktor 1 mengembalikan gambar yang sama."""
    try:
        factor = Fraction(factor).limit_denominator(1 << 16)
    except (TypeError, ValueError) as e:
        raise ArgumentError(f"Faktor resize tidak valid: {factor!r}") from e
    if factor <= 0:
        raise ArgumentError(f"Faktor resize harus positif, diberikan {factor}.")
    out_h = _scaled_dim(img.height, factor)
    out_w = _scaled_dim(img.width, factor)
    if factor == 1:
        return img

    rows = _source_coords(out_h, img.height, factor)
    cols = _source_coords(out_w, img.width, factor)
    grid = np.meshgrid(rows, cols, indexing="ij")
    data = img.as_float()
    if img.channels == 1:
        resized = ndimage.map_coordinates(data, grid, order=1, mode="nearest")
    else:
        resized = np.stack(
            [ndimage.map_coordinates(data[:, :, c], grid, order=1, mode="nearest") for c in range(3)],
            axis=2,
        )
    return ImageBuffer(resized)
