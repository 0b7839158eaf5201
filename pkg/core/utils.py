# core/utils.py
import re
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from core.error_handler import ArgumentError

IMAGE_SUFFIXES = {".pgm", ".ppm", ".pnm"}
DISPARITY_SUFFIXES = {".pgm", ".pfm"}

_KEY_VALUE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_\-]*)\s*=\s*(.*?)\s*$")


def is_valid_image_path(path: Union[str, Path], suffixes=IMAGE_SUFFIXES) -> bool:
    """
    Memvalidasi path gambar input: ekstensi dikenal dan file benar-benar ada.
    """
    if not path:
        return False
    p = Path(path)
    return p.suffix.lower() in suffixes and p.is_file()

def normalize_key(key: str) -> str:
    """
    Menormalkan nama kunci konfigurasi ke bentuk atribut argparse.
    Contoh: " Block-Size " -> "block_size"
    """
    return key.strip().lower().replace("-", "_")

def strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()

def parse_key_value_lines(lines: Iterable[str]) -> Tuple[Dict[str, str], List[str]]:
    """
    Memisahkan baris `key = value` dari baris lain (mis. daftar layer scene).
    Komentar '#' dan baris kosong diabaikan.
    """
    values: Dict[str, str] = {}
    others: List[str] = []
    for raw in lines:
        line = strip_comment(raw)
        if not line:
            continue
        match = _KEY_VALUE_RE.match(line)
        if match:
            values[normalize_key(match.group(1))] = match.group(2)
        else:
            others.append(line)
    return values, others

def block_size_to_radius(block_size: int) -> int:
    """
    Ukuran blok ganjil 2*rho+1 -> radius rho (11 -> 5, 17 -> 8).
    """
    if block_size < 1 or block_size % 2 == 0:
        raise ArgumentError(f"Ukuran blok harus ganjil dan positif, diberikan {block_size}.")
    return block_size // 2
