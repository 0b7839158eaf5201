# core/cache.py
"""
Cache hasil disparitas di disk. Kunci = SHA-256 dari isi file input + parameter;
setiap entri menyimpan checksum dan dijaga FileLock agar aman dipakai paralel.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np

try:
    from filelock import FileLock, Timeout
    FILELOCK_AVAILABLE = True
except ImportError:
    FILELOCK_AVAILABLE = False

from core.imgio import DisparityMap


def _checksum(values: np.ndarray, valid: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(values, dtype="<f8").tobytes())
    digest.update(np.ascontiguousarray(valid, dtype=np.uint8).tobytes())
    return digest.hexdigest()


def cache_key(inputs: Iterable[Tuple[str, Union[str, Path]]], params: Dict[str, Any], version: str) -> str:
    """
    Hash (peran, isi file) untuk setiap input dan parameter yang sudah diurutkan.
    Peran (mis. "center", "right") dan panjang isi di-hash sebelum byte tiap file.
    """
    digest = hashlib.sha256(version.encode("utf-8"))
    for role, path in sorted(inputs, key=lambda item: item[0]):
        data = Path(path).read_bytes()
        digest.update(f"{role}:{len(data)}\n".encode("utf-8"))
        digest.update(data)
    digest.update(json.dumps(params, sort_keys=True, default=str).encode("utf-8"))
    return digest.hexdigest()


class DisparityCache:
    def __init__(self, cache_dir: Union[str, Path], lock_timeout: float = 1.0):
        self.cache_dir = Path(cache_dir)
        self.lock_timeout = lock_timeout
        self.enabled = FILELOCK_AVAILABLE
        if not self.enabled:
            logging.warning("[CACHE] Cache dinonaktifkan karena 'filelock' tidak ada.")
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _paths(self, key: str):
        stem = key[:16]
        return self.cache_dir / f"{stem}.npz", self.cache_dir / f"{stem}.lock"

    def load(self, key: str) -> Optional[DisparityMap]:
        if not self.enabled:
            return None
        cache_file, lock_file = self._paths(key)
        try:
            with FileLock(str(lock_file), timeout=self.lock_timeout):
                if not cache_file.exists():
                    return None
                try:
                    with np.load(cache_file, allow_pickle=False) as payload:
                        values, valid = payload["values"], payload["valid"]
                        stored_key, checksum = str(payload["key"]), str(payload["checksum"])
                except (OSError, KeyError, ValueError):
                    logging.warning(f"[CACHE] Cache {cache_file.name} tidak bisa dibaca. Hitung ulang.")
                    return None
                if stored_key != key or checksum != _checksum(values, valid):
                    logging.warning(f"[CACHE] Cache {cache_file.name} rusak. Hitung ulang.")
                    return None
                logging.info(f"[CACHE] Memuat disparitas dari cache [cyan]{cache_file.name}[/]")
                return DisparityMap(values, valid)
        except Timeout:
            logging.warning("[CACHE] Gagal mendapatkan lock cache, melanjutkan tanpa cache.")
            return None

    def store(self, key: str, disparity: DisparityMap):
        if not self.enabled:
            return
        cache_file, lock_file = self._paths(key)
        try:
            with FileLock(str(lock_file), timeout=self.lock_timeout):
                tmp_file = cache_file.with_suffix(".tmp")
                with tmp_file.open("wb") as f:
                    np.savez(f, values=disparity.values, valid=disparity.valid, key=np.array(key),
                             checksum=np.array(_checksum(disparity.values, disparity.valid)))
                tmp_file.replace(cache_file)
                logging.debug(f"[CACHE] Disparitas disimpan ke {cache_file}")
        except Timeout:
            logging.warning("[CACHE] Gagal mendapatkan lock untuk menulis cache.")
