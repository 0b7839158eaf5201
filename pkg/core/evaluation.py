# core/evaluation.py
"""
Metrik evaluasi disparitas (RMS, AvgErr, Bad0.5/1/2), persentase penurunan
terhadap baseline, dan pewarnaan Jet untuk preview.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import ClassVar, Dict, Iterable, List, Optional, Tuple

import numpy as np

from core.error_handler import ArgumentError
from core.imgio import DisparityMap, ImageBuffer, round_half_up

BAD_THRESHOLDS = (("bad05", 0.5), ("bad1", 1.0), ("bad2", 2.0))


@dataclass(frozen=True)
class EvalReport:
    rms: float
    avg_err: float
    bad05: float
    bad1: float
    bad2: float
    evaluated: int
    excluded: int
    invalid_estimates: int

    METRICS: ClassVar[Tuple[str, ...]] = ("rms", "avg_err", "bad05", "bad1", "bad2")
    LABELS: ClassVar[Dict[str, str]] = {
        "rms": "RMS", "avg_err": "AvgErr", "bad05": "Bad0.5", "bad1": "Bad1", "bad2": "Bad2",
    }

    def metrics(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.METRICS}

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)

    def to_lines(self) -> List[str]:
        """Baris `key=value` yang mudah di-parse mesin."""
        lines = []
        for key, value in self.as_dict().items():
            lines.append(f"{key}={value:.6f}" if isinstance(value, float) else f"{key}={value}")
        return lines


def evaluate(est: DisparityMap, gt: DisparityMap) -> EvalReport:
    """
    Piksel dengan GT tidak valid dikecualikan. Estimasi tidak valid selalu dihitung
    'bad' dan dikeluarkan dari RMS/AvgErr. Ambang Bad memakai '>' tegas.
    """
    if est.shape != gt.shape:
        raise ArgumentError(f"Dimensi estimasi {est.shape} berbeda dengan ground truth {gt.shape}.")
    considered = gt.valid
    evaluated = int(considered.sum())
    excluded = int(considered.size - evaluated)
    missing = considered & ~est.valid
    scored = considered & est.valid
    err = np.abs(est.values[scored] - gt.values[scored])

    if evaluated == 0:
        logging.warning("[EVAL] Tidak ada piksel ground truth yang valid.")
        nan = float("nan")
        return EvalReport(nan, nan, nan, nan, nan, 0, excluded, 0)

    if err.size:
        rms = float(np.sqrt(np.mean(err ** 2)))
        avg_err = float(np.mean(err))
    else:
        rms = avg_err = float("nan")
    invalid = int(missing.sum())
    bad = {name: 100.0 * (int((err > limit).sum()) + invalid) / evaluated for name, limit in BAD_THRESHOLDS}
    if invalid:
        logging.debug(f"[EVAL] {invalid} piksel tanpa estimasi dihitung sebagai bad")
    return EvalReport(rms, avg_err, bad["bad05"], bad["bad1"], bad["bad2"], evaluated, excluded, invalid)


def improvement(baseline: EvalReport, candidate: EvalReport) -> Dict[str, Optional[float]]:
    """100 * (a - b) / a per metrik; None bila metrik baseline 0 atau tidak terdefinisi."""
    result: Dict[str, Optional[float]] = {}
    for name in EvalReport.METRICS:
        a, b = getattr(baseline, name), getattr(candidate, name)
        if a == 0 or math.isnan(a) or math.isnan(b):
            result[name] = None
        else:
            result[name] = 100.0 * (a - b) / a
    return result

def mean_improvement(improvements: Iterable[Dict[str, Optional[float]]]) -> Dict[str, Optional[float]]:
    """Rata-rata penurunan per metrik atas beberapa scene (nilai None dilewati)."""
    collected: Dict[str, List[float]] = {name: [] for name in EvalReport.METRICS}
    for item in improvements:
        for name in EvalReport.METRICS:
            if item.get(name) is not None:
                collected[name].append(item[name])
    return {name: (float(np.mean(values)) if values else None) for name, values in collected.items()}


def jet(x: np.ndarray) -> np.ndarray:
    """Colormap Jet untuk x di [0, 1]; mengembalikan (..., 3) float di [0, 1]."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    channels = [np.clip(1.5 - np.abs(4.0 * x - center), 0.0, 1.0) for center in (3.0, 2.0, 1.0)]
    return np.stack(channels, axis=-1)

def colorize(disparity: DisparityMap, d_max: float) -> ImageBuffer:
    """Preview Jet dari d / d_max; sel tidak valid hitam."""
    if not d_max > 0:
        raise ArgumentError(f"d_max harus > 0, diberikan {d_max}.")
    rgb = round_half_up(jet(disparity.values / d_max) * 255.0)
    rgb[~disparity.valid] = 0
    return ImageBuffer(rgb.astype(np.uint8))
