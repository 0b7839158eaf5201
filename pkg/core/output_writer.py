# core/output_writer.py
import csv
import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from core.evaluation import EvalReport
from core.report_generator import (ReportEntry, average_decrease, generate_html_content,
                                   generate_text_content)


def check_output_path(path: Union[str, Path], overwrite: bool) -> Optional[Path]:
    """
    Validasi path output: harus di dalam direktori kerja dan tidak menimpa
    file lama tanpa --overwrite. Mengembalikan None bila penulisan harus dibatalkan.
    """
    output_path = Path(path)
    try:
        resolved_path = output_path.resolve()
        cwd = Path.cwd().resolve()
        if resolved_path != cwd and cwd not in resolved_path.parents:
            logging.error(f"[WRITER] [bold red]SECURITY[/bold red]: Path output [yellow]'{output_path}'[/yellow] berada di luar direktori kerja. Penulisan dibatalkan.")
            return None
    except (OSError, RuntimeError) as e:
        logging.error(f"[WRITER] Path output tidak valid: '{output_path}'. Error: {e}")
        return None

    if output_path.exists() and not overwrite:
        logging.warning(f"[WRITER] File output [yellow]{output_path}[/] sudah ada. Gunakan --overwrite untuk menimpa.")
        return None
    output_path.parent.mkdir(parents=True, exist_ok=True)
    return output_path


def _clean(value: Any) -> Any:
    """NaN -> None agar JSON tetap valid."""
    if isinstance(value, float) and math.isnan(value):
        return None
    return value

def _entry_dict(entry: ReportEntry) -> Dict[str, Any]:
    data: Dict[str, Any] = {"name": entry.name, "report": {k: _clean(v) for k, v in entry.report.as_dict().items()}}
    if entry.baseline is not None:
        data["baseline"] = {k: _clean(v) for k, v in entry.baseline.as_dict().items()}
        data["decrease_percent"] = entry.improvement
    return data

def _write_txt(file_path: Path, entries: Sequence[ReportEntry], template_path: Optional[Path]):
    file_path.write_text(generate_text_content(entries), encoding="utf-8")

def _write_json(file_path: Path, entries: Sequence[ReportEntry], template_path: Optional[Path]):
    payload = {"scenes": [_entry_dict(e) for e in entries], "average_decrease_percent": average_decrease(entries)}
    file_path.write_text(json.dumps(payload, indent=4, sort_keys=True), encoding="utf-8")

def _write_csv(file_path: Path, entries: Sequence[ReportEntry], template_path: Optional[Path]):
    fields = [f.name for f in dataclasses.fields(EvalReport)]
    headers = ["scene"] + fields + [f"decrease_{m}" for m in EvalReport.METRICS]
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=headers)
        writer.writeheader()
        for entry in entries:
            row: Dict[str, Any] = {"scene": entry.name, **entry.report.as_dict()}
            gain = entry.improvement or {}
            row.update({f"decrease_{m}": gain.get(m) for m in EvalReport.METRICS})
            writer.writerow(row)

def _write_html(file_path: Path, entries: Sequence[ReportEntry], template_path: Optional[Path]):
    file_path.write_text(generate_html_content(entries, template_path), encoding="utf-8")

WRITERS = {
    "txt": _write_txt,
    "json": _write_json,
    "csv": _write_csv,
    "html": _write_html,
}


def write_report(entries: List[ReportEntry], path: Union[str, Path], overwrite: bool = False,
                 template_path: Optional[Path] = None) -> bool:
    """
    Menulis laporan evaluasi; format dipilih dari ekstensi (.txt, .json, .csv, .html).
    """
    output_path = check_output_path(path, overwrite)
    if output_path is None:
        return False

    ext = output_path.suffix.lower().strip(".")
    writer_func = WRITERS.get(ext)
    if not writer_func:
        logging.warning(f"[WRITER] Format '{ext}' tidak dikenali. Menyimpan sebagai teks biasa (.txt).")
        output_path = output_path.with_suffix(".txt")
        writer_func = _write_txt

    try:
        writer_func(output_path, entries, template_path)
    except OSError as e:
        logging.error(f"[WRITER] Gagal menulis file output {output_path}: {e}", exc_info=True)
        return False
    logging.info(f"[WRITER] Laporan disimpan ke [cyan]{output_path}[/]")
    return True
