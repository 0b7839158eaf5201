# core/report_generator.py
import logging
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

try:
    from jinja2 import Environment, FileSystemLoader, TemplateNotFound
    JINJA2_AVAILABLE = True
except ImportError:
    JINJA2_AVAILABLE = False

try:
    from rich.table import Table
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from core.evaluation import EvalReport, improvement, mean_improvement

BASE_DIR = Path(__file__).parent.parent.resolve()


@dataclass(frozen=True)
class ReportEntry:
    """Satu baris laporan: hasil evaluasi scene dan (opsional) baseline pembandingnya."""
    name: str
    report: EvalReport
    baseline: Optional[EvalReport] = None

    @property
    def improvement(self) -> Optional[Dict[str, Optional[float]]]:
        if self.baseline is None:
            return None
        return improvement(self.baseline, self.report)


def average_decrease(entries: Sequence[ReportEntry]) -> Optional[Dict[str, Optional[float]]]:
    """Baris 'rata-rata penurunan' atas semua entri yang punya baseline."""
    items = [e.improvement for e in entries if e.baseline is not None]
    return mean_improvement(items) if items else None

def format_metric(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.3f}"

def format_improvement(value: Optional[float]) -> str:
    """Gaya tabel hasil: '↓ 23.9%' untuk penurunan error, '↑' untuk kenaikan."""
    if value is None:
        return "n/a"
    arrow = "↓" if value >= 0 else "↑"
    return f"{arrow} {abs(value):.1f}%"


def generate_text_content(entries: Sequence[ReportEntry]) -> str:
    """Tabel teks rata kolom, diikuti baris `key=value` per scene."""
    metrics = EvalReport.METRICS
    name_width = max([len("Scene")] + [len(e.name) for e in entries]) + 2
    header = "Scene".ljust(name_width) + "".join(EvalReport.LABELS[m].rjust(10) for m in metrics)
    header += "Evaluated".rjust(11) + "Excluded".rjust(10) + "Invalid".rjust(9)
    lines = [header, "-" * len(header)]
    for entry in entries:
        r = entry.report
        row = entry.name.ljust(name_width) + "".join(format_metric(getattr(r, m)).rjust(10) for m in metrics)
        row += str(r.evaluated).rjust(11) + str(r.excluded).rjust(10) + str(r.invalid_estimates).rjust(9)
        lines.append(row)
        if entry.improvement is not None:
            lines.append("  vs baseline".ljust(name_width)
                         + "".join(format_improvement(entry.improvement[m]).rjust(10) for m in metrics))

    summary = average_decrease(entries)
    if summary is not None and len(entries) > 1:
        lines.append("-" * len(header))
        lines.append("Rata-rata".ljust(name_width) + "".join(format_improvement(summary[m]).rjust(10) for m in metrics))

    for entry in entries:
        lines.append("")
        lines.append(f"[{entry.name}]")
        lines.extend(entry.report.to_lines())
        if entry.improvement is not None:
            for m in metrics:
                value = entry.improvement[m]
                lines.append(f"decrease_{m}={'nan' if value is None else f'{value:.6f}'}")
    return "\n".join(lines) + "\n"

def build_report_table(entries: Sequence[ReportEntry]) -> "Table":
    """Tabel Rich untuk ditampilkan di konsol."""
    table = Table(title="Hasil Evaluasi Disparitas", border_style="green")
    table.add_column("Scene", style="cyan", no_wrap=True)
    for m in EvalReport.METRICS:
        table.add_column(EvalReport.LABELS[m], justify="right")
    table.add_column("Evaluated", justify="right", style="magenta")
    table.add_column("Invalid", justify="right", style="magenta")

    for entry in entries:
        r = entry.report
        table.add_row(entry.name, *(format_metric(getattr(r, m)) for m in EvalReport.METRICS),
                      str(r.evaluated), str(r.invalid_estimates))
        if entry.improvement is not None:
            table.add_row("[dim]vs baseline[/dim]",
                          *(f"[green]{format_improvement(entry.improvement[m])}[/green]" for m in EvalReport.METRICS),
                          "", "")
    summary = average_decrease(entries)
    if summary is not None and len(entries) > 1:
        table.add_row("[bold]Rata-rata[/bold]", *(format_improvement(summary[m]) for m in EvalReport.METRICS), "", "")
    return table


def generate_html_content(entries: Sequence[ReportEntry], template_path: Optional[Path] = None) -> str:
    """
    Menghasilkan laporan HTML menggunakan template Jinja2.
    Mendukung template default dan template kustom yang disediakan pengguna.
    """
    if not JINJA2_AVAILABLE:
        error_msg = "[WRITER] Pustaka 'Jinja2' tidak ditemukan. Tidak dapat membuat laporan HTML."
        logging.error(error_msg)
        return f"<h1>Error</h1><p>{error_msg} Please run: <code>pip install Jinja2</code></p>"

    try:
        if template_path:
            if not template_path.exists():
                raise FileNotFoundError(f"File template kustom tidak ditemukan di: {template_path}")
            template_dir, template_name = template_path.parent, template_path.name
        else:
            template_dir, template_name = BASE_DIR / "templates", "report.html.j2"
        env = Environment(loader=FileSystemLoader(str(template_dir)), autoescape=True)
        template = env.get_template(template_name)
    except TemplateNotFound:
        error_msg = f"[WRITER] Template '{template_name}' tidak ditemukan di direktori '{template_dir}'."
        logging.error(error_msg)
        return f"<h1>Error</h1><p>{error_msg}</p>"
    except Exception as e:
        error_msg = f"[WRITER] Gagal memuat template HTML: {e}"
        logging.error(error_msg, exc_info=True)
        return f"<h1>Error</h1><p>{error_msg}</p>"

    rows: List[Dict] = []
    for entry in entries:
        gain = entry.improvement
        rows.append({
            "name": entry.name,
            "metrics": {EvalReport.LABELS[m]: format_metric(getattr(entry.report, m)) for m in EvalReport.METRICS},
            "improvement": None if gain is None else {EvalReport.LABELS[m]: format_improvement(gain[m]) for m in EvalReport.METRICS},
            "evaluated": entry.report.evaluated,
            "excluded": entry.report.excluded,
            "invalid": entry.report.invalid_estimates,
        })
    summary = average_decrease(entries)
    context = {
        "labels": [EvalReport.LABELS[m] for m in EvalReport.METRICS],
        "rows": rows,
        "summary": None if summary is None else [format_improvement(summary[m]) for m in EvalReport.METRICS],
        "timestamp": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
    }
    return template.render(context)
