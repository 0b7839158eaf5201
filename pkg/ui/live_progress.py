# ui/live_progress.py
"""
Modul untuk mengelola dan menampilkan Live Progress Table menggunakan Rich.
"""
import threading
import time
from typing import Any, Dict, Iterable, Optional

from rich.console import Console
from rich.live import Live
from rich.table import Table

STATUS_STYLES = {
    "PENDING": "[grey50]PENDING[/]",
    "RUNNING": "[yellow]⏳ RUNNING[/]",
    "COMPLETED": "[green]✅ COMPLETED[/]",
    "FAILED": "[red]❌ FAILED[/]",
    "CACHED": "[blue]💾 CACHED[/]",
}


class LiveProgressManager:
    """
    Mengelola status tahap pipeline (cost, fusion, wta, optimize, ...) dan
    me-render tabel live; aman dipanggil dari thread worker.
    """
    def __init__(self, console: Optional[Console], enabled: bool = True, title: str = "Multiscopic Live Progress"):
        self.console = console
        self.enabled = enabled and console is not None
        self.title = title
        self.stages: Dict[str, Dict[str, Any]] = {}
        self._lock = threading.Lock()
        self._live: Optional[Live] = None

    def _generate_table(self) -> Table:
        """Membuat objek tabel Rich dari data status saat ini."""
        table = Table(title=f"[bold blue]{self.title}[/bold blue]", border_style="green")
        table.add_column("Tahap", style="cyan", no_wrap=True)
        table.add_column("Durasi", justify="right", style="magenta")
        table.add_column("Status", justify="center")

        for name, data in self.stages.items():
            started, finished = data["started"], data["finished"]
            if started is None:
                elapsed = "-"
            else:
                elapsed = f"{(finished or time.monotonic()) - started:.2f}s"
            table.add_row(name, elapsed, STATUS_STYLES.get(data["status"], data["status"]))
        return table

    def add_stages(self, names: Iterable[str]):
        """Mendaftarkan semua tahap ke tabel dengan status PENDING."""
        with self._lock:
            for name in names:
                self.stages[name] = {"status": "PENDING", "started": None, "finished": None}
        self._update_display()

    def update_status(self, name: str, status: str):
        """Memperbarui status sebuah tahap; dipakai sebagai progress callback matcher."""
        with self._lock:
            entry = self.stages.setdefault(name, {"status": "PENDING", "started": None, "finished": None})
            entry["status"] = status
            if status == "RUNNING" and entry["started"] is None:
                entry["started"] = time.monotonic()
            elif status in ("COMPLETED", "FAILED", "CACHED"):
                entry["finished"] = time.monotonic()
        self._update_display()

    def fail_running(self):
        """Menandai tahap yang masih RUNNING sebagai FAILED (dipanggil saat error)."""
        running = [name for name, data in self.stages.items() if data["status"] == "RUNNING"]
        for name in running:
            self.update_status(name, "FAILED")

    def _update_display(self):
        """Memicu re-render tabel live."""
        if self.enabled and self._live:
            self._live.update(self._generate_table(), refresh=True)

    def start(self):
        """Memulai tampilan live table."""
        if self.enabled:
            self._live = Live(self._generate_table(), console=self.console, refresh_per_second=10)
            self._live.start()

    def stop(self):
        """Menghentikan tampilan live table; tabel terakhir tetap di layar."""
        if self.enabled and self._live:
            self._live.stop()
            self._live = None
