# core/plugin_loader.py
import importlib
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

# Coba impor Rich untuk tampilan tabel yang lebih baik
try:
    from rich.console import Console
    from rich.panel import Panel
    from rich.table import Table
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

BASE_DIR = Path(__file__).parent.parent.resolve()
CONSOLE = Console(color_system="auto") if RICH_AVAILABLE else None

PLUGIN_TYPE = "methods"
# Atribut wajib plugin metode matching: (nama, harus callable)
REQUIRED_ATTRIBUTES: Tuple[Tuple[str, bool], ...] = (
    ("name", False),
    ("description", False),
    ("stages", False),
    ("build_params", True),
    ("match", True),
)


def _missing_attributes(plugin: Any) -> List[str]:
    missing = []
    for attr, must_call in REQUIRED_ATTRIBUTES:
        value = getattr(plugin, attr, None)
        if value is None or (must_call and not callable(value)):
            missing.append(attr)
    return missing

def _plugin_modules(plugin_type: str) -> List[str]:
    plugin_dir = BASE_DIR / "plugins" / plugin_type
    if not plugin_dir.is_dir():
        logging.warning(f"[LOADER] Direktori plugin 'plugins/{plugin_type}' tidak ditemukan.")
        return []
    return [f"plugins.{plugin_type}.{f.stem}" for f in sorted(plugin_dir.glob("*.py")) if not f.name.startswith("__")]

def load_plugins(use_only: Optional[List[str]] = None, plugin_type: str = PLUGIN_TYPE) -> Dict[str, Any]:
    """
    Memuat dan memvalidasi plugin metode matching (bm, gc, ...).
    """
    loaded_plugins: Dict[str, Any] = {}
    for module_name in _plugin_modules(plugin_type):
        try:
            module = importlib.import_module(module_name)
            plugin_instance = module.Plugin()
        except Exception as e:
            logging.error(f"[LOADER] Plugin '{module_name}' gagal dimuat: {e}", exc_info=True)
            continue

        missing = _missing_attributes(plugin_instance)
        if missing:
            logging.warning(f"[LOADER] Plugin {module_name} dilewati: atribut tidak valid ({', '.join(missing)}).")
            continue

        name_lower = plugin_instance.name.lower()
        if use_only and name_lower not in use_only:
            continue
        if name_lower in loaded_plugins:
            logging.warning(f"[LOADER] Nama plugin '{name_lower}' duplikat, {module_name} dilewati.")
            continue
        loaded_plugins[name_lower] = plugin_instance
    return loaded_plugins

def lint_plugins(plugin_type: str = PLUGIN_TYPE) -> int:
    """
    Memvalidasi semua plugin yang ada dan menampilkan laporan status.
    Mengembalikan jumlah error yang ditemukan.
    """
    if not CONSOLE:
        print("Fitur linting memerlukan pustaka 'rich'. Mohon install: pip install rich")
        return 0

    CONSOLE.print(Panel.fit("[bold green]🔍 Menjalankan Linter untuk Plugin Metode Matching[/bold green]"))

    table = Table(title="Laporan Validasi Plugin")
    table.add_column("Nama Plugin", style="cyan", no_wrap=True)
    table.add_column("Atribut", style="yellow")
    table.add_column("Status", style="bold")

    total_errors = 0
    for module_name in _plugin_modules(plugin_type):
        try:
            plugin = importlib.import_module(module_name).Plugin()
        except Exception as e:
            table.add_row(f"[dim]{module_name}[/dim]", "Inisialisasi", f"[red]GAGAL ({e})[/red]")
            total_errors += 1
            continue

        label = getattr(plugin, "name", None) or f"[dim]{module_name}[/dim]"
        missing = _missing_attributes(plugin)
        for attr, must_call in REQUIRED_ATTRIBUTES:
            shown = f".{attr}()" if must_call else f".{attr}"
            if attr in missing:
                table.add_row(label, shown, "[red]GAGAL[/red]")
                total_errors += 1
            else:
                table.add_row(label, shown, "[green]OK[/green]")

    CONSOLE.print(table)
    if total_errors == 0:
        CONSOLE.print("\n[bold green]✅ Semua plugin tervalidasi dengan sukses![/bold green]")
    else:
        CONSOLE.print(f"\n[bold red]❌ Ditemukan {total_errors} error pada konfigurasi plugin.[/bold red]")
    return total_errors
