#!/usr/bin/env python3
"""
Multiscopic Matcher v1.0.0
Estimasi disparitas dari satu gambar tengah dan hingga empat gambar surround
(kiri, kanan, atas, bawah) dengan baseline sama: block matching dan graph cuts.
"""

# 1. Pustaka Standar
import argparse
import logging
import logging.handlers
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

# 2. Pustaka Pihak Ketiga & Modul Lokal
try:
    from rich.console import Console, Group
    from rich.logging import RichHandler
    from rich.panel import Panel
    from rich.table import Table
    from rich.text import Text
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from ui.live_progress import LiveProgressManager
from core.cache import DisparityCache, cache_key
from core.capture import (MultiscopicSet, ViewDirection, default_scene, load_scene,
                          rectify_check, render_multiscopic)
from core.cost import cost_volume, dump_volume
from core.error_handler import PluginError, handle_plugin_exception, handle_stage_failure
from core.evaluation import colorize, evaluate
from core.fusion import DEFAULT_RATIO, STRATEGIES, fuse
from core.imgio import (DisparityMap, ImageBuffer, load_disparity, load_image,
                        save_disparity, save_image)
from core.output_writer import check_output_path, write_report
from core.plugin_loader import lint_plugins, load_plugins
from core.report_generator import ReportEntry, build_report_table, generate_text_content
from core.utils import (DISPARITY_SUFFIXES, IMAGE_SUFFIXES, block_size_to_radius,
                        is_valid_image_path, parse_key_value_lines, strip_comment)


# ===============================
# ⚙️ Konfigurasi & Utilitas
# ===============================

VERSION = "1.0.0"
BASE_DIR = Path(__file__).parent.resolve()
CONSOLE = Console(color_system="auto") if RICH_AVAILABLE else None

# Nilai bawaan mengikuti setelan dataset Middlebury (d di [1, 60], blok 11, K = 10)
BASE_DEFAULTS: Dict[str, Any] = {"dmin": 1, "dmax": 60, "block_size": 11, "K": 10.0}
PRESETS: Dict[str, Dict[str, Any]] = {
    "robot": {"dmax": 70, "block_size": 17, "K": 25.0},
}
TRUE_WORDS = {"1", "true", "yes", "on", "ya"}


def safe_console_print(content: Any, **kwargs):
    """Wrapper untuk print yang aman jika Rich tidak tersedia."""
    if CONSOLE: CONSOLE.print(content, **kwargs)
    else: print(re.sub(r"\[.*?\]", "", str(content)))

def print_banner():
    """Menampilkan banner program."""
    plain_ascii_art = r"""
   __  ___     ____  _                        _
  /  |/  /_ __/ / /_(_)__ _______  ___  ___  (_)___
 / /|_/ / // / / __/ (_-</ __/ _ \/ _ \/ _ \/ / __/
/_/  /_/\_,_/_/\__/_/___/\__/\___/ .__/\___/_/\__/
                                /_/
"""
    if not RICH_AVAILABLE:
        print(plain_ascii_art)
        return
    art_text = Text(plain_ascii_art.strip("\n"), style="bold cyan", justify="center")
    version_text = Text(f"v{VERSION} - BM & Graph Cuts", style="bold magenta", justify="center")
    safe_console_print(Panel(Group(art_text, version_text), border_style="green", expand=False))


def setup_logging(is_silent: bool, is_debug: bool, log_file: Optional[str]):
    """Mengatur konfigurasi logging ke konsol dan file (opsional)."""
    level = logging.WARNING if is_silent else logging.DEBUG if is_debug else logging.INFO
    handlers: List[logging.Handler] = []
    log_formatter = logging.Formatter("[%(asctime)s] [%(levelname)-7s] %(message)s")

    if RICH_AVAILABLE:
        handlers.append(RichHandler(console=CONSOLE, show_path=False, rich_tracebacks=True, markup=True))
    else:
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(log_formatter)
        handlers.append(stream_handler)

    file_error = None
    if log_file:
        try:
            handler = logging.handlers.RotatingFileHandler(log_file, maxBytes=5*1024*1024, backupCount=3, encoding='utf-8')
            handler.setFormatter(log_formatter)
            handlers.append(handler)
        except OSError as e:
            file_error = e

    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=handlers, force=True)
    logging.getLogger("filelock").setLevel(logging.WARNING)
    logging.getLogger("jinja2").setLevel(logging.WARNING)
    if file_error:
        logging.error(f"[SYSTEM] Tidak dapat menulis ke file log {log_file}: {file_error}")


# ===============================
# 🧾 Argumen & Konfigurasi
# ===============================

def _add_common_arguments(parser: argparse.ArgumentParser):
    group_config = parser.add_argument_group("Configuration")
    group_config.add_argument("--config", type=Path, help="File konfigurasi 'key = value' (nama kunci = nama flag). Flag eksplisit menang.")

    group_verbosity = parser.add_argument_group("Verbosity & Logging")
    group_verbosity.add_argument("--no-live-ui", action="store_true", help="Nonaktifkan tampilan Live Progress Table.")
    group_verbosity.add_argument("-s", "--silent", action="store_true", help="Mode senyap (hanya output error).")
    group_verbosity.add_argument("--debug", action="store_true", help="Aktifkan logging DEBUG.")
    group_verbosity.add_argument("--log-file", help="Simpan log ke file (dengan rotasi otomatis).")

def _add_input_arguments(parser: argparse.ArgumentParser):
    group_input = parser.add_argument_group("Input")
    group_input.add_argument("--center", type=Path, help="Gambar tengah (referensi), PGM/PPM.")
    for direction in ViewDirection:
        group_input.add_argument(f"--{direction.value}", type=Path, help=f"Gambar surround arah {direction.value}.")
    group_input.add_argument("--middlebury", type=Path, metavar="DIR",
                             help="Direktori Middlebury 2006: view0 (kiri), view1 (tengah), view2 (kanan).")
    group_input.add_argument("--baseline-mm", type=float, default=1.0, help="Baseline antar kamera (mm). Default: 1.0")

def _add_range_arguments(group):
    group.add_argument("--preset", choices=sorted(PRESETS), help="Preset parameter (robot: dmax 70, blok 17, K 25).")
    group.add_argument("--block-size", type=int, default=None, help="Ukuran blok BM (ganjil). Default: 11")
    group.add_argument("--dmin", type=int, default=None, help="Disparitas minimum. Default: 1")
    group.add_argument("--dmax", type=int, default=None, help="Disparitas maksimum. Default: 60")
    group.add_argument("--fusion", choices=STRATEGIES, default="heuristic", help="Strategi fusion cost. Default: heuristic")
    group.add_argument("--heuristic-ratio", type=float, default=DEFAULT_RATIO, help="Faktor uji rasio fusion heuristik. Default: 3")

def build_parser(method_names: Sequence[str]) -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(description=f"Multiscopic Matcher v{VERSION}", formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--list-plugins", action="store_true", help="Tampilkan semua metode matching yang tersedia dan keluar.")
    parser.add_argument("--lint-plugins", action="store_true", help="Validasi semua plugin metode dan keluar.")
    commands = parser.add_subparsers(dest="command", metavar="{match,synth,eval,fuse-dump}")
    subparsers: Dict[str, argparse.ArgumentParser] = {}

    # --- match ---
    p_match = commands.add_parser("match", help="Estimasi disparitas dari set multiscopic / pasangan stereo.")
    _add_input_arguments(p_match)
    group_matching = p_match.add_argument_group("Matching")
    group_matching.add_argument("--method", choices=list(method_names) or None, default="bm", help="Metode matching. Default: bm")
    _add_range_arguments(group_matching)
    group_matching.add_argument("--no-subpixel", action="store_true", help="Matikan penyempurnaan subpiksel BM.")
    group_matching.add_argument("--workers", type=int, default=4, help="Jumlah thread untuk membangun cost volume. Default: 4")
    group_matching.add_argument("--align-tolerance", type=float, default=0.5, help="Toleransi cek alignment epipolar (px). Default: 0.5")

    group_gc = p_match.add_argument_group("Graph cuts")
    group_gc.add_argument("--K", type=float, default=None, help="Penalti oklusi K. Default: 10")
    group_gc.add_argument("--lambda1", type=float, default=9.0, help="Penalti smoothness warna mirip. Default: 9")
    group_gc.add_argument("--lambda2", type=float, default=3.0, help="Penalti smoothness warna berbeda. Default: 3")
    group_gc.add_argument("--theta", type=float, default=8.0, help="Ambang kemiripan intensitas. Default: 8")
    group_gc.add_argument("--dcutoff", type=int, default=5, help="Pemotongan selisih disparitas. Default: 5")
    group_gc.add_argument("--upscale", type=int, default=1, help="Faktor pembesaran gambar sebelum GC. Default: 1")
    group_gc.add_argument("--sweeps", type=int, default=4, help="Jumlah sweep label maksimum. Default: 4")
    group_gc.add_argument("--seed", type=int, default=0, help="Seed urutan label. Default: 0")
    group_gc.add_argument("--bt-literal", action="store_true", help="Gunakan orientasi min/max BT seperti rumus tercetak.")
    group_gc.add_argument("--energy-scale", type=int, default=16, help="Faktor kuantisasi energi ke integer. Default: 16")

    group_output = p_match.add_argument_group("Output & Formatting")
    group_output.add_argument("-o", "--output", default="disparity.pfm", help="File disparitas (.pfm atau .pgm). Default: disparity.pfm")
    group_output.add_argument("--disp-scale", type=float, default=1.0, help="Skala nilai PGM (d * skala). Default: 1")
    group_output.add_argument("--preview", type=Path, help="Simpan preview Jet (.ppm).")
    group_output.add_argument("--gt", type=Path, help="Ground truth untuk evaluasi langsung.")
    group_output.add_argument("--gt-scale", type=float, default=1.0, help="Skala ground truth PGM (Middlebury 2006: 3 untuk thirdsize). Default: 1")
    group_output.add_argument("--overwrite", action="store_true", help="Timpa file output jika sudah ada.")

    group_cache = p_match.add_argument_group("Caching")
    group_cache.add_argument("--cache-dir", type=Path, help="Direktori untuk menyimpan cache hasil.")
    group_cache.add_argument("--no-cache", action="store_true", help="Jangan gunakan cache untuk run ini.")
    _add_common_arguments(p_match)
    subparsers["match"] = p_match

    # --- synth ---
    p_synth = commands.add_parser("synth", help="Render set multiscopic sintetis + ground truth + mask oklusi.")
    group_scene = p_synth.add_argument_group("Scene")
    group_scene.add_argument("--scene", type=Path, help="File deskripsi scene. Default: scene bawaan dua layer.")
    group_scene.add_argument("--views", default="lrtb", help="Arah view surround (huruf l, r, t, b). Default: lrtb")
    group_scene.add_argument("--baseline-units", type=int, default=1, help="Kelipatan baseline. Default: 1")
    group_scene.add_argument("--seed", type=int, default=7, help="Seed tekstur scene bawaan. Default: 7")
    group_output = p_synth.add_argument_group("Output & Formatting")
    group_output.add_argument("-o", "--output-dir", type=Path, default=Path("synth"), help="Direktori output. Default: synth")
    group_output.add_argument("--overwrite", action="store_true", help="Timpa file output jika sudah ada.")
    _add_common_arguments(p_synth)
    subparsers["synth"] = p_synth

    # --- eval ---
    p_eval = commands.add_parser("eval", help="Hitung RMS, AvgErr, Bad0.5/1/2 terhadap ground truth.")
    group_input = p_eval.add_argument_group("Input")
    group_input.add_argument("--est", type=Path, help="Peta disparitas estimasi (.pfm/.pgm).")
    group_input.add_argument("--gt", type=Path, help="Ground truth (.pfm/.pgm; 0 = tidak diketahui).")
    group_input.add_argument("--scale", type=float, default=1.0, help="Skala ground truth PGM. Default: 1")
    group_input.add_argument("--est-scale", type=float, default=None, help="Skala estimasi PGM. Default: sama dengan --scale")
    group_input.add_argument("--baseline", type=Path, help="Estimasi baseline untuk persentase penurunan.")
    group_input.add_argument("-i", "--input", type=Path, help="Mode batch: tiap baris 'gt estimasi [baseline]'.")
    group_output = p_eval.add_argument_group("Output & Formatting")
    group_output.add_argument("-o", "--output", help="File laporan: .txt, .json, .csv, .html.")
    group_output.add_argument("--html-template", type=Path, help="Path ke file template Jinja2 kustom untuk laporan HTML.")
    group_output.add_argument("--overwrite", action="store_true", help="Timpa file output jika sudah ada.")
    _add_common_arguments(p_eval)
    subparsers["eval"] = p_eval

    # --- fuse-dump ---
    p_dump = commands.add_parser("fuse-dump", help="Ekspor cost volume hasil fusion (debug).")
    _add_input_arguments(p_dump)
    group_matching = p_dump.add_argument_group("Matching")
    group_matching.add_argument("--cost", choices=("sad", "bt"), default="sad", help="Jenis cost. Default: sad")
    _add_range_arguments(group_matching)
    group_matching.add_argument("--bt-literal", action="store_true", help="Gunakan orientasi min/max BT seperti rumus tercetak.")
    group_output = p_dump.add_argument_group("Output & Formatting")
    group_output.add_argument("-o", "--output", default="volume.msvol", help="File dump volume. Default: volume.msvol")
    group_output.add_argument("--overwrite", action="store_true", help="Timpa file output jika sudah ada.")
    _add_common_arguments(p_dump)
    subparsers["fuse-dump"] = p_dump

    return parser, subparsers


def apply_config(subparsers: Dict[str, argparse.ArgumentParser], values: Dict[str, str]) -> List[str]:
    """Menjadikan nilai file konfigurasi sebagai default argparse; mengembalikan kunci yang tidak dikenal."""
    used = set()
    for sub in subparsers.values():
        # kunci konfigurasi sudah di-lowercase; dest seperti "K" tetap dicocokkan
        actions = {action.dest.lower(): action for action in sub._actions}
        defaults = {}
        for key, raw in values.items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                continue
            # store_true: nargs == 0
            defaults[action.dest] = raw.strip().lower() in TRUE_WORDS if action.nargs == 0 else raw
            used.add(key)
        sub.set_defaults(**defaults)
    return sorted(set(values) - used)

def resolve_defaults(args: argparse.Namespace):
    """Urutan prioritas: flag eksplisit > file konfigurasi > preset > default bawaan."""
    preset = PRESETS.get(getattr(args, "preset", None) or "", {})
    for key, value in {**BASE_DEFAULTS, **preset}.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, preset.get(key, value))
    for key in ("block_size", "dmin", "dmax"):
        if hasattr(args, key) and isinstance(getattr(args, key), str):
            setattr(args, key, int(getattr(args, key)))
    if hasattr(args, "K") and isinstance(args.K, str):
        args.K = float(args.K)

def parse_arguments(argv: Sequence[str], method_names: Sequence[str]):
    """Parse argv dengan dukungan --config; mengembalikan (args, parser, subparsers, kunci tak dikenal)."""
    parser, subparsers = build_parser(method_names)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)

    unknown: List[str] = []
    if known.config:
        try:
            lines = known.config.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            parser.error(f"file konfigurasi '{known.config}' tidak bisa dibaca: {e}")
        values, others = parse_key_value_lines(lines)
        unknown = apply_config(subparsers, values) + [f"(baris) {line}" for line in others]

    args = parser.parse_args(argv)
    resolve_defaults(args)
    return args, parser, subparsers, unknown


# ===============================
# 🔌 Input & Eksekusi Metode
# ===============================

def display_available_plugins(plugins: Dict[str, Any]):
    """Menampilkan semua plugin metode yang tersedia."""
    safe_console_print("[bold green]🔌 Metode Matching yang Tersedia:[/bold green]")
    if not plugins:
        safe_console_print("[yellow]Tidak ada plugin yang ditemukan.[/yellow] Pastikan direktori 'plugins/methods' ada.")
        return
    table = Table(title="Daftar Plugin")
    table.add_column("Nama", style="cyan")
    table.add_column("Deskripsi", style="magenta")
    table.add_column("Tahap", style="yellow")
    for name, plugin in sorted(plugins.items()):
        table.add_row(name, plugin.description, ", ".join(plugin.stages))
    safe_console_print(table)

def display_parameters(method: str, params: Any):
    """Menampilkan parameter yang benar-benar dipakai."""
    if not RICH_AVAILABLE:
        safe_console_print(f"Parameter {method}: {asdict(params)}")
        return
    table = Table(title=f"Parameter [bold]{method}[/bold]", border_style="blue")
    table.add_column("Parameter", style="cyan")
    table.add_column("Nilai", justify="right")
    for key, value in asdict(params).items():
        table.add_row(key, str(value))
    safe_console_print(table)

def _find_view(directory: Path, stem: str) -> Optional[Path]:
    for suffix in (".pgm", ".ppm", ".pnm"):
        candidate = directory / f"{stem}{suffix}"
        if candidate.is_file():
            return candidate
    return None

def collect_views(args: argparse.Namespace, sub: argparse.ArgumentParser) -> Tuple[Path, Dict[ViewDirection, Path]]:
    """Menentukan gambar tengah + surround dari flag atau direktori Middlebury; error argumen -> exit 2."""
    explicit = {d: getattr(args, d.value) for d in ViewDirection if getattr(args, d.value)}
    if args.middlebury:
        if args.center or explicit:
            sub.error("--middlebury tidak bisa digabung dengan --center/--left/--right/--top/--bottom.")
        views = [_find_view(args.middlebury, f"view{i}") for i in range(3)]
        if not all(views):
            sub.error(f"direktori '{args.middlebury}' harus berisi view0, view1, view2 (.pgm/.ppm).")
        return views[1], {ViewDirection.LEFT: views[0], ViewDirection.RIGHT: views[2]}

    if not args.center:
        sub.error("--center wajib diisi (atau gunakan --middlebury).")
    if not explicit:
        sub.error("minimal satu gambar surround (--left/--right/--top/--bottom) diperlukan.")
    for path in [args.center, *explicit.values()]:
        if not is_valid_image_path(path, IMAGE_SUFFIXES):
            sub.error(f"file gambar '{path}' tidak ditemukan atau bukan PGM/PPM.")
    return args.center, explicit

def load_set(center: Path, views: Dict[ViewDirection, Path], baseline: float) -> MultiscopicSet:
    return MultiscopicSet(load_image(center), {d: load_image(p) for d, p in views.items()}, baseline=baseline)


def cmd_match(args: argparse.Namespace, sub: argparse.ArgumentParser, plugins: Dict[str, Any]) -> int:
    center_path, view_paths = collect_views(args, sub)
    if args.gt and not is_valid_image_path(args.gt, DISPARITY_SUFFIXES):
        sub.error(f"ground truth '{args.gt}' tidak ditemukan.")
    plugin = plugins.get(args.method)
    if plugin is None:
        raise PluginError(f"Metode '{args.method}' tidak tersedia. Gunakan --list-plugins.")

    mset = load_set(center_path, view_paths, args.baseline_mm)
    directions = ", ".join(d.value for d in mset.directions)
    safe_console_print(f"\n[bold blue]🚀 Matching[/bold blue] [yellow]{center_path.name}[/yellow] "
                       f"dengan {len(mset.directions)} view ({directions}), metode [bold]{plugin.name}[/bold]")
    if not rectify_check(mset, args.align_tolerance):
        logging.warning("[CAPTURE] Set tidak teralign sempurna; hasil matching bisa menurun.")

    params = plugin.build_params(args)
    display_parameters(plugin.name, params)

    output_path = check_output_path(args.output, args.overwrite)
    preview_path = check_output_path(args.preview, args.overwrite) if args.preview else None
    if output_path is None or (args.preview and preview_path is None):
        return 1

    cache, key = None, None
    if args.cache_dir and not args.no_cache:
        cache = DisparityCache(args.cache_dir)
        inputs = [("center", center_path), *((d.value, p) for d, p in view_paths.items())]
        key = cache_key(inputs, {"method": plugin.name, **asdict(params)}, VERSION)

    progress_manager = LiveProgressManager(CONSOLE, enabled=RICH_AVAILABLE and not args.silent and not args.no_live_ui)
    progress_manager.add_stages(plugin.stages)
    disparity: Optional[DisparityMap] = cache.load(key) if cache else None
    progress_manager.start()
    try:
        if disparity is not None:
            for stage in plugin.stages:
                progress_manager.update_status(stage, "CACHED")
        else:
            with ThreadPoolExecutor(max_workers=max(1, args.workers)) as executor:
                disparity = plugin.match(mset, params, executor=executor, progress=progress_manager.update_status)
            if cache:
                cache.store(key, disparity)
    except Exception as e:
        progress_manager.fail_running()
        handle_plugin_exception(plugin.name, e)
        raise
    finally:
        progress_manager.stop()

    save_disparity(disparity, output_path, scale=args.disp_scale)
    logging.info(f"[WRITER] Disparitas disimpan ke [cyan]{output_path}[/]")
    if preview_path:
        save_image(colorize(disparity, params.d_max), preview_path)
        logging.info(f"[WRITER] Preview Jet disimpan ke [cyan]{preview_path}[/]")

    valid = int(disparity.valid.sum())
    safe_console_print(f"[info]Piksel dengan disparitas valid: [green]{valid}[/green] / {disparity.valid.size}[/info]")
    if args.gt:
        report = evaluate(disparity, load_disparity(args.gt, args.gt_scale))
        safe_console_print(build_report_table([ReportEntry(output_path.name, report)]))
    return 0


def cmd_synth(args: argparse.Namespace, sub: argparse.ArgumentParser, plugins: Dict[str, Any]) -> int:
    if args.scene and not args.scene.is_file():
        sub.error(f"file scene '{args.scene}' tidak ditemukan.")
    scene = load_scene(args.scene) if args.scene else default_scene(args.seed)
    directions = ViewDirection.parse(args.views)
    rendered = render_multiscopic(scene, directions, args.baseline_units)

    targets = {"center": args.output_dir / "center.pgm"}
    targets.update({d.value: args.output_dir / f"{d.value}.pgm" for d in directions})
    targets["gt"] = args.output_dir / "gt.pfm"
    targets["occlusion"] = args.output_dir / "occlusion.pgm"
    checked = {name: check_output_path(path, args.overwrite) for name, path in targets.items()}
    if any(path is None for path in checked.values()):
        return 1

    views = rendered.views
    save_image(views.center, checked["center"])
    for direction, img in views.surround.items():
        save_image(img, checked[direction.value])
    # GT ditulis pada baseline yang dirender agar langsung cocok dengan hasil match
    gt = rendered.ground_truth
    save_disparity(DisparityMap(gt.values * args.baseline_units, gt.valid), checked["gt"])
    mask = (rendered.occlusion * 255).astype("uint8")
    save_image(ImageBuffer(mask), checked["occlusion"])

    safe_console_print(f"[info]Scene {scene.width}x{scene.height}, {len(scene.layers)} layer, "
                       f"{int(rendered.occlusion.sum())} piksel occluded di semua view.[/info]")
    safe_console_print(f"[bold green]✅ {len(checked)} file ditulis ke[/bold green] [cyan]{args.output_dir}[/]")
    return 0


def _read_eval_list(list_path: Path, sub: argparse.ArgumentParser) -> List[Tuple[Path, Path, Optional[Path]]]:
    if not list_path.is_file():
        sub.error(f"file input '{list_path}' tidak ditemukan.")
    rows = []
    for raw in list_path.read_text(encoding="utf-8").splitlines():
        line = strip_comment(raw)
        if not line:
            continue
        parts = [Path(p) if Path(p).is_absolute() else list_path.parent / p for p in line.split()]
        if len(parts) not in (2, 3):
            sub.error(f"baris input tidak valid (butuh 'gt estimasi [baseline]'): '{line}'")
        rows.append((parts[0], parts[1], parts[2] if len(parts) == 3 else None))
    if not rows:
        sub.error(f"file input '{list_path}' kosong.")
    return rows

def cmd_eval(args: argparse.Namespace, sub: argparse.ArgumentParser, plugins: Dict[str, Any]) -> int:
    if args.input:
        jobs = _read_eval_list(args.input, sub)
    else:
        if not args.est or not args.gt:
            sub.error("--est dan --gt wajib diisi (atau gunakan --input).")
        jobs = [(args.gt, args.est, args.baseline)]
    for gt_path, est_path, base_path in jobs:
        for path in (gt_path, est_path, base_path):
            if path is not None and not is_valid_image_path(path, DISPARITY_SUFFIXES):
                sub.error(f"file disparitas '{path}' tidak ditemukan atau bukan {'/'.join(sorted(DISPARITY_SUFFIXES))}.")

    est_scale = args.est_scale if args.est_scale is not None else args.scale
    entries: List[ReportEntry] = []
    for gt_path, est_path, base_path in jobs:
        gt = load_disparity(gt_path, args.scale)
        report = evaluate(load_disparity(est_path, est_scale), gt)
        baseline = evaluate(load_disparity(base_path, est_scale), gt) if base_path else None
        entries.append(ReportEntry(est_path.stem if args.input is None else f"{gt_path.parent.name}/{est_path.stem}", report, baseline))

    safe_console_print(build_report_table(entries) if RICH_AVAILABLE else generate_text_content(entries))
    if len(entries) == 1 and not args.silent:
        for line in entries[0].report.to_lines():
            safe_console_print(line, markup=False, highlight=False) if RICH_AVAILABLE else print(line)
    if args.output and not write_report(entries, args.output, args.overwrite, args.html_template):
        return 1
    return 0


def cmd_fuse_dump(args: argparse.Namespace, sub: argparse.ArgumentParser, plugins: Dict[str, Any]) -> int:
    center_path, view_paths = collect_views(args, sub)
    gray = load_set(center_path, view_paths, args.baseline_mm).grayscale()
    radius = block_size_to_radius(args.block_size) if args.cost == "sad" else 0
    volumes = [
        cost_volume(args.cost, gray.center, img, direction, args.dmin, args.dmax, radius=radius, literal=args.bt_literal)
        for direction, img in gray.surround.items()
    ]
    fused = fuse(volumes, args.fusion, args.heuristic_ratio)
    output_path = check_output_path(args.output, args.overwrite)
    if output_path is None:
        return 1
    dump_volume(fused, output_path)
    safe_console_print(f"[bold green]✅ Volume {fused.width}x{fused.height}, d=[{fused.d_min}, {fused.d_max}] "
                       f"disimpan ke[/bold green] [cyan]{output_path}[/]")
    return 0


COMMANDS = {
    "match": cmd_match,
    "synth": cmd_synth,
    "eval": cmd_eval,
    "fuse-dump": cmd_fuse_dump,
}


# ===============================
# 🚀 Main Execution
# ===============================

def _run(argv: Sequence[str]) -> int:
    plugins = load_plugins()
    args, parser, subparsers, unknown_keys = parse_arguments(argv, sorted(plugins))

    setup_logging(getattr(args, "silent", False), getattr(args, "debug", False), getattr(args, "log_file", None))
    for key in unknown_keys:
        logging.warning(f"[SYSTEM] Kunci konfigurasi diabaikan: {key}")

    if args.list_plugins:
        display_available_plugins(plugins)
        return 0
    if args.lint_plugins:
        return 1 if lint_plugins() else 0
    if not args.command:
        parser.print_help()
        return 2

    if not args.silent:
        print_banner()
    try:
        return COMMANDS[args.command](args, subparsers[args.command], plugins)
    except KeyboardInterrupt:
        safe_console_print("\n[bold red]Program dihentikan oleh pengguna.[/bold red]")
        return 1
    except Exception as e:
        handle_stage_failure(args.command, e)
        return 1

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; mengembalikan kode keluar (0 ok, 1 gagal runtime, 2 error penggunaan)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 2)


if __name__ == "__main__":
    if RICH_AVAILABLE is False:
        print("WARNING: Pustaka 'rich' tidak ditemukan. Tampilan UI akan terbatas.", file=sys.stderr)
    sys.exit(main())
