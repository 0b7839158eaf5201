# core/error_handler.py
import logging


class MultiscopicError(Exception):
    """Exception dasar untuk semua error pada toolkit multiscopic."""
    pass

class ArgumentError(MultiscopicError, ValueError):
    """Argumen/parameter di luar rentang yang diizinkan."""
    pass

class ImageFormatError(MultiscopicError):
    """Header atau isi file gambar tidak sesuai format PGM/PPM/PFM."""
    pass

class ImageIOError(MultiscopicError, OSError):
    """Kegagalan baca/tulis file (payload terpotong, path tidak bisa ditulis)."""
    pass

class PluginError(MultiscopicError):
    """Exception untuk plugin metode matching yang tidak valid."""
    pass

def handle_plugin_exception(plugin_name: str, exception: Exception):
    """
    Menangani dan mencatat error umum yang terjadi saat eksekusi plugin.
    """
    logging.error(f"[PLUGIN] Metode '{plugin_name}' gagal: {exception}", exc_info=False)

def handle_stage_failure(stage: str, exception: Exception):
    """
    Mencatat kegagalan satu tahap pipeline (cost, fusion, WTA, ...).
    Error dari toolkit dicatat singkat, error tak terduga dengan traceback.
    """
    if isinstance(exception, MultiscopicError):
        logging.error(f"[SYSTEM] Tahap '{stage}' gagal: {exception}")
    else:
        logging.error(f"[SYSTEM] Error tak terduga pada tahap '{stage}': {exception}", exc_info=True)
