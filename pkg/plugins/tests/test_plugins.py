# tests/test_plugins.py
import argparse
import os
import sys

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.blockmatch import BmParams
from core.graphcut import GcParams
from core.plugin_loader import REQUIRED_ATTRIBUTES, lint_plugins, load_plugins


def namespace(**overrides):
    values = dict(
        block_size=17, dmin=2, dmax=30, fusion="min", heuristic_ratio=3.0, no_subpixel=True,
        K=25.0, lambda1=9.0, lambda2=3.0, theta=8.0, dcutoff=5, upscale=1, sweeps=2, seed=1,
        bt_literal=False, energy_scale=16,
    )
    values.update(overrides)
    return argparse.Namespace(**values)

# === Test untuk plugin_loader ===

def test_load_plugins_finds_both_methods():
    plugins = load_plugins()
    assert set(plugins) == {"bm", "gc"}
    for plugin in plugins.values():
        for attr, must_call in REQUIRED_ATTRIBUTES:
            assert hasattr(plugin, attr)
            assert not must_call or callable(getattr(plugin, attr))

def test_load_plugins_use_only():
    assert set(load_plugins(use_only=["gc"])) == {"gc"}

def test_lint_reports_no_errors():
    assert lint_plugins() == 0

def test_missing_plugin_directory():
    assert load_plugins(plugin_type="tidak_ada") == {}

# === Test untuk build_params ===

def test_bm_build_params():
    params = load_plugins()["bm"].build_params(namespace())
    assert isinstance(params, BmParams)
    assert (params.radius, params.d_min, params.d_max) == (8, 2, 30)
    assert params.fusion == "min"
    assert params.subpixel is False

def test_gc_build_params():
    params = load_plugins()["gc"].build_params(namespace())
    assert isinstance(params, GcParams)
    assert (params.K, params.d_min, params.d_max, params.max_sweeps, params.seed) == (25.0, 2, 30, 2, 1)
