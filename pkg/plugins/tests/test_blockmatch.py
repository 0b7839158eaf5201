# tests/test_blockmatch.py
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.blockmatch import BmParams, match_bm, subpixel_refine, wta
from core.capture import Layer, SyntheticScene, Texture, ViewDirection, default_scene, render_multiscopic
from core.cost import CostVolume
from core.error_handler import ArgumentError
from core.imgio import DisparityMap

ALL_VIEWS = tuple(ViewDirection)


def column(costs, valid=None, d_min=0):
    """Volume 1x1 dengan cost sepanjang sumbu d."""
    costs = np.asarray(costs, dtype=float).reshape(-1, 1, 1)
    valid = np.ones(costs.shape, dtype=bool) if valid is None else np.asarray(valid).reshape(-1, 1, 1)
    return CostVolume(costs, valid, d_min, d_min + costs.shape[0] - 1)

def single_layer(disparity, size=128, seed=5):
    return SyntheticScene(size, size, (Layer("bg", disparity, Texture("noise", seed)),), d_min=0, d_max=32)

# === Test untuk WTA dan subpiksel ===

def test_wta_examples():
    assert wta(column([5, 1, 4])).values[0, 0] == 1
    assert wta(column([2, 2, 7])).values[0, 0] == 0
    assert not wta(column([1, 1, 1], valid=[False] * 3)).valid[0, 0]
    assert wta(column([9, 3, 1], valid=[True, True, False], d_min=4)).values[0, 0] == 5

def test_subpixel_examples():
    vol = column([4, 1, 2])
    assert subpixel_refine(vol, wta(vol)).values[0, 0] == pytest.approx(1.25)
    vol = column([3, 1, 3])
    assert subpixel_refine(vol, wta(vol)).values[0, 0] == 1.0
    vol = column([1, 5, 6])
    assert subpixel_refine(vol, wta(vol)).values[0, 0] == 0.0
    vol = column([4, 1, 2], valid=[False, True, True])
    assert subpixel_refine(vol, wta(vol)).values[0, 0] == 1.0

def test_subpixel_keeps_plateau_and_shape_check():
    vol = column([5, 1, 1, 5])
    assert subpixel_refine(vol, wta(vol)).values[0, 0] == 1.0
    with pytest.raises(ArgumentError):
        subpixel_refine(vol, DisparityMap.from_array(np.zeros((2, 2))))

def test_bm_params():
    assert BmParams.from_block_size(11).radius == 5
    assert BmParams.from_block_size(17, d_max=70).d_max == 70
    with pytest.raises(ArgumentError):
        BmParams.from_block_size(10)
    with pytest.raises(ArgumentError):
        BmParams(fusion="median")

# === Test untuk match_bm ===

@pytest.mark.parametrize("disparity", [2, 10, 25])
def test_match_bm_recovers_single_layer(disparity):
    rendered = render_multiscopic(single_layer(disparity), ALL_VIEWS)
    params = BmParams(radius=5, d_min=1, d_max=30, subpixel=False)
    result = match_bm(rendered.views, params)
    m = params.radius + disparity
    interior = result.values[m:-m, m:-m]
    assert result.valid[m:-m, m:-m].all()
    assert np.all(interior == disparity)

@pytest.mark.parametrize("fusion", ["mean", "min", "heuristic"])
def test_match_bm_any_fusion_single_layer(fusion):
    rendered = render_multiscopic(single_layer(4, size=64), ALL_VIEWS)
    result = match_bm(rendered.views, BmParams(radius=3, d_min=1, d_max=8, fusion=fusion, subpixel=False))
    assert np.all(result.values[7:-7, 7:-7] == 4)

def test_multiscopic_reduces_errors_in_occlusion_band():
    scene = default_scene(7)
    gt = render_multiscopic(scene, [ViewDirection.RIGHT])
    band = gt.occlusion
    params = BmParams(radius=5, d_min=0, d_max=16, fusion="min", subpixel=False)
    stereo = match_bm(gt.views, params)
    multi = match_bm(render_multiscopic(scene, ALL_VIEWS).views, params)

    margin = params.radius + params.d_max
    interior = np.zeros(band.shape, dtype=bool)
    interior[margin:-margin, margin:-margin] = True
    truth = gt.ground_truth.values

    def bad1(result, mask):
        err = np.abs(result.values - truth)
        return float(np.mean((err > 1) | ~result.valid, where=mask))

    assert band[interior].any()
    assert bad1(multi, interior) < bad1(stereo, interior)
    assert bad1(multi, band & interior) <= 0.5 * bad1(stereo, band & interior)

def test_match_bm_fractional_disparity_subpixel():
    rendered = render_multiscopic(single_layer(10.5), ALL_VIEWS)
    result = match_bm(rendered.views, BmParams(radius=5, d_min=1, d_max=20))
    m = 5 + 11
    err = np.abs(result.values[m:-m, m:-m] - 10.5)
    assert float(err.mean()) < 0.25

def test_match_bm_executor_and_progress():
    rendered = render_multiscopic(single_layer(3, size=48), ALL_VIEWS)
    params = BmParams(radius=2, d_min=1, d_max=6)
    events = []
    with ThreadPoolExecutor(max_workers=2) as executor:
        parallel = match_bm(rendered.views, params, executor=executor, progress=lambda s, st: events.append((s, st)))
    serial = match_bm(rendered.views, params)
    assert np.array_equal(parallel.values, serial.values)
    assert events == [("cost", "RUNNING"), ("cost", "COMPLETED"), ("fusion", "RUNNING"),
                      ("fusion", "COMPLETED"), ("wta", "RUNNING"), ("wta", "COMPLETED")]
