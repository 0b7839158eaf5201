# tests/test_capture.py
import math
import os
import sys

import numpy as np
import pytest

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.capture import (Layer, MultiscopicSet, SyntheticScene, Texture, ViewDirection, default_scene,
                          disparity_from_depth, load_scene, rectify_check, render_multiscopic)
from core.error_handler import ArgumentError
from core.imgio import DisparityMap, ImageBuffer

ALL_VIEWS = tuple(ViewDirection)


def single_layer_scene(disparity=2, width=64, height=48, seed=1):
    return SyntheticScene(width, height, (Layer("bg", disparity, Texture("noise", seed)),), d_min=0, d_max=32)

# === Test untuk ViewDirection dan MultiscopicSet ===

def test_view_direction_geometry():
    assert len(ViewDirection) == 4
    assert ViewDirection.RIGHT.offset == (-1, 0)
    assert ViewDirection.LEFT.offset == (1, 0)
    assert ViewDirection.TOP.offset == (0, 1)
    assert ViewDirection.BOTTOM.offset == (0, -1)
    assert ViewDirection.RIGHT.camera_offset == (1, 0)
    assert ViewDirection.TOP.camera_offset == (0, -1)
    assert ViewDirection.LEFT.is_horizontal and not ViewDirection.TOP.is_horizontal
    assert ViewDirection.TOP.opposite is ViewDirection.BOTTOM
    assert ViewDirection.parse("lrtb") == (ViewDirection.LEFT, ViewDirection.RIGHT, ViewDirection.TOP, ViewDirection.BOTTOM)
    with pytest.raises(ArgumentError):
        ViewDirection.parse("ll")
    with pytest.raises(ArgumentError):
        ViewDirection.parse("x")

def test_multiscopic_set_invariants():
    a = ImageBuffer(np.zeros((4, 5), dtype=np.uint8))
    b = ImageBuffer(np.zeros((4, 6), dtype=np.uint8))
    with pytest.raises(ArgumentError):
        MultiscopicSet(a, {})
    with pytest.raises(ArgumentError):
        MultiscopicSet(a, {ViewDirection.LEFT: b})
    with pytest.raises(ArgumentError):
        MultiscopicSet.from_views(a, [(ViewDirection.LEFT, a), (ViewDirection.LEFT, a)])

    mset = MultiscopicSet(a, {ViewDirection.BOTTOM: a, ViewDirection.RIGHT: a})
    assert mset.directions == (ViewDirection.RIGHT, ViewDirection.BOTTOM)
    assert mset.subset([ViewDirection.RIGHT]).directions == (ViewDirection.RIGHT,)
    with pytest.raises(ArgumentError):
        mset.subset([ViewDirection.TOP])

def test_depth_conversion():
    assert disparity_from_depth(1.0, 0.02, 1000.0) == pytest.approx(20.0)
    assert disparity_from_depth(math.inf, 0.02, 1000.0) == 0.0
    with pytest.raises(ArgumentError):
        disparity_from_depth(-1.0, 0.02, 1000.0)

    img = ImageBuffer(np.zeros((1, 2), dtype=np.uint8))
    mset = MultiscopicSet(img, {ViewDirection.LEFT: img}, baseline=2.0, focal_length=100.0)
    depth = mset.depth_map(DisparityMap(np.array([[4.0, 0.0]]), np.array([[True, False]])))
    assert depth[0, 0] == pytest.approx(50.0)
    assert math.isnan(depth[0, 1])

# === Test untuk scene sintetis ===

def test_scene_validation():
    bg = Layer("bg", 2, Texture("noise", 1))
    with pytest.raises(ArgumentError):
        SyntheticScene(32, 32, (bg, Layer("bg2", 1, Texture("flat", 9))))
    with pytest.raises(ArgumentError):
        SyntheticScene(32, 32, (bg, Layer("box", 2, Texture("flat", 9), (1, 1, 4, 4))))
    with pytest.raises(ArgumentError):
        SyntheticScene(32, 32, (bg,), d_min=3, d_max=10)
    with pytest.raises(ArgumentError):
        Texture.parse("gradient:3")
    scene = SyntheticScene(32, 32, (bg, Layer("box", 6, Texture("flat", 9), (1, 1, 4, 4))))
    assert [layer.name for layer in scene.layers] == ["box", "bg"]

def test_texture_is_seeded():
    tex = Texture.parse("noise:3")
    assert tex == Texture("noise", 3)
    assert np.array_equal(tex.generate(8, 8), Texture("noise", 3).generate(8, 8))
    assert not np.array_equal(tex.generate(8, 8), Texture("noise", 4).generate(8, 8))

def test_load_scene(tmp_path):
    path = tmp_path / "scene.txt"
    path.write_text(
        "width = 64\nheight = 48\nd_min = 0\nd_max = 16\n"
        "# layer depan\n"
        "layer box x=20 y=10 w=16 h=16 disparity=8 texture=noise:5\n"
        "layer bg disparity=2 texture=noise:4\n",
        encoding="utf-8",
    )
    scene = load_scene(path)
    assert (scene.width, scene.height) == (64, 48)
    assert [layer.name for layer in scene.layers] == ["box", "bg"]
    assert scene.layers[0].rect == (20, 10, 16, 16)

    path.write_text("width = 64\nheight = 48\nlayer bg disparity=2 warna=merah\n", encoding="utf-8")
    with pytest.raises(ArgumentError):
        load_scene(path)

def test_render_single_layer():
    rendered = render_multiscopic(single_layer_scene(2), [ViewDirection.LEFT, ViewDirection.RIGHT])
    assert rendered.ground_truth.valid.all()
    assert np.all(rendered.ground_truth.values == 2)
    assert not rendered.occlusion.any()
    assert rendered.views.directions == (ViewDirection.RIGHT, ViewDirection.LEFT)

def test_render_occlusion_band_right_view():
    rendered = render_multiscopic(default_scene(7), [ViewDirection.RIGHT])
    occ = rendered.occlusion
    # Persegi (48, 32, 32, 32), d = 10 di atas background d = 2: pita lebar 8 di kiri persegi
    assert occ[32:64, 40:48].all()
    assert occ.sum() == 8 * 32

def test_render_four_views_leaves_no_common_occlusion():
    rendered = render_multiscopic(default_scene(7), ALL_VIEWS)
    assert not rendered.occlusion.any()

def test_render_correspondence_sign_convention():
    rendered = render_multiscopic(default_scene(7), ALL_VIEWS, baseline_units=2)
    center = rendered.views.center.data
    gt = rendered.ground_truth.values.astype(int) * 2
    h, w = center.shape
    for direction in (ViewDirection.RIGHT, ViewDirection.LEFT):
        view = rendered.views.surround[direction].data
        single = render_multiscopic(default_scene(7), [direction], baseline_units=2).occlusion
        for y in range(h):
            for x in range(w):
                qx = x + direction.offset[0] * gt[y, x]
                if 0 <= qx < w and not single[y, x]:
                    assert view[y, qx] == center[y, x]

def test_render_rejects_oversized_shift():
    with pytest.raises(ArgumentError):
        render_multiscopic(single_layer_scene(30, width=64), [ViewDirection.RIGHT], baseline_units=3)

def test_render_is_deterministic():
    a = render_multiscopic(default_scene(7), ALL_VIEWS)
    b = render_multiscopic(default_scene(7), ALL_VIEWS)
    assert np.array_equal(a.views.center.data, b.views.center.data)
    for direction in ALL_VIEWS:
        assert np.array_equal(a.views.surround[direction].data, b.views.surround[direction].data)

# === Test untuk rectify_check ===

def test_rectify_check_synthetic_and_misaligned():
    rendered = render_multiscopic(single_layer_scene(2), ALL_VIEWS)
    assert rectify_check(rendered.views, 0.5)

    center = rendered.views.center
    moved = ImageBuffer(np.roll(center.data, 3, axis=0))
    broken = MultiscopicSet(center, {ViewDirection.RIGHT: moved})
    assert not rectify_check(broken, 1.0)
    assert rectify_check(broken, float(center.height))
