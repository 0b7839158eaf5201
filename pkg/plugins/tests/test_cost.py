# tests/test_cost.py
import os
import sys

import numpy as np
import pytest

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.capture import ViewDirection
from core.cost import (CostVolume, box_sum, bt_interval, bt_volume, cost_volume, dump_volume,
                       load_volume, sad_volume, shift_image)
from core.error_handler import ArgumentError, ImageFormatError
from core.imgio import ImageBuffer


def gray(array):
    return ImageBuffer(np.asarray(array, dtype=np.uint8))

def noise(h, w, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=(h, w)).astype(np.uint8)

# === Test untuk primitif ===

def test_shift_image_and_box_sum():
    shifted, inside = shift_image(np.array([[1.0, 2.0, 3.0, 4.0]]), 1, 0, fill=-1)
    assert shifted.tolist() == [[2.0, 3.0, 4.0, -1.0]]
    assert inside.tolist() == [[True, True, True, False]]

    sums = box_sum(np.ones((4, 5)), 1)
    assert sums[1:3, 1:4].tolist() == [[9.0] * 3, [9.0] * 3]
    assert sums[0].sum() == 0 and sums[:, 0].sum() == 0

def test_cost_volume_invariants():
    with pytest.raises(ArgumentError):
        CostVolume(np.zeros((2, 1, 1)), np.ones((2, 1, 1), dtype=bool), 0, 2)
    with pytest.raises(ArgumentError):
        CostVolume(-np.ones((1, 1, 1)), np.ones((1, 1, 1), dtype=bool), 0, 0)
    vol = CostVolume(np.full((1, 1, 2), 5.0), np.array([[[True, False]]]), 3, 3)
    assert vol.cost.tolist() == [[[5.0, 0.0]]]
    assert vol.at(3).tolist() == [[5.0, 0.0]]
    assert np.isinf(vol.with_inf()[0, 0, 1])

# === Test untuk SAD ===

def test_sad_identity_is_zero():
    img = gray(noise(12, 14))
    vol = sad_volume(img, img, ViewDirection.RIGHT, 1, 0, 3)
    assert np.all(vol.at(0)[vol.valid[0]] == 0)
    assert vol.valid[0].sum() == 10 * 12

def test_sad_constructed_shift_right_view():
    ref = noise(16, 24, seed=1)
    other = np.zeros_like(ref)
    # Konten view kanan muncul di x - d
    other[:, :-5] = ref[:, 5:]
    vol = sad_volume(gray(ref), gray(other), ViewDirection.RIGHT, 2, 0, 8)
    assert vol.valid[5].any()
    assert np.all(vol.at(5)[vol.valid[5]] == 0)
    assert np.all(vol.at(4)[vol.valid[4]] > 0)

def test_sad_constructed_shift_vertical_views():
    ref = noise(20, 12, seed=2)
    top = np.zeros_like(ref)
    top[3:, :] = ref[:-3, :]
    vol = sad_volume(gray(ref), gray(top), ViewDirection.TOP, 1, 0, 5)
    assert np.all(vol.at(3)[vol.valid[3]] == 0)
    bottom = np.zeros_like(ref)
    bottom[:-3, :] = ref[3:, :]
    vol = sad_volume(gray(ref), gray(bottom), ViewDirection.BOTTOM, 1, 0, 5)
    assert np.all(vol.at(3)[vol.valid[3]] == 0)

def test_sad_hand_filled_block():
    ref = gray(np.arange(1, 10).reshape(3, 3))
    other = gray(np.arange(2, 11).reshape(3, 3))
    vol = sad_volume(ref, other, ViewDirection.LEFT, 1, 0, 0)
    assert vol.valid[0].tolist() == [[False] * 3, [False, True, False], [False] * 3]
    assert vol.at(0)[1, 1] == 9

def test_sad_errors():
    with pytest.raises(ArgumentError):
        sad_volume(gray(noise(4, 4)), gray(noise(4, 5)), ViewDirection.LEFT, 1, 0, 2)
    with pytest.raises(ArgumentError):
        sad_volume(gray(noise(4, 4)), gray(noise(4, 4)), ViewDirection.LEFT, 3, 0, 2)
    with pytest.raises(ArgumentError):
        sad_volume(gray(noise(4, 4)), gray(noise(4, 4)), ViewDirection.LEFT, 1, 3, 2)

# === Test untuk BT ===

def test_bt_constant_images():
    img = gray(np.full((5, 6), 77))
    vol = bt_volume(img, img, ViewDirection.RIGHT, 0, 3)
    assert np.all(vol.cost == 0)

def test_bt_interval_examples():
    other = np.array([[10, 10, 10], [6, 10, 14], [10, 10, 10]])
    low, high = bt_interval(other.astype(float))
    assert (low[1, 1], high[1, 1]) == (8.0, 12.0)

    inside = bt_volume(gray(np.full((3, 3), 10)), gray(other), ViewDirection.LEFT, 0, 0)
    outside = bt_volume(gray(np.full((3, 3), 15)), gray(other), ViewDirection.LEFT, 0, 0)
    assert inside.at(0)[1, 1] == 0
    assert outside.at(0)[1, 1] == 3

    literal = bt_volume(gray(np.full((3, 3), 10)), gray(other), ViewDirection.LEFT, 0, 0, literal=True)
    assert literal.at(0)[1, 1] == 2

def test_bt_marks_out_of_bounds():
    img = gray(noise(4, 6))
    vol = bt_volume(img, img, ViewDirection.RIGHT, 0, 2)
    assert vol.valid[2][:, :2].sum() == 0
    assert vol.valid[2][:, 2:].all()

def test_cost_volume_dispatch():
    img = gray(noise(6, 6))
    assert cost_volume("bt", img, img, ViewDirection.TOP, 0, 1).d_max == 1
    with pytest.raises(ArgumentError):
        cost_volume("ncc", img, img, ViewDirection.TOP, 0, 1)

# === Test untuk dump volume ===

def test_dump_volume_format(tmp_path):
    img = gray(noise(5, 7, seed=4))
    vol = sad_volume(img, img, ViewDirection.LEFT, 1, 1, 3)
    path = tmp_path / "vol.msvol"
    dump_volume(vol, path)
    raw = path.read_bytes()
    assert raw.startswith(b"MSVOL\n7 5 1 3\n")
    assert len(raw) == len(b"MSVOL\n7 5 1 3\n") + 3 * 5 * 7 * 4
    loaded = load_volume(path)
    assert np.array_equal(loaded.valid, vol.valid)
    assert np.allclose(loaded.cost, vol.cost)

    bad = tmp_path / "bad.msvol"
    bad.write_bytes(b"XXVOL\n1 1 0 0\n")
    with pytest.raises(ImageFormatError):
        load_volume(bad)
