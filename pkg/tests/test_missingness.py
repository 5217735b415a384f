import numpy as np
import pytest

from vista.missingness import (
    MissingnessSpec,
    apply,
    default_bbox,
    generate,
    holdout,
    perimeter_path,
)
from vista.video import MaskedVideo

from conftest import random_video


def test_spec_validation():
    with pytest.raises(ValueError):
        MissingnessSpec(pattern="diagonal")
    with pytest.raises(ValueError):
        MissingnessSpec(pattern="random", fraction=1.0)
    with pytest.raises(ValueError):
        MissingnessSpec(pattern="random-patch", patch_size=0)


def test_random_drop_count_within_binomial_interval():
    # 100x100 frame at fraction 0.5: 99.9% binomial interval is 5000 +- 164.5.
    spec = MissingnessSpec(pattern="random", fraction=0.5, rng_seed=0)
    dropped, centers = generate(spec, (100, 100, 1))
    assert centers is None
    count = int(dropped.sum())
    assert 4835 <= count <= 5165


def test_random_fraction_within_three_sigma():
    for seed in range(5):
        for fraction in (0.3, 0.5, 0.7):
            spec = MissingnessSpec(pattern="random", fraction=fraction, rng_seed=seed)
            dropped, _ = generate(spec, (60, 80, 3))
            total = dropped.size
            sigma = np.sqrt(total * fraction * (1 - fraction))
            assert abs(dropped.sum() - fraction * total) <= 3 * sigma


def test_temporal_mask_is_cyclic_shift_of_first_frame():
    spec = MissingnessSpec(pattern="temporal", fraction=0.4, rng_seed=7)
    dropped, _ = generate(spec, (30, 50, 6))
    for t in range(6):
        np.testing.assert_array_equal(dropped[t], np.roll(dropped[0], 6 * t, axis=1))


def test_default_bbox_on_reference_grid():
    # 181x361 grid: rows at +-45 degrees, columns at 7 and 21 local time.
    assert default_bbox(181, 361) == (45, 135, 105, 315)


def test_perimeter_path_covers_box_edge_exactly_once():
    bbox = (2, 5, 3, 7)
    path = perimeter_path(bbox)
    assert len(path) == 2 * (4 + 5) - 4
    assert len({tuple(p) for p in path}) == len(path)
    for i, j in path:
        assert (i in (2, 5) and 3 <= j <= 7) or (j in (3, 7) and 2 <= i <= 5)
    # consecutive cells are perimeter neighbors, and the path closes
    closed = np.vstack([path, path[:1]])
    steps = np.abs(np.diff(closed, axis=0)).sum(axis=1)
    assert np.all(steps == 1)


def test_patch_centers_lie_on_bbox_perimeter():
    spec = MissingnessSpec(pattern="random-patch", patch_size=9, rng_seed=5)
    dims = (60, 90, 8)
    dropped, centers = generate(spec, dims)
    path = {tuple(p) for p in perimeter_path(default_bbox(60, 90))}
    for t in range(8):
        assert tuple(centers[t]) in path
        assert dropped[t].sum() <= 81


def test_temporal_patch_advances_six_cells_along_perimeter():
    spec = MissingnessSpec(pattern="temporal-patch", patch_size=9, rng_seed=5)
    dropped, centers = generate(spec, (60, 90, 10))
    path = perimeter_path(default_bbox(60, 90))
    index = {tuple(p): k for k, p in enumerate(path)}
    positions = [index[tuple(c)] for c in centers]
    for a, b in zip(positions, positions[1:]):
        assert (b - a) % len(path) == 6


def test_temporal_patch_adjacent_overlap_geometry():
    # A size-63 patch moving 6 perimeter cells leaves at least (63-6)*63
    # cells shared between adjacent frames when fully inside the frame.
    spec = MissingnessSpec(pattern="temporal-patch", patch_size=63, rng_seed=11)
    dropped, centers = generate(spec, (181, 361, 8))
    for t in range(7):
        overlap = int((dropped[t] & dropped[t + 1]).sum())
        assert overlap >= (63 - 6) * 63
        assert int(dropped[t].sum()) == 63 * 63


def test_patch_crops_at_rows_and_wraps_columns():
    spec = MissingnessSpec(pattern="random-patch", patch_size=21,
                           bbox=(0, 0, 58, 58), rng_seed=1)
    dropped, centers = generate(spec, (40, 60, 1))
    assert tuple(centers[0]) == (0, 58)
    # rows 0..10 present (top rows cropped), columns wrap past the seam
    assert dropped[0, :11, 58].all()
    assert not dropped[0, 11:, 58].any()
    assert dropped[0, 0, (58 + 10) % 60]
    assert dropped[0, 0, 58 - 10]


def test_patch_larger_than_frame_rejected():
    spec = MissingnessSpec(pattern="random-patch", patch_size=61, rng_seed=0)
    with pytest.raises(ValueError):
        generate(spec, (40, 60, 1))


def test_generate_bit_exact_reproducibility():
    for pattern in ("random", "temporal", "random-patch", "temporal-patch"):
        spec = MissingnessSpec(pattern=pattern, fraction=0.4, patch_size=15, rng_seed=9)
        a, ca = generate(spec, (50, 70, 5))
        b, cb = generate(spec, (50, 70, 5))
        np.testing.assert_array_equal(a, b)
        if ca is not None:
            np.testing.assert_array_equal(ca, cb)


def test_apply_returns_masked_video_and_exact_drop_set(rng):
    frames = 1.0 + np.abs(rng.normal(size=(3, 30, 40)))
    spec = MissingnessSpec(pattern="random", fraction=0.3, rng_seed=2)
    video, dropped = apply(frames, spec)
    np.testing.assert_array_equal(video.masks, ~dropped)
    np.testing.assert_array_equal(video.frames[video.masks], frames[~dropped])
    with pytest.raises(ValueError):
        apply(np.full((1, 4, 4), np.nan), spec)


def test_holdout_partitions_observed_set(rng):
    video = random_video(rng, 25, 40, 3, missing=0.5)
    train, test = holdout(video, 0.2, seed=4)
    for t in range(3):
        observed = video.masks[t]
        expected = int(np.floor(0.2 * observed.sum() + 0.5))
        assert test[t].sum() == expected
        assert not (train.masks[t] & test[t]).any()
        np.testing.assert_array_equal(train.masks[t] | test[t], observed)
        assert not (test[t] & ~observed).any()


def test_holdout_exact_count_round_to_nearest():
    frames = np.ones((1, 20, 50))
    video = MaskedVideo.fully_observed(frames)
    _, test = holdout(video, 0.2, seed=0)
    assert test.sum() == 200


def test_holdout_deterministic(rng):
    video = random_video(rng, 15, 15, 2)
    _, test_a = holdout(video, 0.25, seed=8)
    _, test_b = holdout(video, 0.25, seed=8)
    np.testing.assert_array_equal(test_a, test_b)


def test_holdout_rejects_tiny_frames():
    frames = np.ones((1, 2, 2))
    masks = np.zeros((1, 2, 2), bool)
    masks[0, 0, 0] = True
    video = MaskedVideo(frames, masks)
    with pytest.raises(ValueError, match="at least 5"):
        holdout(video, 0.5, seed=0)
