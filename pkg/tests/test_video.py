import numpy as np
import pytest

from vista.video import (
    AuxiliaryVideo,
    FactorSequence,
    MaskedVideo,
    PenaltyConfig,
    fill_in,
    project_complement,
    project_observed,
)

from conftest import random_video


def test_project_observed_full_mask_is_identity():
    frame = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(project_observed(frame, np.ones((2, 2), bool)), frame)


def test_project_observed_empty_mask_is_zero():
    frame = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(project_observed(frame, np.zeros((2, 2), bool)),
                                  np.zeros((2, 2)))


def test_projections_definitional_values():
    frame = np.array([[1.0, 2.0], [3.0, 4.0]])
    mask = np.array([[True, False], [False, True]])
    np.testing.assert_array_equal(project_observed(frame, mask), [[1.0, 0.0], [0.0, 4.0]])
    np.testing.assert_array_equal(project_complement(frame, mask), [[0.0, 2.0], [3.0, 0.0]])


def test_project_complement_full_mask_is_zero():
    frame = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(project_complement(frame, np.ones((2, 2), bool)),
                                  np.zeros((2, 2)))


def test_projection_partition_idempotence_orthogonality(rng):
    for _ in range(20):
        frame = rng.normal(size=(5, 7))
        mask = rng.random((5, 7)) > rng.random()
        observed = project_observed(frame, mask)
        complement = project_complement(frame, mask)
        np.testing.assert_array_equal(observed + complement, frame)
        np.testing.assert_array_equal(project_observed(observed, mask), observed)
        np.testing.assert_array_equal(observed * complement, np.zeros_like(frame))


def test_projection_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        project_observed(np.zeros((2, 3)), np.ones((3, 2), bool))


def test_fill_in_full_mask_returns_frame(rng):
    frame = rng.normal(size=(4, 3))
    left = rng.normal(size=(4, 2))
    right = rng.normal(size=(3, 2))
    np.testing.assert_array_equal(fill_in(frame, np.ones((4, 3), bool), left, right), frame)


def test_fill_in_zero_factors_is_observed_projection(rng):
    frame = rng.normal(size=(4, 3))
    mask = rng.random((4, 3)) > 0.5
    out = fill_in(frame, mask, np.zeros((4, 2)), np.zeros((3, 2)))
    np.testing.assert_array_equal(out, project_observed(frame, mask))


def test_fill_in_definitional():
    frame = np.array([[1.0, 0.0], [0.0, 4.0]])
    mask = np.array([[True, False], [False, True]])
    left = np.array([[3.0], [3.0]])
    right = np.array([[3.0], [3.0]])
    np.testing.assert_array_equal(fill_in(frame, mask, left, right),
                                  [[1.0, 9.0], [9.0, 4.0]])


def test_masked_video_zeroes_unobserved_and_is_readonly():
    frames = np.array([[[1.0, -5.0], [2.0, 3.0]]])
    masks = np.array([[[True, False], [True, True]]])
    video = MaskedVideo(frames, masks)
    assert video.frames[0, 0, 1] == 0.0
    assert video.dims == (2, 2, 1)
    with pytest.raises(ValueError):
        video.frames[0, 0, 0] = 9.0


def test_masked_video_rejects_all_missing_frame():
    frames = np.zeros((2, 2, 2))
    masks = np.ones((2, 2, 2), bool)
    masks[1] = False
    with pytest.raises(ValueError, match="frame 1"):
        MaskedVideo(frames, masks)


def test_masked_video_rejects_nonfinite_observed():
    frames = np.array([[[np.inf, 1.0], [0.0, 0.0]]])
    with pytest.raises(ValueError):
        MaskedVideo(frames, np.ones((1, 2, 2), bool))


def test_masked_video_from_dense_nan_is_missing():
    dense = np.array([[[1.0, np.nan], [np.nan, 4.0]]])
    video = MaskedVideo.from_dense(dense)
    np.testing.assert_array_equal(video.masks, [[[True, False], [False, True]]])
    np.testing.assert_array_equal(video.frames, [[[1.0, 0.0], [0.0, 4.0]]])
    back = video.to_dense()
    assert np.isnan(back[0, 0, 1]) and back[0, 1, 1] == 4.0


def test_auxiliary_video_must_be_finite_and_match():
    with pytest.raises(ValueError):
        AuxiliaryVideo(np.array([[[np.nan]]]))
    aux = AuxiliaryVideo(np.zeros((2, 3, 4)))
    video = MaskedVideo.fully_observed(np.zeros((2, 3, 4)) + 1.0)
    aux.check_matches(video)
    with pytest.raises(ValueError):
        aux.check_matches(MaskedVideo.fully_observed(np.ones((2, 4, 3))))


def test_factor_sequence_validation(rng):
    factors = FactorSequence(rng.normal(size=(3, 4, 2)), rng.normal(size=(3, 5, 2)))
    assert factors.rank == 2
    assert factors.dims == (4, 5, 3)
    np.testing.assert_allclose(factors.products()[1], factors.product(1))
    with pytest.raises(ValueError):
        FactorSequence(rng.normal(size=(3, 4, 2)), rng.normal(size=(3, 5, 3)))
    with pytest.raises(ValueError):
        FactorSequence(rng.normal(size=(3, 4, 2)), rng.normal(size=(2, 5, 2)))


def test_penalty_config_validation():
    cfg = PenaltyConfig(lambda1=0.9)
    assert cfg.lambda2 == 0.0 and cfg.rank == 10
    with pytest.raises(ValueError):
        PenaltyConfig(lambda1=-0.1)
    with pytest.raises(ValueError):
        PenaltyConfig(lambda1=1.0, rank=0)
    with pytest.raises(ValueError):
        PenaltyConfig(lambda1=1.0, tol=0.0)
    PenaltyConfig(lambda1=0.0)  # allowed for evaluating objectives; solver rejects it


def test_random_video_helper_respects_invariants(rng):
    video = random_video(rng, 6, 7, 3)
    assert video.masks.reshape(3, -1).sum(axis=1).min() >= 1
