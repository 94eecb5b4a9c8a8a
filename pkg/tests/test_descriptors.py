import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdset.descriptors import (
    ImageSet,
    PipelineConfig,
    build_covds_s,
    combine,
    covds_kernel_view,
    extract_subsets,
    finalize_representation,
    gaussian_embed,
    local_grams,
    traditional_covds,
    window_count,
)
from spdset.exceptions import DegenerateRepresentation, DegenerateSet, InvalidInput
from spdset.kernels import KernelSpec, gram
from spdset.spd import check_spd, mean_centralize, spd_log


def embed_reference(F, beta, lambda_frac):
    # straight from the definition, one window at a time
    mu = F.mean(axis=1)
    S = np.cov(F)  # unbiased
    S = np.atleast_2d(S) + lambda_frac * np.trace(np.atleast_2d(S)) * np.eye(len(mu))
    top = np.hstack([S + beta ** 2 * np.outer(mu, mu), beta * mu[:, None]])
    bottom = np.append(beta * mu, 1.0)
    return np.vstack([top, bottom])


def test_traditional_covds_examples():
    # two 1x2 frames vectorizing to (1, 0) and (-1, 0)
    frames = np.array([[[1.0, 0.0]], [[-1.0, 0.0]]])
    np.testing.assert_allclose(traditional_covds(frames, 0.0), [[2, 0], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(traditional_covds(frames, 1e-3), [[2.002, 0], [0, 0.002]],
                               atol=1e-15)


def test_traditional_covds_matches_numpy_cov(make_frames):
    f = make_frames(10, 5, 5)
    C = traditional_covds(f, 1e-3)
    ref = np.cov(f.reshape(10, -1).T)
    ref = ref + 1e-3 * np.trace(ref) * np.eye(25)
    np.testing.assert_allclose(C, ref, atol=1e-13)


def test_traditional_covds_degenerate():
    with pytest.raises(DegenerateSet):
        traditional_covds(np.full((4, 3, 3), 0.5))


def test_kernel_view_equivalence(rng):
    for _ in range(20):
        n = int(rng.integers(2, 21))
        h, w = rng.integers(1, 7, 2)
        f = rng.uniform(0, 1, (n, h, w))
        assert np.abs(traditional_covds(f, 0.0) - covds_kernel_view(f)).max() < 1e-12


def test_window_count_examples(make_frames):
    f = make_frames(3)
    assert len(extract_subsets(f, 6, 2)) == 100
    assert len(extract_subsets(f, 6, 3)) == 49
    (full,) = extract_subsets(f, 24, 1)
    np.testing.assert_array_equal(full.features, f.reshape(3, -1).T)
    with pytest.raises(InvalidInput):
        extract_subsets(f, 25, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.integers(1, 5))
def test_window_count_matches_enumeration(h, w, win, stride):
    if win > min(h, w):
        return
    origins = [(i, j) for i in range(0, h - win + 1, stride)
               for j in range(0, w - win + 1, stride)]
    assert window_count(h, w, win, stride) == len(origins)
    frames = np.arange(2 * h * w, dtype=float).reshape(2, h, w) / (2 * h * w)
    subs = extract_subsets(frames, win, stride)
    assert [s.window_origin for s in subs] == origins
    for s in subs:
        i, j = s.window_origin
        np.testing.assert_array_equal(s.features,
                                      frames[:, i:i + win, j:j + win].reshape(2, -1).T)


def test_gaussian_embed_examples(rng):
    a = np.sqrt(1.5)
    F = np.array([[a, -a, 0, 0], [0, 0, a, -a]])
    np.testing.assert_allclose(gaussian_embed(F, 3.7, 0.0), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(gaussian_embed(np.array([[1.0, 2.0, 3.0]]), 1.0, 0.0),
                               [[5, 2], [2, 1]], atol=1e-15)
    G = gaussian_embed(rng.uniform(0, 1, (36, 8)), 0.9)
    assert np.linalg.eigvalsh(G)[0] > 0


def test_gaussian_embed_matches_reference(rng):
    F = rng.uniform(0, 1, (5, 9, 7))
    G = gaussian_embed(F, 0.9, 1e-3)
    for g, f in zip(G, F):
        np.testing.assert_allclose(g, embed_reference(f, 0.9, 1e-3), atol=1e-14)


def test_gaussian_embed_constant_window():
    F = np.full((4, 6), 0.3)
    with pytest.raises(DegenerateSet):
        gaussian_embed(F, 0.9, 1e-3)
    G = gaussian_embed(F, 0.9, 1e-3, min_reg=1e-6)
    assert np.linalg.eigvalsh(G)[0] > 0


def test_local_grams_against_reference_pipeline(make_frames):
    f = make_frames(6, 12, 12)
    cfg = PipelineConfig(win=4, stride=4)
    L = local_grams(f, cfg)
    subs = extract_subsets(f, 4, 4)
    emb = [mean_centralize(gaussian_embed(s.features, 0.9, 1e-3, 1e-6)) for s in subs]
    for r in range(4):
        np.testing.assert_allclose(L[r], gram(emb, KernelSpec("loge-arc", r)),
                                   rtol=1e-8, atol=1e-10)


def test_build_covds_s_shape_and_psd(make_frames):
    f = make_frames(8)
    rep = build_covds_s(f, PipelineConfig(), weights=[1, 1, 0, 0])
    assert rep.matrix.shape == (100, 100)
    w = np.linalg.eigvalsh(rep.matrix)
    assert w[0] >= -1e-8 * w[-1]
    assert rep.locals is None


def test_build_covds_s_single_order(make_frames):
    f = make_frames(5)
    cfg = PipelineConfig(keep_locals=True)
    rep = build_covds_s(f, cfg, weights=[0, 0, 1, 0])
    np.testing.assert_array_equal(rep.matrix, rep.locals[2])
    with pytest.raises(InvalidInput):
        build_covds_s(f, cfg, weights=[1, 1])


def test_combine_fixed_order(rng):
    L = rng.standard_normal((4, 3, 3))
    np.testing.assert_allclose(combine(L, [1, 0, 2, 0]), L[0] + 2 * L[2], atol=1e-15)


def test_frame_order_invariance(rng, make_frames):
    f = make_frames(7)
    cfg = PipelineConfig()
    a = build_covds_s(f, cfg).matrix
    b = build_covds_s(f[rng.permutation(7)], cfg).matrix
    assert np.abs(a - b).max() < 1e-10 * max(1.0, np.abs(a).max())


def test_local_gram_diagonals(make_frames):
    f = make_frames(6)
    cfg = PipelineConfig()
    L = local_grams(f, cfg)
    subs = extract_subsets(f, 6, 2)
    G = gaussian_embed(np.stack([s.features for s in subs]), 0.9, 1e-3, 1e-6)
    norms2 = np.array([np.sum(spd_log(mean_centralize(g)) ** 2) for g in G])
    np.testing.assert_allclose(np.diag(L[0]), 1.0, atol=1e-9)
    np.testing.assert_allclose(np.diag(L[1]), norms2, rtol=1e-9)


def test_variant_kernel_pipeline(make_frames):
    f = make_frames(5, 12, 12)
    cfg = PipelineConfig(kernel="loge-gau")
    L = local_grams(f, cfg)
    assert cfg.local_orders == (0,)
    assert L.shape == (1, 16, 16)
    np.testing.assert_allclose(np.diag(L[0]), 1.0)


def test_finalize_examples(make_spd):
    X = make_spd(5)
    np.testing.assert_allclose(finalize_representation(X), X, atol=1e-12)
    np.testing.assert_allclose(finalize_representation(np.diag([1.0, 1.0, 0.0])),
                               np.diag([1.0, 1.0, 1e-8]), atol=1e-15)
    with pytest.raises(DegenerateRepresentation):
        finalize_representation(np.zeros((3, 3)))


def test_finalize_output_is_spd(rng):
    for _ in range(20):
        A = rng.standard_normal((6, 3))
        check_spd(finalize_representation(A @ A.T))


def test_image_set_validation():
    with pytest.raises(InvalidInput):
        ImageSet(np.zeros((1, 4, 4)))
    with pytest.raises(InvalidInput):
        ImageSet(np.full((2, 4, 4), 2.0))
    with pytest.raises(InvalidInput):
        ImageSet(np.zeros((2, 4)))
