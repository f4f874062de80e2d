import numpy as np
import pytest

from edgediff import color
from edgediff.adaptation import (
    AdaptationError,
    AdaptationSpec,
    CatVariant,
    WhitePointMap,
    cat_adapt,
    luminance_adaptation_factor,
    von_kries_adapt,
    von_kries_gains,
)
from edgediff.color import TristimulusImage, WhitePoint

D65 = color.white("d65")
A = WhitePoint(1.09850, 1.0, 0.35585)


def _fl_oracle(Y):
    k = 1 / (1 + Y)
    fl = (0.2 * k**4 * Y + 0.1 * (1 - k**4) ** 2 * Y ** (1 / 3)) / 1.71
    return fl, 0.43 * max(fl, 0.3)


def test_same_white_identity(rng):
    lms = rng.uniform(size=(4, 5, 3))
    spec = AdaptationSpec(D65, D65)
    np.testing.assert_allclose(von_kries_adapt(lms, spec), lms, atol=0)


def test_zero_degree_identity(rng):
    lms = rng.uniform(size=(4, 5, 3))
    np.testing.assert_allclose(von_kries_adapt(lms, AdaptationSpec(A, D65, degree=0.0)), lms)


def test_diagonal_example():
    spec = AdaptationSpec(WhitePoint(1, 1, 1), WhitePoint(2, 1, 1))
    out = von_kries_adapt(np.array([0.5, 0.3, 0.2]), spec)
    np.testing.assert_allclose(out, [1.0, 0.3, 0.2], atol=1e-15)


def test_gains_are_multiplicative():
    w1, w2, w3 = np.array([0.9, 1.0, 1.1]), np.array([1.2, 0.8, 0.5]), np.array([0.7, 1.3, 2.0])
    np.testing.assert_allclose(von_kries_gains(w1, w2) * von_kries_gains(w2, w3),
                               von_kries_gains(w1, w3), atol=1e-12)


def test_partial_degree_blend():
    g = von_kries_gains([1, 1, 1], [2, 4, 0.5], degree=0.5)
    np.testing.assert_allclose(g, [1.5, 2.5, 0.75])


def test_degenerate_source_white():
    with pytest.raises(AdaptationError):
        von_kries_gains([0, 1, 1], [1, 1, 1])


def test_degree_range_checked():
    with pytest.raises(AdaptationError):
        AdaptationSpec(D65, D65, degree=1.5)


def test_white_map_positive():
    with pytest.raises(AdaptationError):
        WhitePointMap(np.zeros((2, 2, 3)))
    with pytest.raises(AdaptationError):
        WhitePointMap(np.ones((2, 2)))


@pytest.mark.parametrize("variant", list(CatVariant))
def test_cat_uniform_dest_white_identity(rng, variant):
    img = TristimulusImage(rng.uniform(0.01, 1, size=(6, 7, 3)))
    wm = WhitePointMap.uniform(D65, 6, 7)
    out = cat_adapt(img, wm, D65, variant)
    assert np.max(np.abs(out.data - img.data)) < 1e-9


@pytest.mark.parametrize("variant", list(CatVariant))
def test_cat_zero_degree_identity(rng, variant):
    img = TristimulusImage(rng.uniform(0.01, 1, size=(6, 7, 3)))
    out = cat_adapt(img, WhitePointMap.uniform(A, 6, 7), D65, variant, degree=0.0)
    assert np.max(np.abs(out.data - img.data)) < 1e-9


@pytest.mark.parametrize("variant", list(CatVariant))
def test_cat_maps_source_white_to_dest(variant):
    img = TristimulusImage(np.broadcast_to(A.as_array(), (2, 3, 3)))
    out = cat_adapt(img, WhitePointMap.uniform(A, 2, 3), D65, variant)
    np.testing.assert_allclose(out.data, np.broadcast_to(D65.as_array(), (2, 3, 3)), atol=1e-12)


def test_cat_uses_absolute_values():
    img = TristimulusImage(np.broadcast_to(A.as_array(), (1, 1, 3)), luminance_scale=50.0)
    out = cat_adapt(img, WhitePointMap.uniform(A.scaled(50.0), 1, 1), D65)
    np.testing.assert_allclose(out.data[0, 0], D65.as_array(), atol=1e-12)


def test_cat_per_pixel_whites():
    whites = np.stack([A.as_array(), D65.as_array()]).reshape(1, 2, 3)
    img = TristimulusImage(whites)
    out = cat_adapt(img, WhitePointMap(whites), D65)
    np.testing.assert_allclose(out.data, np.broadcast_to(D65.as_array(), (1, 2, 3)), atol=1e-12)


def test_cat_shape_mismatch():
    with pytest.raises(AdaptationError):
        cat_adapt(TristimulusImage(np.ones((2, 2, 3))), WhitePointMap.uniform(D65, 3, 3), D65)


def test_fl_examples():
    assert luminance_adaptation_factor(0.0) == (0.0, pytest.approx(0.129))
    fl, alpha = luminance_adaptation_factor(1000.0)
    assert fl == pytest.approx(0.5848, abs=1e-4)
    assert alpha == pytest.approx(0.2515, abs=1e-4)
    fl5000, _ = luminance_adaptation_factor(5000.0)
    assert fl5000 == pytest.approx(1.0001, abs=2e-4)


@pytest.mark.parametrize("Y", [0.0, 0.5, 3.0, 42.0, 1000.0, 1e5])
def test_fl_matches_scalar_oracle(Y):
    fl, alpha = luminance_adaptation_factor(Y)
    ofl, oalpha = _fl_oracle(Y)
    assert fl == pytest.approx(ofl, rel=1e-12, abs=1e-15)
    assert alpha == pytest.approx(oalpha, rel=1e-12)


def test_fl_monotone_and_vectorised():
    Y = np.concatenate([[0.0], np.logspace(-4, 6, 2000)])
    fl, alpha = luminance_adaptation_factor(Y)
    assert fl.shape == Y.shape
    assert np.all(np.diff(fl) >= 0)
    assert np.all(alpha >= 0.129 - 1e-15)


def test_fl_rescale_and_domain():
    fl, _ = luminance_adaptation_factor(1000.0, rescale=True)
    assert fl == pytest.approx(0.5848 * 1.71, abs=2e-4)
    with pytest.raises(AdaptationError):
        luminance_adaptation_factor(-1.0)
