import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from edgediff.color import ColorError, OpponentImage, Space
from edgediff.metrics import MetricError, difference_maps, minkowski_pool, wrap_angle


def _lch_pixel(L, C, h, space=Space.OKLAB):
    return OpponentImage(np.array([[[L, C * math.cos(h), C * math.sin(h)]]]), space)


def test_identical_images_zero(rng):
    a = OpponentImage(rng.normal(size=(5, 6, 3)), Space.IPT)
    r = difference_maps(a, a)
    for m in r.maps.values():
        assert np.all(m == 0)


def test_hue_difference_example():
    r = difference_maps(_lch_pixel(50, 10, math.pi / 3 + 0.2), _lch_pixel(50, 10, 0.2))
    assert float(r.delta_h[0, 0]) == pytest.approx(10.0, abs=1e-9)
    assert float(r.delta_c[0, 0]) == pytest.approx(0.0, abs=1e-12)


def test_hue_wraps_across_zero():
    r = difference_maps(_lch_pixel(1, 10, 0.1), _lch_pixel(1, 10, 2 * math.pi - 0.1))
    assert float(r.delta_h[0, 0]) == pytest.approx(20 * math.sin(0.1), abs=1e-9)


def test_zero_chroma_no_hue_difference():
    r = difference_maps(_lch_pixel(1, 0, 0), _lch_pixel(1, 5, 2.0))
    assert r.delta_h[0, 0] == 0.0
    assert r.delta_c[0, 0] == pytest.approx(-5.0)


def test_total_is_euclidean_and_bounds_lightness(rng):
    a = OpponentImage(rng.normal(size=(6, 6, 3)), Space.IPT)
    b = OpponentImage(rng.normal(size=(6, 6, 3)), Space.IPT)
    r = difference_maps(a, b)
    np.testing.assert_allclose(r.delta_e, np.linalg.norm(a.data - b.data, axis=-1))
    np.testing.assert_allclose(r.delta_i, a.data[..., 0] - b.data[..., 0])
    assert np.all(r.delta_e >= np.abs(r.delta_i) - 1e-15)


def test_symmetries(rng):
    a = OpponentImage(rng.normal(size=(8, 8, 3)), Space.OKLAB)
    b = OpponentImage(rng.normal(size=(8, 8, 3)), Space.OKLAB)
    ab, ba = difference_maps(a, b), difference_maps(b, a)
    np.testing.assert_array_equal(ab.delta_e, ba.delta_e)
    np.testing.assert_allclose(ab.delta_i, -ba.delta_i)
    np.testing.assert_allclose(ab.delta_c, -ba.delta_c)
    np.testing.assert_allclose(ab.delta_h, -ba.delta_h, atol=1e-12)


def test_chroma_scaling(rng):
    a = rng.normal(size=(8, 8, 3))
    b = rng.normal(size=(8, 8, 3))
    s = np.array([1.0, 2.5, 2.5])
    r1 = difference_maps(OpponentImage(a, Space.IPT), OpponentImage(b, Space.IPT))
    r2 = difference_maps(OpponentImage(a * s, Space.IPT), OpponentImage(b * s, Space.IPT))
    np.testing.assert_allclose(r2.delta_c, 2.5 * r1.delta_c, atol=1e-12)
    np.testing.assert_allclose(r2.delta_h, 2.5 * r1.delta_h, atol=1e-12)


def test_mismatches():
    a = OpponentImage(np.zeros((2, 2, 3)), Space.IPT)
    with pytest.raises(ColorError):
        difference_maps(a, OpponentImage(np.zeros((2, 2, 3)), Space.OKLAB))
    with pytest.raises(MetricError):
        difference_maps(a, OpponentImage(np.zeros((3, 2, 3)), Space.IPT))


def test_wrap_angle():
    np.testing.assert_allclose(wrap_angle([0, math.pi, -math.pi, 3 * math.pi, 1.5 * math.pi]),
                               [0, math.pi, math.pi, math.pi, -0.5 * math.pi], atol=1e-12)


def test_pool_examples():
    assert minkowski_pool([0, 0, 0, 2], 3) == pytest.approx(2 ** (1 / 3), abs=1e-9)
    assert minkowski_pool(np.full((4, 4), 0.7), 3) == pytest.approx(0.7)
    assert minkowski_pool(np.zeros(5)) == 0.0
    assert minkowski_pool([-1.0, 1.0], 2) == pytest.approx(1.0)
    with pytest.raises(MetricError):
        minkowski_pool([])
    with pytest.raises(MetricError):
        minkowski_pool([1.0], 0.5)


def test_pool_no_overflow():
    assert minkowski_pool([1e200, 0.0], 3) == pytest.approx(1e200 / 2 ** (1 / 3))


def test_pooled_result(rng):
    a = OpponentImage(rng.normal(size=(6, 6, 3)), Space.IPT)
    b = OpponentImage(rng.normal(size=(6, 6, 3)), Space.IPT)
    r = difference_maps(a, b).pooled(3)
    assert r.agg_e == pytest.approx(np.mean(r.delta_e**3) ** (1 / 3))
    assert r.agg_e >= r.delta_e.mean()
    assert set(r.aggregates) == {"agg_e", "agg_i", "agg_c", "agg_h"}


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(0, 1e3)))
def test_pool_p1_is_mean_and_monotone_in_p(v):
    assert minkowski_pool(v, 1) == pytest.approx(float(np.mean(v)), rel=1e-9, abs=1e-12)
    assert minkowski_pool(v, 3) >= minkowski_pool(v, 1) * (1 - 1e-12)
    assert minkowski_pool(v, 3) <= v.max() * (1 + 1e-12)
