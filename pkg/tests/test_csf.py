import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgediff.csf import (
    BLUE_YELLOW,
    RED_GREEN,
    Channel,
    CsfError,
    CsfModel,
    FilterRaster,
    FrequencyGrid,
    Movshon,
    build_csf_raster,
    default_models,
    edge_enhancement_raster,
    eval_csf,
    flatten_csf,
    nss_adapt,
    oblique_frequency,
    sample_curve,
)


def test_movshon_values():
    m = CsfModel(Movshon())
    assert eval_csf(m, 0.0) == 0.0
    assert eval_csf(m, 4.0) == pytest.approx(75 * 4**0.8 * math.exp(-0.8), rel=1e-12)
    assert eval_csf(m, 4.0) == pytest.approx(102.16, abs=0.01)
    with pytest.raises(CsfError):
        eval_csf(m, -1.0)


def test_movshon_peak():
    assert Movshon().peak_frequency() == pytest.approx(4.0, abs=1e-12)
    f = np.linspace(0, 40, 400001)
    assert f[np.argmax(Movshon()(f))] == pytest.approx(4.0, abs=1e-3)


def test_flattening():
    m = CsfModel(Movshon(), flatten=True)
    flat = flatten_csf(m)
    peak = Movshon()(4.0)
    assert float(flat(0.0)) == pytest.approx(peak, rel=1e-12)
    assert float(flat(2.0)) == pytest.approx(peak, rel=1e-12)
    assert float(flat(10.0)) == pytest.approx(Movshon()(10.0), rel=1e-12)
    v = flat(np.linspace(0, 60, 1000))
    assert np.all(np.diff(v) <= 0)


def test_nss():
    m = CsfModel(Movshon(), nss=True)
    g = nss_adapt(m)
    assert float(g(0.0)) == 0.0
    assert float(g(1.0)) == pytest.approx(Movshon()(1.0))
    assert m.peak_frequency == pytest.approx((0.8 + 1 / 3) / 0.2)
    f = np.linspace(0, 40, 400001)
    assert f[np.argmax(g(f))] == pytest.approx(5.6667, abs=1e-3)


def test_normalised_evaluate():
    m = CsfModel(Movshon(), flatten=True)
    v = m.evaluate(np.linspace(0, 60, 500))
    assert v[0] == pytest.approx(1.0, abs=1e-15)
    assert v.max() == pytest.approx(1.0, abs=1e-15)


def test_chromatic_lowpass():
    f = np.linspace(0, 60, 1000)
    for kind in (RED_GREEN, BLUE_YELLOW):
        v = CsfModel(kind).evaluate(f)
        assert v[0] == pytest.approx(1.0)
        assert np.all(np.diff(v) <= 1e-12)
    assert RED_GREEN(0.0) == pytest.approx(109.1413 + 93.5971)


def test_oblique_divisor():
    grid = FrequencyGrid(64, 64, 64.0)
    fo = oblique_frequency(grid)
    fr = grid.fr
    # theta = 0 row, diagonal bin, and pi/8 via the exact cos(4 theta) form
    assert fo[0, 5] == pytest.approx(fr[0, 5])
    assert fo[5, 5] == pytest.approx(fr[5, 5] / 0.7)
    c = grid.cos4theta
    np.testing.assert_allclose(c, np.cos(4 * grid.theta), atol=1e-12)


def test_cos4theta_zero_gives_085():
    grid = FrequencyGrid(8, 8, 8.0)
    theta = np.pi / 8
    divisor = 0.15 * np.cos(4 * theta) + 0.85
    assert divisor == pytest.approx(0.85)
    assert oblique_frequency(grid)[0, 0] == 0.0


def test_edge_enhancement_values():
    grid = FrequencyGrid(256, 256, 256.0)
    g = edge_enhancement_raster(grid, oblique=False).gain
    assert g[0, 30] == pytest.approx(2.0)
    assert g[0, 24] == pytest.approx(1 + math.exp(-1))
    assert g[0, 6] - 1 <= math.exp(-16) * (1 + 1e-9)
    assert g[0, 54] - 1 <= math.exp(-16) * (1 + 1e-9)
    assert g.min() >= 1.0 and g.max() <= 2.0


def test_raster_contract():
    grid = FrequencyGrid.for_image(40, 50, 60.0)
    r = build_csf_raster(default_models()[Channel.ACHROMATIC], grid)
    assert r.shape == (80, 100)
    assert r.gain[0, 0] == 1.0
    assert abs(r.gain.max() - 1.0) < 1e-6
    assert r.symmetric
    assert np.all(r.gain >= 0)


def test_bandpass_raster_renormalised():
    grid = FrequencyGrid.for_image(16, 16, 7.0)
    r = build_csf_raster(CsfModel(Movshon()), grid)
    assert r.gain.max() == pytest.approx(1.0, abs=1e-15)
    assert r.gain[0, 0] == 0.0


def test_raster_symmetry_detection():
    assert not FilterRaster(np.arange(16.0).reshape(4, 4)).symmetric
    with pytest.raises(CsfError):
        FilterRaster(np.full((2, 2), np.inf))


def test_default_models_nss_only_achromatic():
    m = default_models(nss=True)
    assert m[Channel.ACHROMATIC].nss and not m[Channel.RED_GREEN].nss


def test_sample_curve():
    f, v = sample_curve(CsfModel(Movshon(), flatten=True), 30, 31)
    assert f[-1] == 30 and v.shape == (31,)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.2, 2.0))
def test_flattened_movshon_monotone_for_any_params(b, c):
    m = CsfModel(Movshon(75, b, c), flatten=True)
    v = m.evaluate(np.linspace(0, 100, 1000))
    assert np.all(np.diff(v) <= 1e-15)
    assert v[0] == pytest.approx(1.0)
