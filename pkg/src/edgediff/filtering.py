"""
Spatial and frequency-domain filtering.

Every filter here treats image borders by mirror (half-sample symmetric)
extension. For frequency-domain work the plane is conceptually padded to
twice its size with its mirror image; when the gain raster is even in both
axes this is computed exactly, and much faster, with a type-II DCT.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.fft as sfft
from scipy import ndimage

from .csf import FilterRaster

log = logging.getLogger(__name__)

TRUNCATE = 3.0
# kernels wider than this go through the spectral path
_SPATIAL_RADIUS_LIMIT = 24


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class BilateralParams:
    sigma_s: float
    sigma_r: float
    bins: int = 32
    epsilon: float = 1e-6

    def __post_init__(self):
        if not self.sigma_s > 0:
            raise FilterError("sigma_s must be positive")
        if not self.sigma_r > 0:
            raise FilterError("sigma_r must be positive")
        if int(self.bins) != self.bins or self.bins < 2:
            raise FilterError("at least two range bins are required")
        if not self.epsilon > 0:
            raise FilterError("epsilon must be positive")

    @classmethod
    def for_guide(cls, guide, sigma_s=None, range_fraction=0.1, bins=32, epsilon=1e-6):
        """Defaults: sigma_s = min(H, W) / 8, sigma_r = ``range_fraction`` of the guide's range."""
        guide = np.asarray(guide)
        if sigma_s is None:
            sigma_s = min(guide.shape[:2]) / 8.0
        span = float(np.max(guide) - np.min(guide))
        sigma_r = range_fraction * span if span > 0 else 1.0
        return cls(float(sigma_s), float(sigma_r), int(bins), float(epsilon))


def _radius(sigma: float) -> int:
    return int(TRUNCATE * float(sigma) + 0.5)


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalised Gaussian truncated at 3 sigma."""
    r = _radius(sigma)
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


@lru_cache(maxsize=64)
def _gaussian_transfer(n: int, sigma: float) -> np.ndarray:
    # response of the kernel, wrapped onto the 2n-periodic mirror extension
    k = gaussian_kernel1d(sigma)
    r = (k.size - 1) // 2
    h = np.zeros(2 * n)
    np.add.at(h, np.arange(-r, r + 1) % (2 * n), k)
    t = np.real(np.fft.fft(h))[:n]
    t.setflags(write=False)
    return t


def _dct2(x):
    return sfft.dctn(x, type=2, axes=(0, 1), norm="ortho")


def _idct2(x):
    return sfft.idctn(x, type=2, axes=(0, 1), norm="ortho")


def _spatial_axes_sigma(x: np.ndarray, sigma: float):
    return (sigma, sigma) + (0,) * (x.ndim - 2)


def gaussian_blur(plane, sigma: float) -> np.ndarray:
    """Normalised Gaussian convolution over the first two axes with mirror borders."""
    x = np.asarray(plane, dtype=np.float64)
    if not sigma > 0:
        raise FilterError("sigma must be positive")
    if _radius(sigma) <= _SPATIAL_RADIUS_LIMIT:
        return ndimage.gaussian_filter(x, _spatial_axes_sigma(x, sigma), mode="reflect",
                                       truncate=TRUNCATE)
    gain = np.outer(_gaussian_transfer(x.shape[0], sigma), _gaussian_transfer(x.shape[1], sigma))
    if x.ndim == 3:
        gain = gain[..., None]
    return _idct2(_dct2(x) * gain)


def _check_raster(plane: np.ndarray, raster: FilterRaster):
    h, w = plane.shape[:2]
    if raster.shape != (2 * h, 2 * w):
        raise FilterError(
            f"raster shape {raster.shape} does not match the padded transform {(2 * h, 2 * w)}"
        )


class _SpectralOp:
    """Multiply by a raster in the mirror-padded frequency domain.

    ``forward`` and ``apply`` are split so one forward transform can feed
    several rasters of the same kind.
    """

    def __init__(self, raster: FilterRaster, shape: tuple[int, int]):
        h, w = shape
        self.shape = shape
        self.dct = raster.symmetric
        self.gain = raster.gain[:h, :w] if self.dct else raster.gain

    def forward(self, x: np.ndarray) -> np.ndarray:
        if self.dct:
            return _dct2(x)
        h, w = self.shape
        return sfft.fft2(np.pad(x, ((0, h), (0, w)), mode="symmetric"))

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        if self.dct:
            return _idct2(coeffs * self.gain)
        h, w = self.shape
        out = sfft.ifft2(coeffs * self.gain)
        return np.real(out[:h, :w])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(self.forward(x))


def frequency_filter(plane, raster: FilterRaster) -> np.ndarray:
    """Filter a single channel by per-bin gains on its mirror-padded spectrum."""
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2:
        raise FilterError("frequency_filter expects a single-channel plane")
    _check_raster(x, raster)
    return _SpectralOp(raster, x.shape)(x)


def range_weight(diff, sigma_r: float):
    return np.exp(-0.5 * (np.asarray(diff) / sigma_r) ** 2)


def bilateral_direct(plane, guide, params: BilateralParams) -> np.ndarray:
    """Brute-force cross-bilateral filter; range weights come from ``guide``.

    The neighbourhood is the square 3-sigma window of the separable spatial
    kernel, with mirror borders, so it agrees with :func:`bilateral_fast`
    wherever the binning is exact.
    """
    x = np.asarray(plane, dtype=np.float64)
    g = np.asarray(guide, dtype=np.float64)
    if g.shape != x.shape[:2]:
        raise FilterError("guide and plane dimensions differ")
    k = gaussian_kernel1d(params.sigma_s)
    r = (k.size - 1) // 2
    h, w = g.shape
    pad = ((r, r), (r, r)) + ((0, 0),) * (x.ndim - 2)
    xp = np.pad(x, pad, mode="symmetric")
    gp = np.pad(g, ((r, r), (r, r)), mode="symmetric")
    num = np.zeros_like(x)
    den = np.zeros_like(g)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            gs = gp[r + dy:r + dy + h, r + dx:r + dx + w]
            wgt = k[dy + r] * k[dx + r] * range_weight(g - gs, params.sigma_r)
            xs = xp[r + dy:r + dy + h, r + dx:r + dx + w]
            num += wgt[..., None] * xs if x.ndim == 3 else wgt * xs
            den += wgt
    return num / (den[..., None] if x.ndim == 3 else den)


def bin_centers(guide: np.ndarray, bins: int) -> np.ndarray:
    return np.linspace(float(np.min(guide)), float(np.max(guide)), int(bins))


def hat_weight(guide: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    """Linear-interpolation weight of bin ``k``; weights over all bins sum to 1."""
    step = centers[1] - centers[0]
    t = (guide - centers[0]) / step
    return np.clip(1.0 - np.abs(t - k), 0.0, 1.0)


def _binned(
    planes: Sequence[np.ndarray],
    guide: np.ndarray,
    params: BilateralParams,
    bin_filter: Callable[[int, np.ndarray, list], tuple[list, list]],
    floor: Callable[[np.ndarray], np.ndarray],
    workers: int,
    diagnostics: Optional[dict],
) -> list[np.ndarray]:
    centers = bin_centers(guide, params.bins)

    def one_bin(k):
        wk = range_weight(centers[k] - guide, params.sigma_r)
        nums, dens = bin_filter(k, wk, [wk * p for p in planes])
        hat = hat_weight(guide, centers, k)
        used = hat > 0
        contrib, hits = [], 0
        for num, den in zip(nums, dens):
            den_f = floor(den)
            hits += int(np.count_nonzero(used & (den_f != den)))
            contrib.append(hat * (num / den_f))
        return contrib, hits

    out = [np.zeros_like(guide) for _ in planes]
    total_hits = 0
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(one_bin, range(params.bins))
            for contrib, hits in results:
                for o, c in zip(out, contrib):
                    o += c
                total_hits += hits
    else:
        for k in range(params.bins):
            contrib, hits = one_bin(k)
            for o, c in zip(out, contrib):
                o += c
            total_hits += hits
    if total_hits:
        log.debug("denominator floor activated on %d pixel-bins", total_hits)
    if diagnostics is not None:
        diagnostics["floor_hits"] = diagnostics.get("floor_hits", 0) + total_hits
    return out


def _split(plane: np.ndarray) -> list[np.ndarray]:
    return [plane] if plane.ndim == 2 else [plane[..., c] for c in range(plane.shape[2])]


def _join(planes: list[np.ndarray], like: np.ndarray) -> np.ndarray:
    return planes[0] if like.ndim == 2 else np.stack(planes, axis=-1)


def _degenerate(guide: np.ndarray) -> bool:
    return not float(np.max(guide)) > float(np.min(guide))


def bilateral_fast(plane, guide, params: BilateralParams, workers: int = 1,
                   diagnostics: Optional[dict] = None) -> np.ndarray:
    """Binned cross-bilateral filter built from a Gaussian blur per range bin.

    ``plane`` may be (H, W) or (H, W, C); all channels share the guide, bins
    and interpolation. Per-bin ratios are interpolated linearly in the guide
    value between the two bracketing bin centres.
    """
    x = np.asarray(plane, dtype=np.float64)
    g = np.asarray(guide, dtype=np.float64)
    if g.shape != x.shape[:2]:
        raise FilterError("guide and plane dimensions differ")
    if _degenerate(g):
        return gaussian_blur(x, params.sigma_s)

    def bin_filter(k, wk, weighted):
        den = gaussian_blur(wk, params.sigma_s)
        return [gaussian_blur(p, params.sigma_s) for p in weighted], [den] * len(weighted)

    eps = params.epsilon
    out = _binned(_split(x), g, params, bin_filter, lambda d: np.maximum(d, eps),
                  workers, diagnostics)
    return _join(out, x)


def edge_aware_csf_filter(opponent, guide, rasters: Sequence[FilterRaster],
                          params: BilateralParams, workers: int = 1,
                          diagnostics: Optional[dict] = None) -> np.ndarray:
    """Edge-aware CSF filtering of an (H, W, 3) opponent raster.

    The binned bilateral structure with each bin's linear filter replaced by
    frequency-domain filtering with the channel's raster. The denominator is
    floored at ``epsilon * max|denominator|`` per bin since CSF kernels can
    have negative side lobes. ``params.sigma_s`` is unused.
    """
    data = getattr(opponent, "data", opponent)
    x = np.asarray(data, dtype=np.float64)
    g = np.asarray(guide, dtype=np.float64)
    if x.ndim != 3 or len(rasters) != x.shape[2]:
        raise FilterError("need one raster per channel")
    if g.shape != x.shape[:2]:
        raise FilterError("guide and image dimensions differ")
    for r in rasters:
        _check_raster(x, r)
    ops = [_SpectralOp(r, g.shape) for r in rasters]
    if _degenerate(g):
        return np.stack([op(x[..., c]) for c, op in enumerate(ops)], axis=-1)

    def bin_filter(k, wk, weighted):
        fwd_w = {}
        nums, dens = [], []
        for op, p in zip(ops, weighted):
            if op.dct not in fwd_w:
                fwd_w[op.dct] = op.forward(wk)
            dens.append(op.apply(fwd_w[op.dct]))
            nums.append(op(p))
        return nums, dens

    eps = params.epsilon

    def floor(d):
        return np.maximum(d, eps * float(np.max(np.abs(d))))

    out = _binned(_split(x), g, params, bin_filter, floor, workers, diagnostics)
    return np.stack(out, axis=-1)
