"""Durand and Reinhard tone-mapping operators used to generate distortion sweeps.

Both take an HDR :class:`TristimulusImage` (absolute luminance) and return a
display-referred image whose ``data`` is relative to the display peak and whose
``luminance_scale`` is the display peak in cd/m^2.
"""

from __future__ import annotations

import numpy as np

from .color import TristimulusImage, linear_srgb_to_xyz, signed_power, xyz_to_linear_srgb
from .filtering import BilateralParams, bilateral_fast

# Durand & Dorsey (2002) defaults: log10 intensity, spatial sigma 2% of the
# image diagonal, range sigma 0.4 log10 units.
DURAND_SPATIAL_FRACTION = 0.02
DURAND_SIGMA_R = 0.4
LUMINANCE_FLOOR = 1e-6


class ToneMapError(ValueError):
    pass


def durand_layers(hdr: TristimulusImage, sigma_s=None, sigma_r=DURAND_SIGMA_R, bins=32):
    """Return ``(log_luminance, base, detail)`` in log10 units."""
    L = np.maximum(hdr.absolute()[..., 1], LUMINANCE_FLOOR)
    log_l = np.log10(L)
    if sigma_s is None:
        sigma_s = DURAND_SPATIAL_FRACTION * float(np.hypot(*log_l.shape))
    base = bilateral_fast(log_l, log_l, BilateralParams(max(sigma_s, 0.5), sigma_r, bins))
    return log_l, base, log_l - base


def durand_compression(base: np.ndarray, base_contrast: float) -> float:
    span = float(base.max() - base.min())
    if span <= 0:
        return 1.0
    return min(1.0, np.log10(base_contrast) / span)


def _apply_colour(xyz: np.ndarray, L: np.ndarray, L_out: np.ndarray, desaturation: float) -> np.ndarray:
    """Rebuild colour around new luminance: linear-sRGB ``(C / L)^s * L_out`` with ``s = 1 - d``."""
    lit = L > 0
    if desaturation == 0.0:
        gain = np.zeros_like(L)
        gain[lit] = L_out[lit] / L[lit]
        return xyz * gain[..., None]
    rgb = xyz_to_linear_srgb(xyz)
    ratio = np.zeros_like(rgb)
    ratio[lit] = rgb[lit] / L[lit][:, None]
    out_rgb = signed_power(ratio, 1.0 - desaturation) * L_out[..., None]
    out_rgb[~lit] = 0.0
    return linear_srgb_to_xyz(out_rgb)


def _check_desaturation(d: float):
    if not 0.0 <= d <= 1.0:
        raise ToneMapError("desaturation must lie in [0, 1]")


def tonemap_durand(hdr: TristimulusImage, base_contrast: float, display_max: float = 100.0,
                   sigma_s=None, sigma_r: float = DURAND_SIGMA_R, bins: int = 32,
                   desaturation: float = 0.0) -> TristimulusImage:
    """Bilateral base/detail decomposition with the base squeezed to ``log10(base_contrast)``.

    The brightest base value maps to the display peak; luminance above the
    peak is clipped. Chromaticity is preserved unless ``desaturation`` > 0,
    which applies the same colour exponent as :func:`tonemap_reinhard`.
    """
    if not base_contrast > 1:
        raise ToneMapError("base contrast must exceed 1")
    _check_desaturation(desaturation)
    log_l, base, detail = durand_layers(hdr, sigma_s, sigma_r, bins)
    factor = durand_compression(base, base_contrast)
    log_out = (base - base.max()) * factor + detail
    L_out = np.minimum(10.0**log_out, 1.0)
    xyz = hdr.absolute()
    L_in = np.maximum(xyz[..., 1], LUMINANCE_FLOOR)
    return TristimulusImage(_apply_colour(xyz, L_in, L_out, desaturation), luminance_scale=display_max)


def global_contrast(L: np.ndarray, base_contrast: float) -> np.ndarray:
    """Scale log10 luminance about its mean so the full range spans at most ``log10(base_contrast)``."""
    if not base_contrast > 1:
        raise ToneMapError("base contrast must exceed 1")
    log_l = np.log10(np.maximum(L, LUMINANCE_FLOOR))
    factor = durand_compression(log_l, base_contrast)
    mid = float(log_l.mean())
    return 10.0 ** (mid + (log_l - mid) * factor)


def reinhard_luminance(L: np.ndarray, key: float = 0.18, l_white=None) -> np.ndarray:
    """Global photographic operator ``L_m (1 + L_m / L_white^2) / (1 + L_m)``."""
    log_avg = float(np.exp(np.mean(np.log(LUMINANCE_FLOOR + L))))
    L_m = key / log_avg * L
    if l_white is None:
        l_white = float(L_m.max())
    l_white = max(l_white, LUMINANCE_FLOOR)
    return L_m * (1.0 + L_m / l_white**2) / (1.0 + L_m)


def tonemap_reinhard(hdr: TristimulusImage, desaturation: float, key: float = 0.18,
                     l_white=None, display_max: float = 100.0,
                     base_contrast=None) -> TristimulusImage:
    """Reinhard global operator with the colour exponent ``s = 1 - desaturation``.

    Each linear-sRGB channel becomes ``(C / L)^s * L_d``; pixels with zero
    luminance stay black. ``base_contrast`` optionally squeezes the scene's
    log-luminance range first (see :func:`global_contrast`).
    """
    _check_desaturation(desaturation)
    xyz = hdr.absolute()
    L = np.maximum(xyz[..., 1], 0.0)
    L_src = L if base_contrast is None else np.where(L > 0, global_contrast(L, base_contrast), 0.0)
    L_d = reinhard_luminance(L_src, key, l_white)
    return TristimulusImage(_apply_colour(xyz, L, L_d, desaturation), luminance_scale=display_max)
