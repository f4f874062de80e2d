"""Chromatic adaptation transforms and the luminance adaptation factor."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .color import ColorError, TristimulusImage, WhitePoint, apply_matrix, matrix


class AdaptationError(ColorError):
    pass


class CatVariant(str, enum.Enum):
    VON_KRIES_HPE = "VonKries_HPE"
    CAT02 = "CAT02"
    CAT16 = "CAT16"


_CAT_MATRIX = {
    CatVariant.VON_KRIES_HPE: "hpe",
    CatVariant.CAT02: "cat02",
    CatVariant.CAT16: "cat16",
}


@dataclass(frozen=True)
class AdaptationSpec:
    source_white: WhitePoint
    dest_white: WhitePoint
    degree: float = 1.0
    cat_variant: CatVariant = CatVariant.CAT16

    def __post_init__(self):
        if not 0.0 <= self.degree <= 1.0:
            raise AdaptationError(f"degree of adaptation must lie in [0, 1], got {self.degree}")
        object.__setattr__(self, "cat_variant", CatVariant(self.cat_variant))


@dataclass(frozen=True, eq=False)
class WhitePointMap:
    """Per-pixel adapting white, an (H, W, 3) XYZ raster."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise AdaptationError(f"white map must be (H, W, 3), got {arr.shape}")
        if np.any(arr[..., 1] <= 0):
            raise AdaptationError("white map has non-positive luminance")
        object.__setattr__(self, "data", arr)

    @classmethod
    def uniform(cls, white: WhitePoint, height: int, width: int) -> "WhitePointMap":
        return cls(np.broadcast_to(white.as_array(), (height, width, 3)).copy())


def cat_matrix(variant: CatVariant) -> np.ndarray:
    """XYZ -> sharpened LMS matrix of a CAT variant."""
    return matrix(_CAT_MATRIX[CatVariant(variant)]).entries


def von_kries_gains(w1, w2, degree: float = 1.0) -> np.ndarray:
    """Diagonal gains ``D * w2 / w1 + (1 - D)``; whites broadcast per pixel."""
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    if np.any(w1 <= 0):
        raise AdaptationError("source white has a non-positive cone response")
    return degree * (w2 / w1) + (1.0 - degree)


def von_kries_adapt(img_lms: np.ndarray, spec: AdaptationSpec) -> np.ndarray:
    """Diagonal adaptation of an LMS raster; the whites are given in that LMS space."""
    gains = von_kries_gains(spec.source_white.as_array(), spec.dest_white.as_array(), spec.degree)
    return np.asarray(img_lms, dtype=np.float64) * gains


def cat_adapt(
    img: TristimulusImage,
    white_map: WhitePointMap,
    dest_white: WhitePoint,
    variant: CatVariant = CatVariant.CAT16,
    degree: float = 1.0,
) -> TristimulusImage:
    """Adapt every pixel from its own white to ``dest_white``.

    XYZ and whites are in the same units (``img.absolute()`` vs. the white map);
    the output carries the scale of ``dest_white``.
    """
    if white_map.data.shape != img.data.shape:
        raise AdaptationError(
            f"white map shape {white_map.data.shape} does not match image {img.data.shape}"
        )
    if not 0.0 <= degree <= 1.0:
        raise AdaptationError(f"degree of adaptation must lie in [0, 1], got {degree}")
    m = matrix(_CAT_MATRIX[CatVariant(variant)])
    lms = apply_matrix(img.absolute(), m.entries)
    lms_w = apply_matrix(white_map.data, m.entries)
    lms_d = m.entries @ dest_white.as_array()
    gains = von_kries_gains(lms_w, lms_d, degree)
    out = apply_matrix(lms * gains, m.inverse().entries)
    return TristimulusImage(out)


def luminance_adaptation_factor(Y_white, rescale: bool = False):
    """Return ``(F_L, alpha)`` for adapting luminance ``Y_white`` in cd/m^2.

    Evaluated exactly as the iCAM02 expression is written; note it gives
    F_L ~ 0.585 at 1000 cd/m^2 and only reaches ~1 near 5000 cd/m^2.
    ``rescale=True`` drops the 1.71 divisor so that F_L(1000) ~ 1.
    """
    Y = np.asarray(Y_white, dtype=np.float64)
    if np.any(Y < 0):
        raise AdaptationError("adapting luminance must be non-negative")
    k = 1.0 / (1.0 + Y)
    k4 = k**4
    F_L = (0.2 * k4 * Y + 0.1 * (1.0 - k4) ** 2 * np.cbrt(Y)) / 1.71
    if rescale:
        F_L = F_L * 1.71
    alpha = 0.43 * np.maximum(F_L, 0.3)
    if F_L.ndim == 0:
        return float(F_L), float(alpha)
    return F_L, alpha
