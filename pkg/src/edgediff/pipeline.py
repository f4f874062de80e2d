"""
End-to-end image appearance and difference models.

Three models are available, each with a baseline and an edge-aware variant:

* ``ICAM02``: local white point, CAT to D65, luminance-modulated compression,
  opponent UCS. Differences are taken between the UCS images.
* ``IDIFF``: opponent ACC space, CSF filtering, local contrast, back to XYZ and
  into the UCS with its native exponent.
* ``ICAMDIFF``: the iCAM02 adaptation stages followed by the iDiff stages,
  compressed with the iCAM02 exponent.

The edge-aware variants replace the Gaussian white-point blur by a binned
cross-bilateral filter guided by Y, and the CSF multiplication by the
edge-aware CSF filter guided by the achromatic channel.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from . import color
from .adaptation import (
    CatVariant,
    WhitePointMap,
    cat_adapt,
    cat_matrix,
    luminance_adaptation_factor,
)
from .color import OpponentImage, Space, TristimulusImage, WhitePoint
from .csf import (
    Channel,
    CsfModel,
    FilterRaster,
    FrequencyGrid,
    build_csf_raster,
    default_models,
    edge_enhancement_raster,
)
from .filtering import (
    BilateralParams,
    bilateral_fast,
    edge_aware_csf_filter,
    frequency_filter,
    gaussian_blur,
)
from .metrics import DifferenceResult, difference_maps

log = logging.getLogger(__name__)


class PipelineError(ValueError):
    pass


class Model(str, enum.Enum):
    ICAM02 = "ICAM02"
    IDIFF = "IDIFF"
    ICAMDIFF = "ICAMDIFF"


class Ucs(str, enum.Enum):
    IPT = "IPT"
    OKLAB = "OKLAB"


# (XYZ -> LMS matrix, LMS' -> opponent matrix, native exponent)
_UCS = {
    Ucs.IPT: ("hpe", "lms_to_ipt", 0.43),
    Ucs.OKLAB: ("oklab_m1", "oklab_m2", 1.0 / 3.0),
}


@dataclass(frozen=True)
class ViewingConditions:
    ppd: float = 60.0
    max_luminance: float = 100.0
    reference_white: WhitePoint = field(default_factory=lambda: color.white("d65"))

    def __post_init__(self):
        if not self.ppd > 0:
            raise PipelineError("ppd must be positive")
        if not self.max_luminance > 0:
            raise PipelineError("max_luminance must be positive")


def _default_csf_models() -> tuple[CsfModel, CsfModel, CsfModel]:
    m = default_models()
    return (m[Channel.ACHROMATIC], m[Channel.RED_GREEN], m[Channel.BLUE_YELLOW])


@dataclass(frozen=True)
class PipelineConfig:
    model: Model = Model.ICAMDIFF
    edge_aware_whitepoint: bool = False
    edge_aware_csf: bool = False
    cat_variant: CatVariant = CatVariant.CAT16
    ucs: Ucs = Ucs.OKLAB
    viewing: ViewingConditions = field(default_factory=ViewingConditions)
    degree: float = 1.0
    # white-point filter; None means min(H, W) / 8 pixels
    white_sigma: Optional[float] = None
    range_fraction: float = 0.1
    bins: int = 32
    epsilon: float = 1e-6
    # achromatic, red-green, blue-yellow
    csf_models: tuple = field(default_factory=_default_csf_models)
    csf_enabled: bool = True
    oblique: bool = True
    edge_enhancement: bool = True
    edge_enhance_chroma: bool = False
    local_contrast: bool = True
    # local-contrast mask blur; None means min(H, W) / 8 pixels
    contrast_sigma: Optional[float] = None
    rescale_fl: bool = False
    white_floor: float = 1e-4
    pooling_exponent: float = 3.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "ucs", Ucs(self.ucs))
        object.__setattr__(self, "cat_variant", CatVariant(self.cat_variant))
        object.__setattr__(self, "csf_models", tuple(self.csf_models))
        if self.edge_aware_csf and self.model == Model.ICAM02:
            raise PipelineError("edge-aware CSF filtering needs the IDIFF or ICAMDIFF model")
        if len(self.csf_models) != 3:
            raise PipelineError("one CSF model per opponent channel is required")
        if not 0.0 <= self.degree <= 1.0:
            raise PipelineError("degree of adaptation must lie in [0, 1]")
        if self.pooling_exponent < 1:
            raise PipelineError("pooling exponent must be >= 1")

    @classmethod
    def variant(cls, model, edge_aware: bool, **kwargs) -> "PipelineConfig":
        model = Model(model)
        return cls(
            model=model,
            edge_aware_whitepoint=edge_aware and model != Model.IDIFF,
            edge_aware_csf=edge_aware and model != Model.ICAM02,
            **kwargs,
        )

    @property
    def edge_aware(self) -> bool:
        return self.edge_aware_whitepoint or self.edge_aware_csf

    @property
    def variant_name(self) -> str:
        return "edge-aware" if self.edge_aware else "baseline"

    def bilateral_for(self, guide, sigma_s=None) -> BilateralParams:
        return BilateralParams.for_guide(guide, sigma_s=sigma_s, range_fraction=self.range_fraction,
                                         bins=self.bins, epsilon=self.epsilon)


def _sigma(value, shape) -> float:
    return float(value) if value is not None else min(shape[:2]) / 8.0


# --- iCAM02 stages --------------------------------------------------------


def local_white_map(xyz_abs: np.ndarray, cfg: PipelineConfig) -> WhitePointMap:
    sigma = _sigma(cfg.white_sigma, xyz_abs.shape)
    if cfg.edge_aware_whitepoint:
        guide = xyz_abs[..., 1]
        white = bilateral_fast(xyz_abs, guide, cfg.bilateral_for(guide, sigma), workers=cfg.workers)
    else:
        white = gaussian_blur(xyz_abs, sigma)
    # Dark whites, and whites outside the cone-response cone (possible for
    # imaginary input colours), are replaced by the reference chromaticity.
    y = white[..., 1]
    lms = color.apply_matrix(white, cat_matrix(cfg.cat_variant))
    bad = (y < cfg.white_floor) | np.any(lms <= 0, axis=-1)
    if np.any(bad):
        log.info("replaced %d implausible white-map pixels", int(bad.sum()))
        ref = cfg.viewing.reference_white.as_array() / cfg.viewing.reference_white.Y
        white = white.copy()
        white[bad] = ref * np.maximum(y[bad], cfg.white_floor)[:, None]
    return WhitePointMap(white)


def icam_adapt(img: TristimulusImage, cfg: PipelineConfig) -> tuple[TristimulusImage, np.ndarray]:
    """Local white, CAT to D65 and the per-pixel compression exponent.

    Returns the adapted XYZ (relative, the adapting white maps to Y = 1) and
    the exponent raster.
    """
    white_map = local_white_map(img.absolute(), cfg)
    adapted = cat_adapt(img, white_map, cfg.viewing.reference_white.scaled(1.0),
                        cfg.cat_variant, cfg.degree)
    _, alpha = luminance_adaptation_factor(white_map.data[..., 1], rescale=cfg.rescale_fl)
    return adapted, alpha


def ucs_lms_matrix(ucs: Ucs, white: WhitePoint) -> np.ndarray:
    """The UCS cone matrix with rows scaled so that ``white`` maps to (1, 1, 1)."""
    m = color.matrix(_UCS[Ucs(ucs)][0]).entries
    return m / (m @ white.as_array())[:, None]


def to_ucs(xyz_rel: np.ndarray, cfg: PipelineConfig, exponent=None) -> OpponentImage:
    lms_name, opp_name, native = _UCS[cfg.ucs]
    lms_space = color.matrix(lms_name).to_space
    m = ucs_lms_matrix(cfg.ucs, cfg.viewing.reference_white)
    lms = OpponentImage(color.apply_matrix(xyz_rel, m), lms_space)
    compressed = color.compress(lms, native if exponent is None else exponent)
    return color.convert(compressed, color.matrix(opp_name))


def icam02_appearance(img: TristimulusImage, cfg: PipelineConfig) -> OpponentImage:
    adapted, alpha = icam_adapt(img, cfg)
    return to_ucs(adapted.data, cfg, alpha)


# --- iDiff stages ---------------------------------------------------------


@lru_cache(maxsize=16)
def _csf_rasters(h, w, ppd, models, oblique, csf_enabled, edge, edge_chroma):
    grid = FrequencyGrid.for_image(h, w, ppd)
    if csf_enabled:
        rasters = [build_csf_raster(m, grid, oblique) for m in models]
    else:
        rasters = [FilterRaster(np.ones((grid.height, grid.width)))] * 3
    if edge:
        enh = edge_enhancement_raster(grid, oblique)
        rasters = [r * enh if (c == 0 or edge_chroma) else r for c, r in enumerate(rasters)]
    return tuple(rasters)


def csf_rasters(shape, cfg: PipelineConfig) -> tuple[FilterRaster, ...]:
    return _csf_rasters(shape[0], shape[1], float(cfg.viewing.ppd), cfg.csf_models, cfg.oblique,
                        cfg.csf_enabled, cfg.edge_enhancement, cfg.edge_enhance_chroma)


def csf_filter(acc: OpponentImage, cfg: PipelineConfig) -> OpponentImage:
    rasters = csf_rasters(acc.data.shape, cfg)
    if cfg.edge_aware_csf:
        guide = acc.data[..., 0]
        out = edge_aware_csf_filter(acc.data, guide, rasters, cfg.bilateral_for(guide),
                                    workers=cfg.workers)
    else:
        out = np.stack([frequency_filter(acc.data[..., c], r) for c, r in enumerate(rasters)],
                       axis=-1)
    return OpponentImage(out, Space.ACC)


def local_contrast(acc: OpponentImage, filtered_a: np.ndarray, cfg: PipelineConfig) -> OpponentImage:
    """Per-pixel gamma from the blurred achromatic plane, applied to every channel.

    The exponent comes from ``filtered_a`` alone; each channel is divided by its
    own max - min range before the sign-preserving power.
    """
    med = float(np.median(filtered_a))
    if med == 0.0:
        log.info("median of the achromatic channel is zero; local contrast skipped")
        return acc
    mask = gaussian_blur(filtered_a, _sigma(cfg.contrast_sigma, filtered_a.shape))
    # the lower clip bound is inert (2**x > 0) but kept as written
    beta = np.clip(2.0 ** ((med - mask) / med), -10.0, 10.0)
    out = acc.data.copy()
    for c in range(3):
        ch = acc.data[..., c]
        span = float(ch.max() - ch.min())
        if span == 0.0:
            continue
        out[..., c] = span * color.signed_power(ch / span, beta)
    return OpponentImage(out, Space.ACC)


def idiff_prepare(img: TristimulusImage, cfg: PipelineConfig) -> TristimulusImage:
    """ACC, CSF filtering (with edge enhancement), local contrast, back to XYZ."""
    acc = color.convert(img, color.matrix("xyz_to_acc"))
    filtered = csf_filter(acc, cfg)
    if cfg.local_contrast:
        filtered = local_contrast(filtered, filtered.data[..., 0], cfg)
    return color.convert(filtered, color.matrix("xyz_to_acc").inverse())


# --- models ---------------------------------------------------------------


def appearance(img: TristimulusImage, cfg: PipelineConfig) -> OpponentImage:
    """The UCS image a model compares; differences are taken between two of these."""
    if cfg.model == Model.ICAM02:
        return icam02_appearance(img, cfg)
    if cfg.model == Model.IDIFF:
        rel = TristimulusImage(img.absolute() / cfg.viewing.max_luminance)
        return to_ucs(idiff_prepare(rel, cfg).data, cfg)
    adapted, alpha = icam_adapt(img, cfg)
    return to_ucs(idiff_prepare(adapted, cfg).data, cfg, alpha)


def compare_appearances(a: OpponentImage, b: OpponentImage, cfg: PipelineConfig) -> DifferenceResult:
    return difference_maps(a, b).pooled(cfg.pooling_exponent)


def run_model(ref: TristimulusImage, test: TristimulusImage, cfg: PipelineConfig) -> DifferenceResult:
    if ref.data.shape != test.data.shape:
        raise PipelineError(f"reference {ref.data.shape} and test {test.data.shape} differ in size")
    return compare_appearances(appearance(ref, cfg), appearance(test, cfg), cfg)


def all_variants(**kwargs) -> list[PipelineConfig]:
    """The six model x variant combinations."""
    return [PipelineConfig.variant(m, e, **kwargs) for m in Model for e in (False, True)]


def with_overrides(cfg: PipelineConfig, **changes) -> PipelineConfig:
    return replace(cfg, **changes)
