"""Edge-aware image appearance and perceptual colour difference models."""

__version__ = "0.1.0"

from .color import OpponentImage, Space, TristimulusImage, WhitePoint  # noqa: E402
from .metrics import DifferenceResult, difference_maps, minkowski_pool  # noqa: E402
from .pipeline import (  # noqa: E402
    Model,
    PipelineConfig,
    Ucs,
    ViewingConditions,
    all_variants,
    appearance,
    run_model,
)

__all__ = [
    "DifferenceResult",
    "Model",
    "OpponentImage",
    "PipelineConfig",
    "Space",
    "TristimulusImage",
    "Ucs",
    "ViewingConditions",
    "WhitePoint",
    "all_variants",
    "appearance",
    "difference_maps",
    "minkowski_pool",
    "run_model",
]
