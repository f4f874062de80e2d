"""Per-pixel difference maps and Minkowski pooling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .color import ColorError, OpponentImage, cylindrical


class MetricError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DifferenceResult:
    delta_e: np.ndarray
    delta_i: np.ndarray
    delta_c: np.ndarray
    delta_h: np.ndarray
    agg_e: float = float("nan")
    agg_i: float = float("nan")
    agg_c: float = float("nan")
    agg_h: float = float("nan")
    pooling_exponent: float = 3.0

    @property
    def maps(self) -> dict[str, np.ndarray]:
        return {"delta_e": self.delta_e, "delta_i": self.delta_i,
                "delta_c": self.delta_c, "delta_h": self.delta_h}

    @property
    def aggregates(self) -> dict[str, float]:
        return {"agg_e": self.agg_e, "agg_i": self.agg_i,
                "agg_c": self.agg_c, "agg_h": self.agg_h}

    def pooled(self, exponent: float = 3.0) -> "DifferenceResult":
        return DifferenceResult(
            self.delta_e, self.delta_i, self.delta_c, self.delta_h,
            agg_e=minkowski_pool(self.delta_e, exponent),
            agg_i=minkowski_pool(self.delta_i, exponent),
            agg_c=minkowski_pool(self.delta_c, exponent),
            agg_h=minkowski_pool(self.delta_h, exponent),
            pooling_exponent=exponent,
        )


def wrap_angle(d):
    """Wrap to (-pi, pi]."""
    d = np.asarray(d, dtype=np.float64)
    w = np.mod(d + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def difference_maps(a: OpponentImage, b: OpponentImage) -> DifferenceResult:
    """Total, lightness, chroma and hue differences of two UCS images (a minus b).

    Channel 1 is the lightness axis; channels 2 and 3 form the chroma plane.
    """
    if a.space != b.space:
        raise ColorError(f"space mismatch: {a.space.value} vs {b.space.value}")
    if a.data.shape != b.data.shape:
        raise MetricError(f"dimension mismatch: {a.data.shape} vs {b.data.shape}")
    delta_e = np.sqrt(np.sum((a.data - b.data) ** 2, axis=-1))
    lch_a = cylindrical(a.data)
    lch_b = cylindrical(b.data)
    delta_i = a.data[..., 0] - b.data[..., 0]
    c1, c2 = lch_a[..., 1], lch_b[..., 1]
    delta_c = c1 - c2
    dh = wrap_angle(lch_a[..., 2] - lch_b[..., 2])
    delta_h = 2.0 * np.sqrt(c1 * c2) * np.sin(dh / 2.0)
    return DifferenceResult(delta_e, delta_i, delta_c, delta_h)


def minkowski_pool(values, exponent: float = 3.0) -> float:
    """``(mean |v|^p)^(1/p)``; signed maps are pooled on magnitudes."""
    v = np.abs(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise MetricError("cannot pool an empty map")
    if exponent < 1:
        raise MetricError("pooling exponent must be >= 1")
    if exponent == 1:
        return float(np.mean(v))
    # scale out the maximum so large maps cannot overflow
    m = float(v.max())
    if m == 0.0:
        return 0.0
    return float(m * np.mean((v / m) ** exponent) ** (1.0 / exponent))
