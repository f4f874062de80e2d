"""
Parametric contrast sensitivity functions and frequency-domain filter rasters.

Frequencies are in cycles per degree throughout. Rasters are laid out in the
unshifted DFT order of the (mirror-padded) transform they will multiply.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.optimize import minimize_scalar


class CsfError(ValueError):
    pass


@dataclass(frozen=True)
class Movshon:
    """Bandpass ``a * f**c * exp(-b * f)``."""

    a: float = 75.0
    b: float = 0.2
    c: float = 0.8

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise CsfError(f"Movshon parameters must be positive: {self}")

    def __call__(self, f):
        f = np.asarray(f, dtype=np.float64)
        return self.a * f**self.c * np.exp(-self.b * f)

    def peak_frequency(self, extra_exponent: float = 0.0) -> float:
        # stationary point of f**(c + e) * exp(-b f)
        return (self.c + extra_exponent) / self.b


@dataclass(frozen=True)
class ChromaticLowpass:
    """Sum of two stretched exponentials, ``a1 exp(-b1 f^c1) + a2 exp(-b2 f^c2)``."""

    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float

    def __call__(self, f):
        f = np.asarray(f, dtype=np.float64)
        return self.a1 * np.exp(-self.b1 * f**self.c1) + self.a2 * np.exp(-self.b2 * f**self.c2)

    def peak_frequency(self, extra_exponent: float = 0.0) -> float:
        if extra_exponent == 0.0:
            return 0.0
        return _numeric_peak(lambda f: f**extra_exponent * self(f))


# Johnson & Fairchild (2001) chromatic CSF fits used by the iCAM / iDiff code.
RED_GREEN = ChromaticLowpass(109.1413, 0.0004, 3.4244, 93.5971, 0.0037, 2.1677)
BLUE_YELLOW = ChromaticLowpass(7.0328, 0.000004, 4.2582, 40.6910, 0.1039, 1.6487)


def _numeric_peak(fn: Callable, upper: float = 200.0) -> float:
    grid = np.linspace(0.0, upper, 20001)
    i = int(np.argmax(fn(grid)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi <= lo:
        return float(grid[i])
    res = minimize_scalar(lambda f: -fn(f), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


@dataclass(frozen=True)
class CsfModel:
    kind: Union[Movshon, ChromaticLowpass] = field(default_factory=Movshon)
    flatten: bool = False
    nss: bool = False
    peak_normalize: bool = True

    @property
    def peak_frequency(self) -> float:
        return self.kind.peak_frequency(1.0 / 3.0 if self.nss else 0.0)

    def evaluate(self, f):
        """CSF with NSS factor, flattening and peak normalisation applied, in that order."""
        base = nss_adapt(self) if self.nss else self.kind
        fn = _flattened(base, self.peak_frequency) if self.flatten else base
        v = fn(np.asarray(f, dtype=np.float64))
        if self.peak_normalize:
            v = v / float(base(self.peak_frequency))
        return v


def eval_csf(model: CsfModel, f):
    """Raw parametric value, before any modifier."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise CsfError("spatial frequency must be non-negative")
    v = model.kind(f)
    return float(v) if v.ndim == 0 else v


def _flattened(fn: Callable, f_max: float) -> Callable:
    peak = float(fn(f_max))

    def flat(f):
        f = np.asarray(f, dtype=np.float64)
        return np.where(f <= f_max, peak, fn(f))

    return flat


def flatten_csf(model: CsfModel) -> Callable:
    """Hold the curve at its peak value for every frequency below the peak."""
    base = nss_adapt(model) if model.nss else model.kind
    return _flattened(base, model.peak_frequency)


def nss_adapt(model: CsfModel) -> Callable:
    kind = model.kind

    def adapted(f):
        f = np.asarray(f, dtype=np.float64)
        return np.cbrt(f) * kind(f)

    return adapted


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """DFT bin frequencies of a ``height x width`` transform at ``ppd`` pixels per degree."""

    height: int
    width: int
    ppd: float

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise CsfError("grid dimensions must be positive")
        if not self.ppd > 0:
            raise CsfError("pixels per degree must be positive")

    @classmethod
    def for_image(cls, height: int, width: int, ppd: float) -> "FrequencyGrid":
        """Grid for the mirror-padded (doubled) transform of an image."""
        return cls(2 * height, 2 * width, ppd)

    @property
    def fx(self) -> np.ndarray:
        return np.fft.fftfreq(self.width)[None, :] * self.ppd

    @property
    def fy(self) -> np.ndarray:
        return np.fft.fftfreq(self.height)[:, None] * self.ppd

    @property
    def fr(self) -> np.ndarray:
        return np.hypot(self.fx, self.fy)

    @property
    def theta(self) -> np.ndarray:
        # atan2(0, 0) == 0, which is the DC convention we want
        return np.arctan2(self.fy, self.fx) * np.ones((self.height, self.width))

    @property
    def cos4theta(self) -> np.ndarray:
        """cos(4 theta) as 1 - 8 fx^2 fy^2 / fr^4, exactly even in each axis."""
        fx2, fy2 = self.fx**2, self.fy**2
        r4 = (fx2 + fy2) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            c = 1.0 - 8.0 * fx2 * fy2 / r4
        return np.where(r4 > 0, c, 1.0)


def _even_in_both_axes(g: np.ndarray) -> bool:
    flip_y = np.roll(g[::-1, :], 1, axis=0)
    flip_x = np.roll(g[:, ::-1], 1, axis=1)
    return bool(np.array_equal(g, flip_y) and np.array_equal(g, flip_x))


@dataclass(frozen=True, eq=False)
class FilterRaster:
    """Per-bin real gain for a DFT of shape ``gain.shape``."""

    gain: np.ndarray
    symmetric: bool = field(init=False)

    def __post_init__(self):
        g = np.array(self.gain, dtype=np.float64)
        if g.ndim != 2:
            raise CsfError("filter raster must be two-dimensional")
        if not np.all(np.isfinite(g)):
            raise CsfError("filter raster has non-finite gains")
        g.setflags(write=False)
        object.__setattr__(self, "gain", g)
        object.__setattr__(self, "symmetric", _even_in_both_axes(g))

    @property
    def shape(self) -> tuple[int, int]:
        return self.gain.shape

    def __mul__(self, other: "FilterRaster") -> "FilterRaster":
        return FilterRaster(self.gain * other.gain)


def oblique_frequency(grid: FrequencyGrid) -> np.ndarray:
    return grid.fr / (0.15 * grid.cos4theta + 0.85)


def edge_enhancement_raster(grid: FrequencyGrid, oblique: bool = True) -> FilterRaster:
    f = oblique_frequency(grid) if oblique else grid.fr
    return FilterRaster(1.0 + np.exp(-((f - 30.0) ** 2) / 36.0))


def build_csf_raster(model: CsfModel, grid: FrequencyGrid, oblique: bool = True) -> FilterRaster:
    f = oblique_frequency(grid) if oblique else grid.fr
    g = model.evaluate(f)
    if model.peak_normalize:
        # bandpass peaks rarely land on a bin; rescale so the raster itself peaks at 1
        g = g / g.max()
    return FilterRaster(g)


class Channel(str, enum.Enum):
    ACHROMATIC = "A"
    RED_GREEN = "C1"
    BLUE_YELLOW = "C2"


def default_models(nss: bool = False) -> dict[Channel, CsfModel]:
    """Flattened Movshon for the achromatic channel, lowpass chromatic CSFs otherwise.

    The NSS factor only modifies the achromatic curve; the chromatic curves are
    already lowpass and are left as they are.
    """
    return {
        Channel.ACHROMATIC: CsfModel(Movshon(), flatten=True, nss=nss),
        Channel.RED_GREEN: CsfModel(RED_GREEN),
        Channel.BLUE_YELLOW: CsfModel(BLUE_YELLOW),
    }


def sample_curve(model: CsfModel, f_max: float, n: int = 256) -> tuple[np.ndarray, np.ndarray]:
    f = np.linspace(0.0, f_max, n)
    return f, model.evaluate(f)
