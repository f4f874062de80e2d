"""
Color-space representations and conversions.

Images are ``(H, W, 3)`` float64 arrays, channels last. Every raster carries
a space tag so that 3x3 conversions can refuse mismatched inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

DELTA = 6.0 / 29.0


class ColorError(ValueError):
    """Raised for invalid whites, bad images and space-tag mismatches."""


class Space(str, enum.Enum):
    XYZ = "XYZ"
    LINEAR_SRGB = "LINEAR_SRGB"
    CAT02_LMS = "CAT02_LMS"
    CAT16_LMS = "CAT16_LMS"
    HPE_LMS = "HPE_LMS"
    HPE_LMS_C = "HPE_LMS_C"
    OKLAB_LMS = "OKLAB_LMS"
    OKLAB_LMS_C = "OKLAB_LMS_C"
    ACC = "ACC"
    IPT = "IPT"
    OKLAB = "OKLAB"
    CIELAB_LAB = "CIELAB_LAB"
    CIELAB_LCH = "CIELAB_LCH"
    IPT_LCH = "IPT_LCH"
    OKLAB_LCH = "OKLAB_LCH"


_CYLINDRICAL = {
    Space.CIELAB_LAB: Space.CIELAB_LCH,
    Space.IPT: Space.IPT_LCH,
    Space.OKLAB: Space.OKLAB_LCH,
}


def _as_image_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ColorError(f"expected an (H, W, 3) raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ColorError("image must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise ColorError("image contains non-finite values")
    return arr


@dataclass(frozen=True, eq=False)
class TristimulusImage:
    """CIE XYZ raster. ``data * luminance_scale`` is in cd/m^2.

    Non-negativity of Y is checked by :meth:`validate` rather than on
    construction, because intermediate filtered rasters may ring below zero.
    """

    data: np.ndarray
    luminance_scale: float = 1.0
    space: Space = field(default=Space.XYZ, init=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _as_image_array(self.data))
        if not np.isfinite(self.luminance_scale) or self.luminance_scale <= 0:
            raise ColorError("luminance_scale must be positive and finite")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def absolute(self) -> np.ndarray:
        """XYZ in cd/m^2."""
        return self.data * self.luminance_scale

    def validate(self) -> "TristimulusImage":
        if np.any(self.data[..., 1] < 0):
            raise ColorError("negative luminance in input image")
        return self


@dataclass(frozen=True, eq=False)
class OpponentImage:
    """Three-channel raster tagged with a non-XYZ space (opponent or cone)."""

    data: np.ndarray
    space: Space

    def __post_init__(self):
        object.__setattr__(self, "data", _as_image_array(self.data))
        object.__setattr__(self, "space", Space(self.space))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class WhitePoint:
    X: float
    Y: float
    Z: float

    def __post_init__(self):
        if not all(np.isfinite(v) and v > 0 for v in (self.X, self.Y, self.Z)):
            raise ColorError(f"white point components must be positive: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z], dtype=np.float64)

    def scaled(self, Y: float) -> "WhitePoint":
        """The same chromaticity with luminance ``Y``."""
        s = Y / self.Y
        return WhitePoint(self.X * s, Y, self.Z * s)


@dataclass(frozen=True, eq=False)
class ConversionMatrix:
    entries: np.ndarray
    from_space: Space
    to_space: Space

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.float64)
        if m.shape != (3, 3):
            raise ColorError("conversion matrix must be 3x3")
        if abs(np.linalg.det(m)) <= 1e-9:
            raise ColorError("conversion matrix is singular")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "from_space", Space(self.from_space))
        object.__setattr__(self, "to_space", Space(self.to_space))

    def inverse(self) -> "ConversionMatrix":
        return ConversionMatrix(np.linalg.inv(self.entries), self.to_space, self.from_space)

    def __matmul__(self, other: "ConversionMatrix") -> "ConversionMatrix":
        if other.to_space != self.from_space:
            raise ColorError(f"cannot compose {other.to_space} -> {self.from_space}")
        return ConversionMatrix(self.entries @ other.entries, other.from_space, self.to_space)


def parse_matrix_table(text: str) -> tuple[dict[str, ConversionMatrix], dict[str, WhitePoint]]:
    """Parse the plain-text matrix table (see ``data/matrices.txt``)."""
    matrices: dict[str, ConversionMatrix] = {}
    whites: dict[str, WhitePoint] = {}
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "matrix":
            _, name, src, dst = parts
            rows = [[float(v) for v in lines[i + k].split()] for k in (1, 2, 3)]
            matrices[name] = ConversionMatrix(np.array(rows), Space(src), Space(dst))
            i += 4
        elif parts[0] == "white":
            _, name, x, y, z = parts
            whites[name] = WhitePoint(float(x), float(y), float(z))
            i += 1
        else:
            raise ColorError(f"unrecognised matrix table line: {lines[i]!r}")
    return matrices, whites


@lru_cache(maxsize=None)
def _table():
    text = resources.files("edgediff").joinpath("data/matrices.txt").read_text()
    return parse_matrix_table(text)


def matrix(name: str) -> ConversionMatrix:
    try:
        return _table()[0][name]
    except KeyError:
        raise ColorError(f"unknown matrix {name!r}") from None


def white(name: str) -> WhitePoint:
    try:
        return _table()[1][name]
    except KeyError:
        raise ColorError(f"unknown illuminant {name!r}") from None


def apply_matrix(data: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Per-pixel ``m @ v`` on a channels-last array."""
    return np.einsum("...j,ij->...i", data, m)


def convert(img, mat: ConversionMatrix):
    if Space(img.space) != mat.from_space:
        raise ColorError(f"matrix expects {mat.from_space.value}, image is {Space(img.space).value}")
    out = apply_matrix(img.data, mat.entries)
    if mat.to_space == Space.XYZ:
        return TristimulusImage(out, getattr(img, "luminance_scale", 1.0))
    return OpponentImage(out, mat.to_space)


def lab_f(t):
    """CIELAB compressive nonlinearity; the branch test is on the ratio itself."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t > DELTA**3, np.cbrt(t), t / (3 * DELTA**2) + 4.0 / 29.0)


def xyz_to_cielab(img: TristimulusImage, white_point: WhitePoint) -> OpponentImage:
    wp = white_point.as_array()
    if np.any(wp <= 0):
        raise ColorError("white point components must be positive")
    f = lab_f(img.data / wp)
    L = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return OpponentImage(np.stack([L, a, b], axis=-1), Space.CIELAB_LAB)


def cylindrical(data: np.ndarray) -> np.ndarray:
    """(L, a, b) -> (L, C, h) with h = atan2(b, a) in [0, 2*pi)."""
    a, b = data[..., 1], data[..., 2]
    C = np.hypot(a, b)
    h = np.mod(np.arctan2(b, a), 2 * np.pi)
    # mod can round a tiny negative angle up to exactly 2*pi
    h = np.where(h >= 2 * np.pi, 0.0, h)
    return np.stack([data[..., 0], C, h], axis=-1)


def lab_to_lch(img: OpponentImage) -> OpponentImage:
    try:
        target = _CYLINDRICAL[img.space]
    except KeyError:
        raise ColorError(f"no cylindrical form for {img.space.value}") from None
    return OpponentImage(cylindrical(img.data), target)


def lch_to_lab(img: OpponentImage) -> OpponentImage:
    inverse = {v: k for k, v in _CYLINDRICAL.items()}
    if img.space not in inverse:
        raise ColorError(f"{img.space.value} is not a cylindrical space")
    L, C, h = np.moveaxis(img.data, -1, 0)
    return OpponentImage(np.stack([L, C * np.cos(h), C * np.sin(h)], axis=-1), inverse[img.space])


def signed_power(x, exponent):
    """sign(x) * |x| ** exponent, exponent may broadcast per pixel."""
    return np.sign(x) * np.abs(x) ** exponent


def compress(img: OpponentImage, exponent) -> OpponentImage:
    """Sign-preserving power on a cone-space raster (tags X_LMS -> X_LMS_C)."""
    if img.space not in (Space.HPE_LMS, Space.OKLAB_LMS):
        raise ColorError(f"compression expects HPE or OKLab LMS, got {img.space.value}")
    exponent = np.asarray(exponent, dtype=np.float64)
    if exponent.ndim == 2:
        exponent = exponent[..., None]
    return OpponentImage(signed_power(img.data, exponent), Space(img.space.value + "_C"))


def lms_to_ipt(img: OpponentImage) -> OpponentImage:
    return convert(img, matrix("lms_to_ipt"))


def lms_to_oklab(img: OpponentImage) -> OpponentImage:
    return convert(img, matrix("oklab_m2"))


def srgb_decode(v):
    """sRGB-encoded values in [0, 1] to linear light."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_encode(v):
    v = np.clip(np.asarray(v, dtype=np.float64), 0.0, 1.0)
    return np.where(v <= 0.0031308, 12.92 * v, 1.055 * v ** (1 / 2.4) - 0.055)


def linear_srgb_to_xyz(rgb: np.ndarray) -> np.ndarray:
    return apply_matrix(rgb, matrix("srgb_to_xyz").entries)


def xyz_to_linear_srgb(xyz: np.ndarray) -> np.ndarray:
    return apply_matrix(xyz, matrix("srgb_to_xyz").inverse().entries)
