"""Reading and writing images and difference maps."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .color import ColorError, TristimulusImage, linear_srgb_to_xyz, srgb_decode, xyz_to_linear_srgb

MAX_PIXELS = 1 << 28

_SUFFIX_FORMAT = {
    ".png": "srgb8", ".jpg": "srgb8", ".jpeg": "srgb8", ".bmp": "srgb8",
    ".tif": "srgb8", ".tiff": "srgb8", ".ppm": "srgb8",
    ".pfm": "pfm",
    ".hdr": "rgbe", ".pic": "rgbe", ".rgbe": "rgbe",
}


class ImageFormatError(ColorError):
    pass


def infer_format(path) -> str:
    fmt = _SUFFIX_FORMAT.get(Path(path).suffix.lower())
    if fmt is None:
        raise ImageFormatError(f"cannot infer image format from {path}")
    return fmt


def _check_size(h: int, w: int):
    if h < 1 or w < 1 or h * w > MAX_PIXELS:
        raise ImageFormatError(f"unsupported image dimensions {w}x{h}")


def read_pfm(path) -> np.ndarray:
    """Portable float map as (H, W) or (H, W, 3) float32, top row first."""
    with open(path, "rb") as fh:
        kind = fh.readline().strip()
        if kind not in (b"PF", b"Pf"):
            raise ImageFormatError(f"{path} is not a portable float map")
        try:
            dims = fh.readline().split()
            while not dims:
                dims = fh.readline().split()
            w, h = int(dims[0]), int(dims[1])
            scale = float(fh.readline().strip())
        except (ValueError, IndexError):
            raise ImageFormatError(f"{path} has a malformed header") from None
        _check_size(h, w)
        dtype = "<f4" if scale < 0 else ">f4"
        channels = 3 if kind == b"PF" else 1
        payload = fh.read()
    if len(payload) < 4 * w * h * channels:
        raise ImageFormatError(f"{path} is truncated")
    raw = np.frombuffer(payload, dtype=dtype, count=w * h * channels)
    shape = (h, w, 3) if channels == 3 else (h, w)
    return np.flipud(raw.reshape(shape)).astype(np.float32)


def write_pfm(path, data: np.ndarray):
    arr = np.asarray(data, dtype=np.float32)
    if arr.ndim == 2:
        kind = b"Pf"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        kind = b"PF"
    else:
        raise ImageFormatError("PFM holds one or three channels")
    h, w = arr.shape[:2]
    endian = -1.0 if sys.byteorder == "little" else 1.0
    with open(path, "wb") as fh:
        fh.write(kind + b"\n")
        fh.write(f"{w} {h}\n".encode())
        fh.write(f"{endian}\n".encode())
        fh.write(np.ascontiguousarray(np.flipud(arr)).tobytes())


def _read_rgbe(path) -> np.ndarray:
    import cv2

    bgr = cv2.imread(str(path), cv2.IMREAD_ANYDEPTH | cv2.IMREAD_COLOR)
    if bgr is None:
        raise ImageFormatError(f"could not decode Radiance file {path}")
    return bgr[..., ::-1].astype(np.float64)


def _write_rgbe(path, rgb: np.ndarray):
    import cv2

    if not cv2.imwrite(str(path), np.ascontiguousarray(rgb[..., ::-1], dtype=np.float32)):
        raise ImageFormatError(f"could not write Radiance file {path}")


def load_image(path, fmt: str | None = None, luminance_scale: float = 100.0) -> TristimulusImage:
    """Load an image as XYZ.

    8-bit files are treated as sRGB-encoded and linearised; float files hold
    linear sRGB primaries. ``luminance_scale`` maps a stored value of 1 to cd/m^2.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    fmt = fmt or infer_format(path)
    if fmt == "srgb8":
        from PIL import Image

        with Image.open(path) as im:
            _check_size(im.height, im.width)
            if im.mode not in ("RGB", "L", "P", "RGBA", "LA"):
                raise ImageFormatError(f"{path}: expected an 8-bit image, got mode {im.mode}")
            rgb8 = np.asarray(im.convert("RGB"), dtype=np.float64)
        rgb = srgb_decode(rgb8 / 255.0)
    elif fmt == "pfm":
        rgb = read_pfm(path).astype(np.float64)
        if rgb.ndim == 2:
            rgb = np.repeat(rgb[..., None], 3, axis=2)
    elif fmt == "rgbe":
        rgb = _read_rgbe(path)
    else:
        raise ImageFormatError(f"unknown image format {fmt!r}")
    _check_size(*rgb.shape[:2])
    return TristimulusImage(linear_srgb_to_xyz(rgb), luminance_scale=luminance_scale).validate()


def save_image(img: TristimulusImage, path, fmt: str | None = None):
    """Write linear sRGB in cd/m^2 / ``img.luminance_scale`` units (float formats only)."""
    fmt = fmt or infer_format(path)
    rgb = xyz_to_linear_srgb(img.data)
    if fmt == "pfm":
        write_pfm(path, rgb)
    elif fmt == "rgbe":
        _write_rgbe(path, np.maximum(rgb, 0.0))
    else:
        raise ImageFormatError("save_image writes float formats (pfm, rgbe) only")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".range.txt")


def save_map(values, path):
    """Save a single-channel map.

    ``.pfm`` stores float32 exactly. ``.png`` stores 16-bit grayscale spanning
    [min, max], with the range written to a ``<stem>.range.txt`` sidecar.
    """
    path = Path(path)
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ImageFormatError("maps are single-channel")
    if path.suffix.lower() == ".pfm":
        write_pfm(path, v)
        return path
    if path.suffix.lower() != ".png":
        raise ImageFormatError("maps are written as .png (16-bit) or .pfm")
    from PIL import Image

    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    q = np.zeros(v.shape) if span == 0 else (v - lo) / span
    Image.fromarray(np.round(q * 65535).astype(np.uint16)).save(path)
    sidecar_path(path).write_text(f"min {lo!r}\nmax {hi!r}\n")
    return path


def load_map(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pfm":
        m = read_pfm(path)
        return m if m.ndim == 2 else m[..., 0]
    from PIL import Image

    with Image.open(path) as im:
        q = np.asarray(im, dtype=np.float64)
    info = dict(line.split() for line in sidecar_path(path).read_text().splitlines() if line)
    lo, hi = float(info["min"]), float(info["max"])
    return lo + q / 65535.0 * (hi - lo)
