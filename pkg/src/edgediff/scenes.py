"""
Procedural HDR test scenes.

Each scene is built in linear sRGB radiance (cd/m^2) from flat-shaded shapes
with soft edges, light sources several decades above the surround, and a
little multiplicative texture. They stand in for photographic HDR captures:
saturated surfaces for desaturation sweeps and 4-6 decades of dynamic range
for contrast sweeps.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .color import TristimulusImage, linear_srgb_to_xyz

_LUMA = np.array([0.2126729, 0.7151522, 0.0721750])


def _hue(rgb) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    return rgb / float(_LUMA @ rgb)


class _Canvas:
    def __init__(self, size: int, seed: int):
        self.n = size
        self.rng = np.random.default_rng(seed)
        y, x = np.mgrid[0:size, 0:size]
        self.u = (x + 0.5) / size
        self.v = (y + 0.5) / size
        self.img = np.zeros((size, size, 3))
        self.edge = 1.0 / size

    def _soft(self, d):
        # d is a signed distance (negative inside), in image-width units
        return np.clip(0.5 - d / self.edge, 0.0, 1.0)

    def rect(self, x0, y0, x1, y1):
        dx = np.maximum(x0 - self.u, self.u - x1)
        dy = np.maximum(y0 - self.v, self.v - y1)
        return self._soft(np.maximum(dx, dy))

    def ellipse(self, cx, cy, rx, ry):
        r = np.hypot((self.u - cx) / rx, (self.v - cy) / ry)
        return self._soft((r - 1.0) * min(rx, ry))

    def paint(self, mask, rgb, lum):
        lum = np.asarray(lum, dtype=np.float64)
        colour = _hue(rgb) * (lum[..., None] if lum.ndim else lum)
        self.img = self.img * (1.0 - mask[..., None]) + colour * mask[..., None]

    def glow(self, cx, cy, radius, rgb, peak):
        r2 = (self.u - cx) ** 2 + (self.v - cy) ** 2
        self.img += _hue(rgb) * (peak * np.exp(-r2 / (2 * radius**2)))[..., None]

    def texture(self, strength=0.08, smooth=1.0):
        noise = ndimage.gaussian_filter(self.rng.standard_normal((self.n, self.n)), smooth)
        noise /= noise.std() + 1e-12
        self.img *= np.exp(strength * noise)[..., None]

    def result(self) -> TristimulusImage:
        rgb = np.maximum(self.img, 1e-4)
        return TristimulusImage(linear_srgb_to_xyz(rgb))


def night_city(size: int = 256, seed: int = 1) -> TristimulusImage:
    c = _Canvas(size, seed)
    rng = c.rng
    sky = np.clip(c.v / 0.7, 0, 1)
    c.paint(np.ones((size, size)), [0.15, 0.2, 0.6], 0.3 + 1.5 * sky**2)
    c.glow(0.5, 0.75, 0.25, [1.0, 0.5, 0.2], 3.0)
    palette = [[0.7, 0.15, 0.1], [0.1, 0.55, 0.5], [0.8, 0.6, 0.15], [0.25, 0.3, 0.7],
               [0.4, 0.5, 0.15], [0.6, 0.25, 0.55]]
    x = 0.0
    while x < 1.0:
        w = rng.uniform(0.08, 0.18)
        top = rng.uniform(0.15, 0.5)
        hue = palette[rng.integers(len(palette))]
        c.paint(c.rect(x, top, x + w, 0.88), hue, rng.uniform(2.0, 9.0))
        rows = np.arange(top + 0.03, 0.84, 0.05)
        cols = np.arange(x + 0.015, x + w - 0.025, 0.035)
        for wy in rows:
            for wx in cols:
                if rng.random() < 0.45:
                    warm = [1.0, rng.uniform(0.55, 0.8), rng.uniform(0.2, 0.4)]
                    c.paint(c.rect(wx, wy, wx + 0.018, wy + 0.025), warm, rng.uniform(150, 900))
        x += w + rng.uniform(0.0, 0.02)
    c.paint(c.rect(0.0, 0.88, 1.0, 1.0), [0.3, 0.3, 0.32], 1.2)
    for lx in (0.15, 0.5, 0.82):
        c.paint(c.rect(lx - 0.004, 0.62, lx + 0.004, 0.9), [0.2, 0.2, 0.2], 0.8)
        c.glow(lx, 0.61, 0.05, [1.0, 0.75, 0.4], 300.0)
        c.paint(c.ellipse(lx, 0.61, 0.012, 0.012), [1.0, 0.85, 0.6], 20000.0)
    for cx in rng.uniform(0.05, 0.95, 4):
        c.paint(c.ellipse(cx, 0.94, 0.008, 0.005), [1.0, 0.05, 0.03], 3000.0)
        c.paint(c.ellipse(cx + 0.05, 0.94, 0.008, 0.005), [0.9, 0.95, 1.0], 8000.0)
    c.texture(0.1)
    return c.result()


def window_interior(size: int = 256, seed: int = 2) -> TristimulusImage:
    c = _Canvas(size, seed)
    c.paint(np.ones((size, size)), [0.85, 0.7, 0.5], 12.0 + 18.0 * (1 - c.u))
    c.paint(c.rect(0.0, 0.72, 1.0, 1.0), [0.55, 0.32, 0.15], 6.0 + 4.0 * c.v)
    # window with daylight view
    c.paint(c.rect(0.52, 0.08, 0.95, 0.55), [0.95, 0.95, 0.95], 35.0)
    c.paint(c.rect(0.55, 0.11, 0.92, 0.52), [0.35, 0.55, 1.0], 3500.0 + 3000.0 * (1 - c.v))
    for cx, cy, r in ((0.6, 0.45, 0.08), (0.72, 0.42, 0.1), (0.86, 0.47, 0.07)):
        c.paint(c.ellipse(cx, cy, r, r * 0.9) * c.rect(0.55, 0.11, 0.92, 0.52),
                [0.15, 0.6, 0.1], 900.0)
    c.paint(c.rect(0.725, 0.08, 0.745, 0.55), [0.95, 0.95, 0.95], 35.0)
    c.paint(c.rect(0.52, 0.3, 0.95, 0.315), [0.95, 0.95, 0.95], 35.0)
    # furniture and objects
    c.paint(c.rect(0.05, 0.55, 0.45, 0.8), [0.75, 0.08, 0.08], 7.0)
    c.paint(c.rect(0.07, 0.48, 0.43, 0.58), [0.65, 0.06, 0.08], 5.0)
    c.paint(c.ellipse(0.6, 0.68, 0.04, 0.08), [0.1, 0.2, 0.85], 6.0)
    for cx, cy in ((0.82, 0.6), (0.86, 0.56), (0.79, 0.55), (0.84, 0.64)):
        c.paint(c.ellipse(cx, cy, 0.035, 0.03), [0.1, 0.55, 0.1], 5.0)
    c.paint(c.rect(0.8, 0.66, 0.88, 0.78), [0.7, 0.4, 0.2], 4.0)
    c.paint(c.rect(0.2, 0.2, 0.3, 0.3), [1.0, 0.85, 0.25], 60.0)
    c.glow(0.25, 0.32, 0.03, [1.0, 0.8, 0.5], 2000.0)
    c.paint(c.ellipse(0.25, 0.32, 0.01, 0.01), [1.0, 0.9, 0.7], 15000.0)
    # sun patch on the floor
    c.paint(c.rect(0.5, 0.8, 0.85, 0.93) * 0.8, [1.0, 0.85, 0.6], 1500.0)
    c.texture(0.08)
    return c.result()


def sunset_harbor(size: int = 256, seed: int = 3) -> TristimulusImage:
    c = _Canvas(size, seed)
    rng = c.rng
    t = np.clip(c.v / 0.55, 0, 1)
    sky_rgb = np.stack([0.35 + 0.65 * t, 0.15 + 0.35 * t, 0.55 - 0.4 * t], axis=-1)
    sky_lum = 60.0 * 40.0**t
    c.img = sky_rgb / (sky_rgb @ _LUMA)[..., None] * sky_lum[..., None]
    for _ in range(5):
        cx, cy = rng.uniform(0.1, 0.9), rng.uniform(0.08, 0.4)
        c.paint(c.ellipse(cx, cy, rng.uniform(0.08, 0.18), 0.025), [1.0, 0.45, 0.6],
                rng.uniform(300, 1200))
    c.glow(0.62, 0.55, 0.08, [1.0, 0.6, 0.25], 8000.0)
    c.paint(c.ellipse(0.62, 0.54, 0.03, 0.03), [1.0, 0.9, 0.7], 60000.0)
    c.paint(c.rect(0.0, 0.46, 0.35, 0.57) * c.ellipse(0.15, 0.57, 0.3, 0.12), [0.15, 0.3, 0.12], 2.0)
    water = c.rect(0.0, 0.57, 1.0, 1.0)
    ripple = 0.6 + 0.4 * np.sin(2 * np.pi * (c.v * 60 + 0.3 * np.sin(2 * np.pi * c.u * 5)))
    c.paint(water, [0.2, 0.35, 0.6], 40.0 + 200.0 * (1 - c.v) * ripple)
    glint = np.exp(-((c.u - 0.62) ** 2) / (2 * 0.02**2)) * (ripple > 0.85) * water
    c.img += _hue([1.0, 0.7, 0.35]) * (3000.0 * glint)[..., None]
    for bx, hue in ((0.18, [0.85, 0.1, 0.08]), (0.42, [0.1, 0.25, 0.8]), (0.8, [0.9, 0.75, 0.1])):
        c.paint(c.rect(bx - 0.07, 0.66, bx + 0.07, 0.72), hue, 25.0)
        c.paint(c.rect(bx - 0.004, 0.5, bx + 0.004, 0.66), [0.3, 0.25, 0.2], 3.0)
        c.paint(c.rect(bx - 0.05, 0.6, bx + 0.05, 0.66), [0.95, 0.95, 0.9], 60.0)
    c.texture(0.06)
    return c.result()


SCENES = {
    "night_city": night_city,
    "window_interior": window_interior,
    "sunset_harbor": sunset_harbor,
}


def make_scenes(size: int = 256) -> dict[str, TristimulusImage]:
    return {name: fn(size) for name, fn in SCENES.items()}
