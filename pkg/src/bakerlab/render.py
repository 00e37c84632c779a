"""Deterministic PPM rendering: escape-time images from classification grids
and phase portraits of the product function.

Output is P6 (binary) PPM only; bytes are a pure function of the inputs.
Phase portraits fold the argument to |arg|/pi for the hue so that images of
rectangles symmetric about the real axis are mirror-symmetric byte for byte
(the function commutes with conjugation).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import _kernels
from .dynamics import (
    Grid,
    STATUS_BOUNDED,
    STATUS_ESCAPED,
    axis_coords,
    resolve_threads,
    _row_bands,
)
from .params import ParamSeq


def _tri(i: np.ndarray) -> np.ndarray:
    # triangle wave on 0..255 -> 0..254..0, pure integer arithmetic
    i = i % 256
    return np.where(i < 128, 2 * i, 2 * (255 - i)).astype(np.int64)


def _palette_lut(name: str) -> np.ndarray:
    idx = np.arange(256, dtype=np.int64)
    if name == "ember":
        r = np.minimum(255, _tri(idx) + 64)
        g = (_tri(idx + 96) * 3) // 4
        b = _tri(idx + 176) // 3
    elif name == "gray":
        r = g = b = _tri(idx)
    else:
        raise ValueError(f"unknown palette {name!r}; available: ember, gray")
    lut = np.stack([r, g, b], axis=1)
    return lut.astype(np.uint8)


def ppm_bytes(pixels: np.ndarray) -> bytes:
    """Wrap an (ny, nx, 3) uint8 array as a binary P6 PPM."""
    ny, nx, depth = pixels.shape
    if depth != 3 or pixels.dtype != np.uint8:
        raise ValueError("pixels must be (ny, nx, 3) uint8")
    header = f"P6\n{nx} {ny}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def render_escape(grid: Grid, palette: str = "ember") -> bytes:
    """Escape-time coloring: palette cycles on the escape step, bounded cells
    are black, near-zero-translation cells are overlaid white."""
    lut = _palette_lut(palette)
    pixels = np.zeros((grid.ny, grid.nx, 3), dtype=np.uint8)
    esc = grid.status == STATUS_ESCAPED
    pixels[esc] = lut[grid.step[esc] % 256]
    pixels[grid.status >= 2] = 255  # near-zero-translation overlay
    return ppm_bytes(pixels)


def phase_shade(logmod: np.ndarray, arg: np.ndarray) -> np.ndarray:
    """RGB shading of a log-polar field: brightness squashes the log-modulus
    into (0, 1), hue runs over the folded argument."""
    v = 0.5 + np.arctan(logmod / 40.0) / math.pi  # -inf (a zero) -> 0
    hue = np.abs(arg) / math.pi  # folded: conjugate-symmetric
    h6 = np.clip(hue, 0.0, 1.0) * 5.0  # 5 sectors, red back to magenta-ish
    sector = np.floor(h6).astype(np.int64)
    frac = h6 - sector
    q = 1.0 - frac
    ones = np.ones_like(frac)
    zeros = np.zeros_like(frac)
    # value-scaled HSV with full saturation, per sector
    r = np.choose(sector % 6, [ones, q, zeros, zeros, frac, ones])
    g = np.choose(sector % 6, [frac, ones, ones, q, zeros, zeros])
    b = np.choose(sector % 6, [zeros, zeros, frac, ones, ones, q])
    rgb = np.stack([r, g, b], axis=-1) * v[..., None] * 255.0
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def render_phase(rect: tuple[complex, complex], nx: int, ny: int,
                 p: ParamSeq, threads: Optional[int] = None,
                 backend: Optional[str] = None) -> bytes:
    """Phase portrait of the product function over a rectangle."""
    if nx < 1 or ny < 1:
        raise ValueError("image dimensions must be >= 1")
    z0, z1 = complex(rect[0]), complex(rect[1])
    xs = axis_coords(min(z0.real, z1.real), max(z0.real, z1.real), nx)
    ys = axis_coords(min(z0.imag, z1.imag), max(z0.imag, z1.imag), ny)
    pixels = np.empty((ny, nx, 3), dtype=np.uint8)
    nthreads = resolve_threads(threads)

    def run_band(band):
        a, b = band
        gy, gx = np.meshgrid(ys[a:b], xs, indexing="ij")
        code, lm, ag = _kernels.h_field(gx.ravel(), gy.ravel(), p,
                                        backend=backend)
        lm = lm.reshape(b - a, nx)
        ag = ag.reshape(b - a, nx)
        pixels[a:b] = phase_shade(lm, ag)

    bands = _row_bands(ny, nthreads)
    if nthreads == 1 or len(bands) == 1:
        for band in bands:
            run_band(band)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(run_band, bands))
    return ppm_bytes(pixels)
