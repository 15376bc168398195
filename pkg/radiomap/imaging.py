"""Heatmap rendering of rasters: grayscale PGM always, colour PNG with Pillow and matplotlib."""
import io
from typing import Optional, Tuple

import numpy as np

from .conf import get_setting
from .exceptions import ConfigError
from .geo_grid import Raster, raster_stats

NODATA_RGB = (255, 255, 255)


def parse_scale(text: str) -> Tuple[float, float]:
    """``"min:max"`` in raster units; min must be below max."""
    try:
        low, high = (float(part) for part in text.split(':'))
    except ValueError as exc:
        raise ConfigError(f"scale must look like MIN:MAX, got {text!r}") from exc
    if not low < high:
        raise ConfigError(f"scale minimum {low} must be below maximum {high}")
    return low, high


def resolve_scale(raster: Raster, scale: Optional[Tuple[float, float]]) -> Tuple[float, float]:
    if scale is not None:
        low, high = scale
        if not low < high:
            raise ConfigError(f"scale minimum {low} must be below maximum {high}")
        return low, high
    stats = raster_stats(raster)
    if stats.min is None:
        # nothing to scale; every pixel is no-data
        return 0.0, 1.0
    if stats.min == stats.max:
        return stats.min - 0.5, stats.max + 0.5
    return stats.min, stats.max


def normalised(raster: Raster, low: float, high: float) -> np.ndarray:
    """Values mapped to [0, 1] and flipped north-up; NaN where there is no data."""
    t = np.clip((raster.values - low) / (high - low), 0.0, 1.0)
    return np.where(raster.populated, t, np.nan)[::-1]


def gray_levels(raster: Raster, low: float, high: float) -> np.ndarray:
    """8-bit levels: data maps onto 1..255, no-data takes the configured gray."""
    t = normalised(raster, low, high)
    levels = np.full(t.shape, int(get_setting('NODATA_GRAY')), dtype=np.uint8)
    present = np.isfinite(t)
    levels[present] = (1 + np.floor(254.0 * t[present] + 0.5)).astype(np.uint8)
    return levels


def render_pgm(raster: Raster, scale: Optional[Tuple[float, float]] = None) -> bytes:
    low, high = resolve_scale(raster, scale)
    levels = gray_levels(raster, low, high)
    header = f"P5\n{raster.grid.n_cols} {raster.grid.n_rows}\n255\n".encode('ascii')
    return header + levels.tobytes()


def render_png(raster: Raster, scale: Optional[Tuple[float, float]] = None,
               colormap: Optional[str] = None) -> bytes:
    try:
        import matplotlib
        from PIL import Image
    except ImportError as exc:
        raise ConfigError(f"PNG output needs Pillow and matplotlib ({exc}); write a .pgm instead") from exc
    name = colormap or get_setting('PNG_COLORMAP')
    try:
        cmap = matplotlib.colormaps[name]
    except KeyError as exc:
        raise ConfigError(f"unknown colormap {name!r}") from exc
    low, high = resolve_scale(raster, scale)
    t = normalised(raster, low, high)
    rgb = np.empty(t.shape + (3,), dtype=np.uint8)
    rgb[...] = NODATA_RGB
    present = np.isfinite(t)
    rgb[present] = np.round(cmap(t[present])[:, :3] * 255.0).astype(np.uint8)
    buffer = io.BytesIO()
    Image.fromarray(rgb).save(buffer, format='PNG')
    return buffer.getvalue()


def render(raster: Raster, fmt: str, scale=None) -> bytes:
    if fmt == 'pgm':
        return render_pgm(raster, scale)
    if fmt == 'png':
        return render_png(raster, scale)
    raise ConfigError(f"unsupported image format {fmt!r}; use .pgm or .png")
