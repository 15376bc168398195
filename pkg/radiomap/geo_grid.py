"""
Coordinate projection, grid definition, binning and raster aggregation.

Positions are handled in a local metric frame (x east, y north, metres) obtained
with an equirectangular projection around an origin; coverage maps are rasters of
square bins over that frame. Bin lower edges are inclusive and upper edges
exclusive, so every in-extent point belongs to exactly one bin.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .exceptions import OutOfBoundsError, ValidationError

logger = logging.getLogger(__name__)

EARTH_RADIUS_M = 6371000.0
MAX_LAT_OFFSET_DEG = 1.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 position in degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
            raise ValidationError(f"lat {self.lat!r} outside [-90, 90]")
        if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
            raise ValidationError(f"lon {self.lon!r} outside [-180, 180]")


@dataclass(frozen=True)
class LocalPoint:
    """Metres east (x) and north (y) of the projection origin."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"local point ({self.x!r}, {self.y!r}) is not finite")

    def as_array(self):
        return np.array([self.x, self.y], dtype=float)


def as_xy(points) -> np.ndarray:
    """Coerce LocalPoints, (x, y) pairs or an (n, 2) array into an (n, 2) float array."""
    if isinstance(points, np.ndarray):
        xy = np.asarray(points, dtype=float)
    else:
        points = list(points)
        if not points:
            return np.empty((0, 2), dtype=float)
        if isinstance(points[0], LocalPoint):
            xy = np.array([[p.x, p.y] for p in points], dtype=float)
        else:
            xy = np.asarray(points, dtype=float)
    if xy.size == 0:
        return np.empty((0, 2), dtype=float)
    if xy.ndim == 1:
        xy = xy.reshape(1, 2)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValidationError(f"expected (n, 2) coordinates, got shape {xy.shape}")
    return xy


def project(p: GeoPoint, origin: GeoPoint) -> LocalPoint:
    """Equirectangular projection of ``p`` into the local frame centred on ``origin``."""
    x, y = project_arrays(np.array([p.lat]), np.array([p.lon]), origin)
    return LocalPoint(float(x[0]), float(y[0]))


def project_arrays(lat, lon, origin: GeoPoint):
    """Vectorised :func:`project`; returns (x, y) arrays in metres."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    if np.any(~np.isfinite(lat)) or np.any(np.abs(lat) > 90.0):
        raise ValidationError("latitude outside [-90, 90]")
    if np.any(~np.isfinite(lon)) or np.any(np.abs(lon) > 180.0):
        raise ValidationError("longitude outside [-180, 180]")
    if np.any(np.abs(lat - origin.lat) >= MAX_LAT_OFFSET_DEG):
        raise ValidationError(
            f"latitude more than {MAX_LAT_OFFSET_DEG} degree from origin {origin.lat}"
        )
    scale = math.pi / 180.0 * EARTH_RADIUS_M
    x = (lon - origin.lon) * scale * math.cos(math.radians(origin.lat))
    y = (lat - origin.lat) * scale
    return x, y


@dataclass(frozen=True)
class GridSpec:
    """A regular grid of square bins anchored at its southwest corner."""

    origin: LocalPoint = field(default_factory=lambda: LocalPoint(0.0, 0.0))
    bin_size: float = 1.0
    n_cols: int = 1
    n_rows: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.bin_size) and self.bin_size > 0):
            raise ValidationError(f"bin_size must be > 0, got {self.bin_size!r}")
        if int(self.n_cols) != self.n_cols or self.n_cols < 1:
            raise ValidationError(f"n_cols must be >= 1, got {self.n_cols!r}")
        if int(self.n_rows) != self.n_rows or self.n_rows < 1:
            raise ValidationError(f"n_rows must be >= 1, got {self.n_rows!r}")
        object.__setattr__(self, 'n_cols', int(self.n_cols))
        object.__setattr__(self, 'n_rows', int(self.n_rows))

    @classmethod
    def from_extent(cls, origin: LocalPoint, width_m: float, height_m: float, bin_size: float = 1.0):
        """Smallest grid of ``bin_size`` bins covering ``width_m`` x ``height_m``."""
        n_cols = max(1, int(math.ceil(width_m / bin_size - 1e-9)))
        n_rows = max(1, int(math.ceil(height_m / bin_size - 1e-9)))
        return cls(origin=origin, bin_size=bin_size, n_cols=n_cols, n_rows=n_rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def width(self) -> float:
        return self.n_cols * self.bin_size

    @property
    def height(self) -> float:
        return self.n_rows * self.bin_size

    def contains(self, p: LocalPoint) -> bool:
        _, _, inside = bin_indices(self, as_xy([p]))
        return bool(inside[0])

    def bin_center(self, col: int, row: int) -> LocalPoint:
        return LocalPoint(
            self.origin.x + (col + 0.5) * self.bin_size,
            self.origin.y + (row + 0.5) * self.bin_size,
        )

    def bin_centers(self) -> np.ndarray:
        """Centres of all bins as an (n_rows * n_cols, 2) array, row-major from row 0."""
        xs = self.origin.x + (np.arange(self.n_cols) + 0.5) * self.bin_size
        ys = self.origin.y + (np.arange(self.n_rows) + 0.5) * self.bin_size
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def to_dict(self):
        return {
            'origin_x': self.origin.x,
            'origin_y': self.origin.y,
            'bin_size': self.bin_size,
            'n_cols': self.n_cols,
            'n_rows': self.n_rows,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            origin=LocalPoint(float(data.get('origin_x', 0.0)), float(data.get('origin_y', 0.0))),
            bin_size=float(data.get('bin_size', 1.0)),
            n_cols=data['n_cols'],
            n_rows=data['n_rows'],
        )


def bin_indices(grid: GridSpec, xy: np.ndarray):
    """Vectorised binning: returns (cols, rows, inside) for an (n, 2) coordinate array."""
    xy = as_xy(xy)
    cols = np.floor((xy[:, 0] - grid.origin.x) / grid.bin_size).astype(np.int64)
    rows = np.floor((xy[:, 1] - grid.origin.y) / grid.bin_size).astype(np.int64)
    inside = (cols >= 0) & (cols < grid.n_cols) & (rows >= 0) & (rows < grid.n_rows)
    return cols, rows, inside


def bin_index(grid: GridSpec, p: LocalPoint) -> Tuple[int, int]:
    """(col, row) of the bin holding ``p``; raises OutOfBoundsError outside the extent."""
    cols, rows, inside = bin_indices(grid, as_xy([p]))
    col, row = int(cols[0]), int(rows[0])
    if not inside[0]:
        raise OutOfBoundsError(col, row, grid)
    return col, row


class Reducer(str, Enum):
    MEAN = 'mean'
    MAX = 'max'


@dataclass(frozen=True, eq=False)
class Raster:
    """Per-bin values (NaN = no data) and sample counts over a grid.

    ``values`` and ``counts`` are (n_rows, n_cols) arrays, row 0 being the
    southernmost row. Both are made read-only on construction.
    """

    grid: GridSpec
    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        counts = np.array(self.counts, dtype=np.int64)
        if values.shape != self.grid.shape or counts.shape != self.grid.shape:
            raise ValidationError(
                f"raster arrays must have shape {self.grid.shape}, "
                f"got values {values.shape} and counts {counts.shape}"
            )
        if np.any(counts < 0):
            raise ValidationError("raster counts must be non-negative")
        if np.any(np.isfinite(values) & (counts == 0)):
            raise ValidationError("a bin with count 0 cannot hold a value")
        values[counts == 0] = np.nan
        values.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'counts', counts)

    @classmethod
    def empty(cls, grid: GridSpec):
        return cls(grid, np.full(grid.shape, np.nan), np.zeros(grid.shape, dtype=np.int64))

    @classmethod
    def from_values(cls, grid: GridSpec, values):
        """Raster with count 1 on every bin holding a finite value."""
        values = np.asarray(values, dtype=float).reshape(grid.shape)
        counts = np.isfinite(values).astype(np.int64)
        return cls(grid, values, counts)

    @property
    def populated(self) -> np.ndarray:
        return self.counts > 0

    def value_at(self, col: int, row: int) -> Optional[float]:
        value = self.values[row, col]
        return float(value) if np.isfinite(value) else None


@dataclass(frozen=True)
class AggregateResult:
    raster: Raster
    dropped: int


def aggregate(samples: Iterable[Tuple[LocalPoint, float]], grid: GridSpec,
              reducer=Reducer.MEAN) -> AggregateResult:
    """Bin ``(LocalPoint, value)`` samples into a raster.

    Samples outside the extent are dropped and counted in ``dropped``.
    """
    samples = list(samples)
    xy = as_xy([p for p, _ in samples])
    values = np.array([v for _, v in samples], dtype=float)
    return aggregate_xy(xy, values, grid, reducer)


def aggregate_xy(xy, values, grid: GridSpec, reducer=Reducer.MEAN) -> AggregateResult:
    """Array form of :func:`aggregate`."""
    reducer = Reducer(reducer)
    xy = as_xy(xy)
    values = np.asarray(values, dtype=float).ravel()
    if len(values) != len(xy):
        raise ValidationError(f"{len(xy)} points but {len(values)} values")
    if not np.all(np.isfinite(values)):
        raise ValidationError("sample values must be finite")

    cols, rows, inside = bin_indices(grid, xy)
    dropped = int(np.count_nonzero(~inside))
    if dropped:
        logger.info("Dropped %d of %d samples outside the grid extent", dropped, len(values))

    flat = rows[inside] * grid.n_cols + cols[inside]
    kept = values[inside]
    counts = np.bincount(flat, minlength=grid.size)
    reduced = np.full(grid.size, np.nan)
    populated = counts > 0
    if reducer is Reducer.MEAN:
        sums = np.bincount(flat, weights=kept, minlength=grid.size)
        reduced[populated] = sums[populated] / counts[populated]
    else:
        highest = np.full(grid.size, -np.inf)
        np.maximum.at(highest, flat, kept)
        reduced[populated] = highest[populated]

    raster = Raster(grid, reduced.reshape(grid.shape), counts.reshape(grid.shape))
    return AggregateResult(raster=raster, dropped=dropped)


@dataclass(frozen=True)
class RasterStats:
    min: Optional[float]
    max: Optional[float]
    mean: Optional[float]
    populated_fraction: float


def raster_stats(r: Raster) -> RasterStats:
    """Statistics over the populated bins of ``r``."""
    values = r.values[r.populated]
    fraction = values.size / r.grid.size
    if values.size == 0:
        return RasterStats(None, None, None, 0.0)
    return RasterStats(
        min=float(values.min()),
        max=float(values.max()),
        mean=float(values.mean()),
        populated_fraction=fraction,
    )


def coverage_fraction(r: Raster, threshold: float) -> float:
    """Fraction of populated bins whose value is at least ``threshold``."""
    values = r.values[r.populated]
    if values.size == 0:
        return 0.0
    return float(np.count_nonzero(values >= threshold) / values.size)


def grid_for_points(points: Sequence, bin_size: float = 1.0, margin: float = 0.0) -> GridSpec:
    """Grid covering the bounding box of ``points`` plus ``margin`` metres on each side."""
    xy = as_xy(points)
    if len(xy) == 0:
        raise ValidationError("cannot derive a grid extent from zero points")
    lo = xy.min(axis=0) - margin
    hi = xy.max(axis=0) + margin
    origin = LocalPoint(float(math.floor(lo[0] / bin_size) * bin_size),
                        float(math.floor(lo[1] / bin_size) * bin_size))
    # +1 bin so the maximum point falls inside the exclusive upper edge
    n_cols = int(math.floor((hi[0] - origin.x) / bin_size)) + 1
    n_rows = int(math.floor((hi[1] - origin.y) / bin_size)) + 1
    grid = GridSpec(origin=origin, bin_size=bin_size, n_cols=n_cols, n_rows=n_rows)
    logger.info(
        "Auto extent: origin (%.2f, %.2f) m, %d x %d bins of %.2f m",
        origin.x, origin.y, n_cols, n_rows, bin_size,
    )
    return grid
