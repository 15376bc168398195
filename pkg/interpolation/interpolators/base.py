"""Shared pieces of the fitted-model contract."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from radiomap.conf import get_setting
from radiomap.geo_grid import as_xy

from .config import InterpolatorConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Immutable result of ``fit``; predictions depend only on (state, query)."""

    config: InterpolatorConfig
    bbox_lo: np.ndarray
    bbox_hi: np.ndarray

    def predict(self, queries) -> np.ndarray:
        xy = as_xy(queries)
        if len(xy) == 0:
            return np.empty(0)
        return np.asarray(self._predict(xy), dtype=float)

    def _predict(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def extrapolation_mask(self, queries, factor=None) -> np.ndarray:
        """True where a query lies farther than ``factor`` bounding-box diagonals outside the training box."""
        if factor is None:
            factor = get_setting('EXTRAPOLATION_DIAGONALS')
        xy = as_xy(queries)
        diagonal = float(np.hypot(*(self.bbox_hi - self.bbox_lo)))
        outside = np.maximum(self.bbox_lo - xy, 0.0) + np.maximum(xy - self.bbox_hi, 0.0)
        return np.hypot(outside[:, 0], outside[:, 1]) > factor * diagonal


def nearest_neighbors(tree: cKDTree, n_points: int, xy: np.ndarray, k: int):
    """k nearest training points per query, ordered by distance then by lowest index.

    Returns (distances, indices), both shaped (len(xy), min(k, n_points)).
    """
    k = min(k, n_points)
    # over-fetch so ties at the k-th distance resolve to the lowest index
    candidates = min(n_points, 2 * k)
    dist, idx = tree.query(xy, k=candidates)
    dist = np.asarray(dist, dtype=float).reshape(len(xy), candidates)
    idx = np.asarray(idx, dtype=np.int64).reshape(len(xy), candidates)
    order = np.lexsort((idx, dist), axis=-1)
    dist = np.take_along_axis(dist, order, axis=-1)[:, :k]
    idx = np.take_along_axis(idx, order, axis=-1)[:, :k]
    return dist, idx


def query_batches(n_queries: int):
    """Slices covering ``range(n_queries)`` in batches of SOLVE_BATCH_SIZE."""
    size = max(1, int(get_setting('SOLVE_BATCH_SIZE')))
    for start in range(0, n_queries, size):
        yield slice(start, min(start + size, n_queries))
