"""Inverse distance weighting over the k nearest samples."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from radiomap.exceptions import ValidationError
from radiomap.geo_grid import LocalPoint, as_xy

from .base import FittedModel, nearest_neighbors, query_batches
from .config import IdwParams

EXACT_HIT_M = 1e-9


def _weights_from_distances(dist: np.ndarray, power: float) -> np.ndarray:
    """Row-normalised d^-power weights; a row with an exact hit puts weight 1 on its first column."""
    hits = dist[:, 0] < EXACT_HIT_M
    weights = np.zeros_like(dist)
    with np.errstate(divide='ignore'):
        raw = np.where(dist[~hits] > 0, dist[~hits] ** -power, 0.0)
    weights[~hits] = raw / raw.sum(axis=1, keepdims=True)
    weights[hits, 0] = 1.0
    return weights


def idw_weights(query: LocalPoint, points, power: float = 2.0, k_neighbors: int = 12) -> np.ndarray:
    """Weights of every training point for one query (zeros outside the k nearest)."""
    if not power > 0:
        raise ValidationError(f"power must be > 0, got {power}")
    xy = as_xy(points)
    q = as_xy([query])
    dist, idx = nearest_neighbors(cKDTree(xy), len(xy), q, k_neighbors)
    weights = np.zeros(len(xy))
    weights[idx[0]] = _weights_from_distances(dist, power)[0]
    return weights


@dataclass(frozen=True, eq=False)
class IdwModel(FittedModel):
    points: np.ndarray
    values: np.ndarray
    tree: cKDTree

    @property
    def params(self) -> IdwParams:
        return self.config.params

    def _predict(self, xy):
        out = np.empty(len(xy))
        for batch in query_batches(len(xy)):
            dist, idx = nearest_neighbors(self.tree, len(self.points), xy[batch], self.params.k_neighbors)
            weights = _weights_from_distances(dist, self.params.power)
            out[batch] = np.sum(weights * self.values[idx], axis=1)
        return out


def fit_idw(config, train) -> IdwModel:
    lo, hi = train.bounding_box()
    return IdwModel(
        config=config, bbox_lo=lo, bbox_hi=hi,
        points=train.points, values=train.values, tree=cKDTree(train.points),
    )
