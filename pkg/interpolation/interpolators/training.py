"""Training sets: georeferenced observations in the local frame."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from radiomap.exceptions import ValidationError
from radiomap.geo_grid import LocalPoint, as_xy

DUPLICATE_TOLERANCE_M = 1e-9


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Observed values (dBm or dB) at local points, with optional serving-cell ids.

    An empty set is representable (an ingest of an empty log yields one);
    fitting rejects it.
    """

    points: np.ndarray
    values: np.ndarray
    cell_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.array(as_xy(self.points), dtype=float)
        values = np.array(self.values, dtype=float).ravel()
        if len(points) != len(values):
            raise ValidationError(f"{len(points)} points but {len(values)} values")
        if not np.all(np.isfinite(points)):
            raise ValidationError("training points must be finite")
        if not np.all(np.isfinite(values)):
            raise ValidationError("training values must be finite")
        cell_ids = self.cell_ids
        if cell_ids is not None:
            cell_ids = np.array(cell_ids, dtype=np.int64).ravel()
            if len(cell_ids) != len(values):
                raise ValidationError(f"{len(values)} values but {len(cell_ids)} cell ids")
            cell_ids.setflags(write=False)
        points.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'cell_ids', cell_ids)

    @classmethod
    def from_points(cls, points: Sequence[LocalPoint], values, cell_ids=None):
        return cls(as_xy(points), values, cell_ids)

    def __len__(self):
        return len(self.values)

    def subset(self, indices) -> 'TrainingSet':
        indices = np.asarray(indices, dtype=np.int64)
        cell_ids = None if self.cell_ids is None else self.cell_ids[indices]
        return TrainingSet(self.points[indices], self.values[indices], cell_ids)

    def bounding_box(self):
        """(lower-left, upper-right) corners as arrays."""
        return self.points.min(axis=0), self.points.max(axis=0)


def deduplicate(train: TrainingSet, tolerance: float = DUPLICATE_TOLERANCE_M) -> TrainingSet:
    """Merge coincident points by averaging their values.

    Merged points keep the position and cell id of their first occurrence, and
    the output preserves first-occurrence order.
    """
    if len(train) < 2:
        return train
    keys = np.round(train.points / tolerance)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    if len(first) == len(train):
        return train
    counts = np.bincount(inverse)
    means = np.bincount(inverse, weights=train.values) / counts
    order = np.argsort(first, kind='stable')
    keep = first[order]
    cell_ids = None if train.cell_ids is None else train.cell_ids[keep]
    return TrainingSet(train.points[keep], means[order], cell_ids)
