"""
Multiquadric radial basis function interpolation.

The interpolant is s(q) = sum_i w_i k(|q - s_i|) + c0 + c1 x + c2 y with the
multiquadric phi(r) = sqrt(1 + (eps r)^2) taken in its conditionally positive
definite form k = -phi, solved from

    [K + delta I   P] [w]   [z]
    [P^T           0] [c] = [0]

With delta = 0 the sign of the kernel does not change the interpolant; with
delta > 0 the smoothing term moves the spectrum of K away from zero. This is the
system ``scipy.interpolate.RBFInterpolator`` solves for ``kernel='multiquadric'``.

Sets of fewer than three points use a constant tail only. Above ``global_limit``
samples each query is solved on its ``n_neighbors`` nearest samples instead of
globally.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.interpolate import RBFInterpolator
from scipy.spatial.distance import cdist

from radiomap.exceptions import ConditioningError, ValidationError

from .base import FittedModel, query_batches
from .training import TrainingSet

logger = logging.getLogger(__name__)

COLLINEAR_RATIO = 1e-8


def multiquadric(r, epsilon):
    return np.sqrt(1.0 + (epsilon * r) ** 2)


def _kernel(r, epsilon):
    return -multiquadric(r, epsilon)


def _tail_matrix(xy: np.ndarray, degree: int) -> np.ndarray:
    if degree == 0:
        return np.ones((len(xy), 1))
    return np.column_stack([np.ones(len(xy)), xy])


def _is_collinear(centered: np.ndarray) -> bool:
    s = np.linalg.svd(centered, compute_uv=False)
    return s.size < 2 or s[0] == 0 or s[-1] / s[0] < COLLINEAR_RATIO


def _check_params(epsilon, smoothing):
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be > 0, got {epsilon}")
    if not smoothing >= 0:
        raise ValidationError(f"smoothing must be >= 0, got {smoothing}")


def _tail_degree(xy: np.ndarray) -> int:
    if len(xy) < 3:
        return 0
    if _is_collinear(xy - xy.mean(axis=0)):
        raise ConditioningError(
            "RBF training points are collinear, so the linear tail is undetermined; "
            "use non-collinear samples"
        )
    return 1


@dataclass(frozen=True, eq=False)
class RbfSolution:
    """Kernel weights and polynomial tail of a solved RBF system."""

    centers: np.ndarray
    shift: np.ndarray
    weights: np.ndarray
    tail: np.ndarray
    epsilon: float

    @property
    def degree(self) -> int:
        return 0 if len(self.tail) == 1 else 1

    def evaluate(self, xy: np.ndarray) -> np.ndarray:
        out = np.empty(len(xy))
        for batch in query_batches(len(xy)):
            q = xy[batch]
            kernel = _kernel(cdist(q, self.centers), self.epsilon)
            out[batch] = kernel @ self.weights + _tail_matrix(q - self.shift, self.degree) @ self.tail
        return out


def rbf_solve(train: TrainingSet, epsilon: float, smoothing: float) -> RbfSolution:
    """Solve the augmented multiquadric system for ``train``.

    Coordinates are centred on the training centroid before building P.
    """
    _check_params(epsilon, smoothing)
    xy = train.points
    n = len(xy)
    degree = _tail_degree(xy)
    shift = xy.mean(axis=0)
    p = _tail_matrix(xy - shift, degree)
    m = p.shape[1]
    lhs = np.zeros((n + m, n + m))
    lhs[:n, :n] = _kernel(cdist(xy, xy), epsilon) + smoothing * np.eye(n)
    lhs[:n, n:] = p
    lhs[n:, :n] = p.T
    rhs = np.concatenate([train.values, np.zeros(m)])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', linalg.LinAlgWarning)
            solution = linalg.solve(lhs, rhs)
    except (linalg.LinAlgError, linalg.LinAlgWarning) as exc:
        raise ConditioningError(
            f"RBF system is singular or ill-conditioned ({exc}); try a larger smoothing"
        ) from exc
    return RbfSolution(
        centers=xy.copy(), shift=shift, weights=solution[:n], tail=solution[n:], epsilon=epsilon,
    )


@dataclass(frozen=True, eq=False)
class GlobalRbfModel(FittedModel):
    interpolator: RBFInterpolator

    def _predict(self, xy):
        out = np.empty(len(xy))
        for batch in query_batches(len(xy)):
            out[batch] = self.interpolator(xy[batch])
        return out


@dataclass(frozen=True, eq=False)
class LocalRbfModel(GlobalRbfModel):
    """Per-query RBF systems over the nearest samples."""

    def _predict(self, xy):
        try:
            return super()._predict(xy)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise ConditioningError(
                f"local RBF system is singular ({exc}); try a larger smoothing or more neighbours"
            ) from exc


def fit_rbf(config, train: TrainingSet):
    params = config.params
    _check_params(params.epsilon, params.smoothing)
    lo, hi = train.bounding_box()
    degree = _tail_degree(train.points)
    local = len(train) > params.global_limit
    if local:
        logger.info(
            "RBF over %d samples: solving per query on the %d nearest", len(train), params.n_neighbors,
        )
    try:
        interpolator = RBFInterpolator(
            train.points, train.values,
            neighbors=min(params.n_neighbors, len(train)) if local else None,
            smoothing=params.smoothing,
            kernel='multiquadric',
            epsilon=params.epsilon,
            degree=degree,
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConditioningError(
            f"RBF system is singular ({exc}); try a larger smoothing"
        ) from exc
    model_cls = LocalRbfModel if local else GlobalRbfModel
    return model_cls(config=config, bbox_lo=lo, bbox_hi=hi, interpolator=interpolator)
