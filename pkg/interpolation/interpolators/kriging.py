"""
Ordinary kriging with exponential or spherical variograms.

The variogram is fitted by weighted least squares to binned empirical
semivariances (weights are the pair counts). The nugget is treated as a noise
term: it applies to every query-to-sample lag, including a zero lag, while the
sample-to-itself semivariance is zero. A pure-nugget model therefore predicts the
sample mean everywhere.

PyKrige is not used: its automatic variogram fit cannot weight lag bins by their
pair counts, and a flat field needs the pure-nugget fallback rather than a
degenerate fit.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.optimize import least_squares
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist, pdist

from radiomap.conf import get_setting
from radiomap.exceptions import ConditioningError, SizeError, ValidationError

from .base import FittedModel, nearest_neighbors, query_batches
from .training import TrainingSet

logger = logging.getLogger(__name__)

VARIOGRAM_KINDS = ('exponential', 'spherical')
FLAT_SILL = 1e-12


@dataclass(frozen=True)
class VariogramModel:
    kind: str
    nugget: float
    sill: float
    range: float
    # False when the least-squares fit failed and the initial guess was kept
    converged: bool = True

    def __post_init__(self):
        if self.kind not in VARIOGRAM_KINDS:
            raise ValidationError(f"unknown variogram kind {self.kind!r}")
        if not self.nugget >= 0:
            raise ValidationError(f"nugget must be >= 0, got {self.nugget}")
        if not self.sill >= self.nugget:
            raise ValidationError(f"sill ({self.sill}) must be >= nugget ({self.nugget})")
        if not self.range > 0:
            raise ValidationError(f"range must be > 0, got {self.range}")

    @property
    def partial_sill(self) -> float:
        return self.sill - self.nugget

    def structure(self, h) -> np.ndarray:
        """Nugget plus the structured part at lag ``h`` (no discontinuity at zero)."""
        h = np.asarray(h, dtype=float)
        return self.nugget + self.partial_sill * _shape(self.kind, h, self.range)

    def semivariance(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        return np.where(h > 0, self.structure(h), 0.0)


def _shape(kind, h, range_):
    if kind == 'exponential':
        return 1.0 - np.exp(-h / range_)
    ratio = np.minimum(h / range_, 1.0)
    return 1.5 * ratio - 0.5 * ratio ** 3


@dataclass(frozen=True, eq=False)
class EmpiricalVariogram:
    """Populated lag bins only: mean lag, semivariance and pair count per bin."""

    lags: np.ndarray
    semivariance: np.ndarray
    n_pairs: np.ndarray
    max_lag: float

    def __len__(self):
        return len(self.lags)


def empirical_variogram(train: TrainingSet, n_bins: int = 20, max_lag: Optional[float] = None,
                        max_points: Optional[int] = None, seed: int = 0) -> EmpiricalVariogram:
    """Binned semivariances (1/2) mean (z_i - z_j)^2 over pairs with lag in (0, max_lag].

    ``max_lag`` defaults to half the bounding-box diagonal. Above ``max_points``
    samples a seeded random subset of that size is used.
    """
    if len(train) < 2:
        raise SizeError(f"empirical variogram needs >= 2 points, got {len(train)}")
    if n_bins < 1:
        raise ValidationError(f"n_bins must be >= 1, got {n_bins}")
    if max_points is None:
        max_points = get_setting('VARIOGRAM_MAX_POINTS')
    xy, z = train.points, train.values
    if len(z) > max_points:
        keep = np.sort(np.random.default_rng(seed).choice(len(z), size=max_points, replace=False))
        xy, z = xy[keep], z[keep]
    if max_lag is None:
        lo, hi = train.bounding_box()
        max_lag = 0.5 * float(np.hypot(*(hi - lo)))
    if not max_lag > 0:
        raise SizeError("all points coincide; no positive lags to bin")

    lag = pdist(xy)
    half_sq = 0.5 * pdist(z[:, None], 'sqeuclidean')
    use = (lag > 0) & (lag <= max_lag)
    lag, half_sq = lag[use], half_sq[use]
    width = max_lag / n_bins
    which = np.minimum((lag / width).astype(np.int64), n_bins - 1)
    counts = np.bincount(which, minlength=n_bins)
    lag_sums = np.bincount(which, weights=lag, minlength=n_bins)
    gamma_sums = np.bincount(which, weights=half_sq, minlength=n_bins)
    populated = counts > 0
    return EmpiricalVariogram(
        lags=lag_sums[populated] / counts[populated],
        semivariance=gamma_sums[populated] / counts[populated],
        n_pairs=counts[populated],
        max_lag=float(max_lag),
    )


def _initial_guess(emp: EmpiricalVariogram):
    nugget = max(0.0, float(emp.semivariance[0]))
    partial = max(0.0, float(emp.semivariance.max()) - nugget)
    return np.array([nugget, partial, emp.max_lag / 3.0])


def fit_variogram(emp: EmpiricalVariogram, kind: str = 'exponential') -> VariogramModel:
    """Weighted least-squares fit of (nugget, sill, range) to an empirical variogram."""
    if kind not in VARIOGRAM_KINDS:
        raise ValidationError(f"unknown variogram kind {kind!r}")
    if len(emp) < 3:
        raise SizeError(f"variogram fit needs >= 3 populated lag bins, got {len(emp)}")
    weights = np.sqrt(emp.n_pairs.astype(float))
    x0 = _initial_guess(emp)
    lower = np.array([0.0, 0.0, 1e-6 * emp.max_lag])
    upper = np.array([np.inf, np.inf, emp.max_lag])
    x0 = np.clip(x0, lower, upper)

    def residuals(theta):
        nugget, partial, range_ = theta
        model = nugget + partial * _shape(kind, emp.lags, range_)
        return weights * (model - emp.semivariance)

    try:
        result = least_squares(
            residuals, x0, bounds=(lower, upper), method='trf',
            x_scale='jac', ftol=1e-12, xtol=1e-12, gtol=1e-12, max_nfev=5000,
        )
        converged = bool(result.success)
        theta = result.x
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("Variogram fit raised %s", exc)
        converged, theta = False, x0
    if not converged:
        logger.warning("Variogram fit did not converge; using the method-of-moments initial guess")
        theta = x0
    nugget, partial, range_ = (float(v) for v in theta)
    return VariogramModel(kind, nugget, nugget + partial, range_, converged=converged)


@dataclass(frozen=True, eq=False)
class KrigingModel(FittedModel):
    points: np.ndarray
    values: np.ndarray
    variogram: VariogramModel
    tree: cKDTree
    # LU factors of the global system, None for neighbourhood kriging
    lu: Optional[tuple] = None

    @property
    def is_flat(self) -> bool:
        return self.variogram.sill <= FLAT_SILL

    def kriging_weights(self, queries) -> np.ndarray:
        """Global-system weights, shaped (len(queries), n_samples)."""
        if self.lu is None:
            raise ValidationError("weights are only exposed for global kriging")
        rhs = self._rhs(np.atleast_2d(np.asarray(queries, dtype=float)))
        return linalg.lu_solve(self.lu, rhs).T[:, :len(self.points)]

    def _rhs(self, q):
        rhs = np.ones((len(self.points) + 1, len(q)))
        rhs[:-1] = self.variogram.structure(cdist(self.points, q))
        return rhs

    def _predict(self, xy):
        if self.is_flat:
            return np.full(len(xy), float(self.values.mean()))
        out = np.empty(len(xy))
        for batch in query_batches(len(xy)):
            if self.lu is not None:
                weights = linalg.lu_solve(self.lu, self._rhs(xy[batch]))
                out[batch] = self.values @ weights[:-1]
            else:
                out[batch] = self._predict_local(xy[batch])
        return out

    def _predict_local(self, q):
        k = self.config.params.n_neighbors
        dist, idx = nearest_neighbors(self.tree, len(self.points), q, k)
        nbr = self.points[idx]
        b, k = idx.shape
        lhs = np.ones((b, k + 1, k + 1))
        lhs[:, :k, :k] = self.variogram.semivariance(
            np.linalg.norm(nbr[:, :, None, :] - nbr[:, None, :, :], axis=-1)
        )
        lhs[:, k, k] = 0.0
        rhs = np.ones((b, k + 1))
        rhs[:, :k] = self.variogram.structure(dist)
        try:
            weights = np.linalg.solve(lhs, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(
                f"local kriging system is singular ({exc}); try a larger nugget"
            ) from exc
        return np.sum(weights[:, :k] * self.values[idx], axis=1)


def _variogram_for(params, train: TrainingSet, seed: int) -> VariogramModel:
    if params.has_fixed_variogram:
        return VariogramModel(
            params.variogram, params.variogram_nugget, params.variogram_sill, params.variogram_range,
        )
    emp = empirical_variogram(train, params.n_lags, params.max_lag, seed=seed)
    return fit_variogram(emp, params.variogram)


def fit_kriging(config, train: TrainingSet) -> KrigingModel:
    params = config.params
    variogram = _variogram_for(params, train, config.seed)
    logger.info(
        "Kriging variogram: %s nugget=%.3f sill=%.3f range=%.1f m",
        variogram.kind, variogram.nugget, variogram.sill, variogram.range,
    )
    lo, hi = train.bounding_box()
    lu = None
    n = len(train)
    if n <= params.global_limit and variogram.sill > FLAT_SILL:
        lhs = np.ones((n + 1, n + 1))
        lhs[:n, :n] = variogram.semivariance(cdist(train.points, train.points))
        lhs[n, n] = 0.0
        try:
            with warnings.catch_warnings():
                warnings.simplefilter('error', linalg.LinAlgWarning)
                lu = linalg.lu_factor(lhs)
                # lu_factor only warns on exact zeros
                pivots = np.abs(np.diag(lu[0]))
                if pivots.min() <= 1e-14 * pivots.max():
                    raise linalg.LinAlgError("near-zero pivot in the LU factorisation")
        except (linalg.LinAlgError, linalg.LinAlgWarning) as exc:
            raise ConditioningError(
                f"kriging system is singular ({exc}); try a larger nugget"
            ) from exc
    return KrigingModel(
        config=config, bbox_lo=lo, bbox_hi=hi,
        points=train.points, values=train.values, variogram=variogram,
        tree=cKDTree(train.points), lu=lu,
    )
