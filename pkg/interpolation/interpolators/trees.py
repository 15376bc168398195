"""Random forest and gradient-boosted tree regressors on raw (x, y) features."""
from dataclasses import dataclass

import numpy as np
from sklearn.dummy import DummyRegressor
from sklearn.ensemble import GradientBoostingRegressor, RandomForestRegressor

from radiomap.exceptions import SizeError, ValidationError

from .base import FittedModel
from .config import GbtParams, Method, RfParams
from .training import TrainingSet


@dataclass(frozen=True, eq=False)
class TreeEnsembleModel(FittedModel):
    estimator: object

    def _predict(self, xy):
        return self.estimator.predict(xy)

    def training_loss_curve(self) -> np.ndarray:
        """Per-round training loss of a boosted model (empty for forests)."""
        return np.asarray(getattr(self.estimator, 'train_score_', []), dtype=float)


def sklearn_seed(seed: int) -> int:
    """Fold a u64 seed into the 32-bit range scikit-learn accepts."""
    return int(np.random.SeedSequence(seed).generate_state(1)[0])


def _build_estimator(kind, params, seed, threads):
    # depth 0 is a stump that never splits: the training mean
    if params.max_depth == 0:
        return DummyRegressor(strategy='mean')
    if kind is Method.RF:
        return RandomForestRegressor(
            n_estimators=params.n_trees,
            max_depth=params.max_depth,
            min_samples_leaf=params.min_leaf,
            bootstrap=params.bootstrap,
            random_state=seed,
            n_jobs=threads,
        )
    return GradientBoostingRegressor(
        loss='squared_error',
        n_estimators=params.n_rounds,
        learning_rate=params.learning_rate,
        max_depth=params.max_depth,
        random_state=seed,
    )


def fit_tree_ensemble(train: TrainingSet, kind, cfg, threads: int = 1) -> TreeEnsembleModel:
    """Fit an RF or GBT ensemble; ``cfg`` is the InterpolatorConfig carrying its parameters."""
    kind = Method(kind)
    if kind not in (Method.RF, Method.GBT):
        raise ValidationError(f"tree ensembles are RF or GBT, not {kind.value}")
    expected = RfParams if kind is Method.RF else GbtParams
    if not isinstance(cfg.params, expected):
        raise ValidationError(f"{kind.value} needs {expected.__name__}")
    if len(train) < 2:
        raise SizeError(f"{kind.value} needs >= 2 samples, got {len(train)}")
    estimator = _build_estimator(kind, cfg.params, sklearn_seed(cfg.seed), threads)
    estimator.fit(train.points, train.values)
    lo, hi = train.bounding_box()
    return TreeEnsembleModel(config=cfg, bbox_lo=lo, bbox_hi=hi, estimator=estimator)
