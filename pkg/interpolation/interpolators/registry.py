"""The common fit/predict contract over all six methods."""
import logging

import numpy as np

from radiomap.exceptions import SizeError

from .config import InterpolatorConfig, Method
from .idw import fit_idw
from .kriging import fit_kriging
from .mri import fit_mri_config
from .rbf import fit_rbf
from .training import TrainingSet, deduplicate
from .trees import fit_tree_ensemble

logger = logging.getLogger(__name__)


def _fit_rf(config, train, threads):
    return fit_tree_ensemble(train, Method.RF, config, threads=threads)


def _fit_gbt(config, train, threads):
    return fit_tree_ensemble(train, Method.GBT, config, threads=threads)


FITTERS = {
    Method.IDW: lambda config, train, threads: fit_idw(config, train),
    Method.RBF: lambda config, train, threads: fit_rbf(config, train),
    Method.OK: lambda config, train, threads: fit_kriging(config, train),
    Method.RF: _fit_rf,
    Method.GBT: _fit_gbt,
    Method.MRI: lambda config, train, threads: fit_mri_config(config, train),
}


def fit(cfg: InterpolatorConfig, train: TrainingSet, threads: int = 1):
    """Fit ``cfg`` on ``train`` after merging coincident samples."""
    if len(train) == 0:
        raise SizeError(f"{cfg.name} cannot be fitted on an empty training set")
    merged = deduplicate(train)
    if len(merged) < len(train):
        logger.info("Merged %d coincident samples before fitting", len(train) - len(merged))
    return FITTERS[cfg.method](cfg, merged, threads)


def predict(model, queries) -> np.ndarray:
    values = model.predict(queries)
    if len(values):
        flagged = int(np.count_nonzero(model.extrapolation_mask(queries)))
        if flagged:
            logger.warning(
                "%s: %d of %d queries lie far outside the training extent",
                model.config.name, flagged, len(values),
            )
    return values


def extrapolation_mask(model, queries) -> np.ndarray:
    return model.extrapolation_mask(queries)
