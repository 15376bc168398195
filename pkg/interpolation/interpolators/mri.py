"""
Model-based radio interpolation: per-transmitter log-distance regression.

Each transmitter's samples are fitted with z = p0 - 10 n log10(d) by ordinary
least squares (d clamped to at least 1 m); the predicted field is the strongest
transmitter at each query. An optional IDW pass over the regression residuals
can be added on top.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from radiomap.exceptions import SizeError
from radiomap.geo_grid import LocalPoint, as_xy

from .base import FittedModel
from .config import IdwParams, InterpolatorConfig, Method, MriParams, TransmitterSite
from .idw import fit_idw
from .training import TrainingSet

logger = logging.getLogger(__name__)

MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class PathLossFit:
    tx_position: LocalPoint
    p0: float
    exponent: float
    residual_rms: float
    cell_id: int
    n_samples: int

    def predict(self, xy: np.ndarray) -> np.ndarray:
        d = np.hypot(xy[:, 0] - self.tx_position.x, xy[:, 1] - self.tx_position.y)
        return self.p0 - 10.0 * self.exponent * np.log10(np.maximum(d, MIN_DISTANCE_M))


def assign_transmitters(train: TrainingSet, sites: Sequence[TransmitterSite]) -> np.ndarray:
    """Transmitter index per sample: by cell id when known, otherwise the nearest site."""
    tx_xy = np.array([[s.x, s.y] for s in sites], dtype=float)
    d = np.hypot(train.points[:, None, 0] - tx_xy[None, :, 0], train.points[:, None, 1] - tx_xy[None, :, 1])
    assignment = np.argmin(d, axis=1)
    if train.cell_ids is not None:
        by_cell = {s.cell_id: i for i, s in enumerate(sites)}
        known = np.array([cid in by_cell for cid in train.cell_ids.tolist()], dtype=bool)
        assignment[known] = [by_cell[cid] for cid in train.cell_ids[known].tolist()]
    return assignment


def _regress(xy, z, site: TransmitterSite) -> Optional[PathLossFit]:
    d = np.maximum(np.hypot(xy[:, 0] - site.x, xy[:, 1] - site.y), MIN_DISTANCE_M)
    if len(z) < 2 or np.ptp(d) == 0:
        return None
    design = np.column_stack([np.ones(len(z)), -10.0 * np.log10(d)])
    (p0, exponent), *_ = np.linalg.lstsq(design, z, rcond=None)
    residual = z - design @ np.array([p0, exponent])
    return PathLossFit(
        tx_position=LocalPoint(site.x, site.y),
        p0=float(p0),
        exponent=float(exponent),
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
        cell_id=site.cell_id,
        n_samples=len(z),
    )


@dataclass(frozen=True, eq=False)
class MriModel(FittedModel):
    fits: Tuple[PathLossFit, ...]
    residual_model: Optional[FittedModel] = None

    def path_loss_field(self, xy: np.ndarray) -> np.ndarray:
        return np.max(np.stack([f.predict(xy) for f in self.fits]), axis=0)

    def _predict(self, xy):
        field = self.path_loss_field(xy)
        if self.residual_model is not None:
            field = field + self.residual_model.predict(xy)
        return field


def fit_mri(train: TrainingSet, transmitters, cfg: Optional[InterpolatorConfig] = None) -> MriModel:
    """Fit path-loss parameters per transmitter; ``transmitters`` are LocalPoints or sites."""
    sites = []
    for i, tx in enumerate(transmitters):
        if isinstance(tx, TransmitterSite):
            sites.append(tx if tx.cell_id is not None else TransmitterSite(tx.x, tx.y, i))
        else:
            x, y = as_xy([tx])[0]
            sites.append(TransmitterSite(float(x), float(y), i))
    if cfg is None:
        cfg = InterpolatorConfig(Method.MRI, MriParams(transmitters=tuple(sites)))
    if not sites:
        raise SizeError("MRI needs at least one transmitter position")

    assignment = assign_transmitters(train, sites)
    fits = []
    for i, site in enumerate(sites):
        mine = assignment == i
        fit = _regress(train.points[mine], train.values[mine], site)
        if fit is None:
            logger.warning(
                "Transmitter %s excluded: %d samples without two distinct distances",
                site.cell_id, int(mine.sum()),
            )
            continue
        fits.append(fit)
    if not fits:
        raise SizeError("every transmitter was excluded; MRI needs >= 2 samples at distinct distances")

    lo, hi = train.bounding_box()
    model = MriModel(config=cfg, bbox_lo=lo, bbox_hi=hi, fits=tuple(fits))
    params = cfg.params
    if params.residual_idw:
        residuals = train.values - model.path_loss_field(train.points)
        idw_cfg = InterpolatorConfig(Method.IDW, IdwParams(params.idw_power, params.idw_k_neighbors))
        residual_model = fit_idw(idw_cfg, TrainingSet(train.points, residuals))
        model = MriModel(config=cfg, bbox_lo=lo, bbox_hi=hi, fits=tuple(fits), residual_model=residual_model)
    return model


def fit_mri_config(config, train: TrainingSet) -> MriModel:
    return fit_mri(train, config.params.transmitters, config)
