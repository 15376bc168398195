"""
K-fold cross-validation benchmark of interpolation methods.

Every method is scored on the same seeded folds with RMSE (dB), NMSE and MAPE
(percent of |truth| in dBm); the report keeps the mean and population standard
deviation of each metric over folds.
"""
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from radiomap.conf import get_setting
from radiomap.exceptions import SizeError, ToolkitError, UndefinedMetricError, ValidationError

from .interpolators import InterpolatorConfig, TrainingSet, fit, predict

logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_FOLD = 10
REPORT_COLUMNS = [
    'method', 'rmse_mean', 'rmse_std', 'nmse_mean', 'nmse_std', 'mape_mean', 'mape_std', 'status',
]


def kfold_split(n: int, k: int, seed: int = 0) -> List[np.ndarray]:
    """Seeded shuffle of range(n) cut into k folds whose sizes differ by at most one."""
    if k < 2:
        raise SizeError(f"k must be >= 2, got {k}")
    if n < k:
        raise SizeError(f"cannot split {n} samples into {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(fold) for fold in np.array_split(order, k)]


def _pair(pred, truth):
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if len(pred) != len(truth) or len(truth) == 0:
        raise ValidationError(f"need equal non-zero lengths, got {len(pred)} and {len(truth)}")
    return pred, truth


def rmse(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def nmse(pred, truth, mode: Optional[str] = None) -> float:
    """Squared error normalised by the truth variance ("variance") or energy ("energy")."""
    pred, truth = _pair(pred, truth)
    mode = mode or get_setting('NMSE_MODE')
    if mode == 'variance':
        denominator = np.sum((truth - truth.mean()) ** 2)
    elif mode == 'energy':
        denominator = np.sum(truth ** 2)
    else:
        raise ValidationError(f"unknown NMSE mode {mode!r}")
    if denominator == 0:
        raise UndefinedMetricError(f"NMSE undefined: truth has zero {mode}")
    return float(np.sum((pred - truth) ** 2) / denominator)


def mape(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    if np.any(truth == 0):
        raise UndefinedMetricError("MAPE undefined: truth contains zeros")
    return float(100.0 * np.mean(np.abs(pred - truth) / np.abs(truth)))


@dataclass(frozen=True)
class MethodScore:
    method: str
    status: str = 'ok'
    reason: str = ''
    rmse_mean: Optional[float] = None
    rmse_std: Optional[float] = None
    nmse_mean: Optional[float] = None
    nmse_std: Optional[float] = None
    mape_mean: Optional[float] = None
    mape_std: Optional[float] = None
    folds: int = 0

    @property
    def failed(self) -> bool:
        return self.status != 'ok'


@dataclass(frozen=True)
class EvalReport:
    k: int
    seed: int
    scores: List[MethodScore] = field(default_factory=list)

    def best_method(self) -> Optional[MethodScore]:
        ok = [s for s in self.scores if not s.failed]
        return min(ok, key=lambda s: s.rmse_mean) if ok else None

    @property
    def all_failed(self) -> bool:
        return bool(self.scores) and all(s.failed for s in self.scores)


def _score_method(cfg, data, folds, threads, nmse_mode):
    per_fold = []
    try:
        for i, test_idx in enumerate(folds):
            train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
            model = fit(cfg, data.subset(train_idx), threads=threads)
            pred = predict(model, data.points[test_idx])
            truth = data.values[test_idx]
            per_fold.append((rmse(pred, truth), nmse(pred, truth, nmse_mode), mape(pred, truth)))
    except (ToolkitError, np.linalg.LinAlgError, ValueError) as exc:
        logger.warning("%s failed on fold %d: %s", cfg.name, len(per_fold) + 1, exc)
        return MethodScore(cfg.name, status='failed', reason=str(exc), folds=len(per_fold))
    metrics = np.array(per_fold)
    mean, std = metrics.mean(axis=0), metrics.std(axis=0)
    logger.info("%s: RMSE %.2f ± %.2f dB over %d folds", cfg.name, mean[0], std[0], len(folds))
    return MethodScore(
        cfg.name,
        rmse_mean=float(mean[0]), rmse_std=float(std[0]),
        nmse_mean=float(mean[1]), nmse_std=float(std[1]),
        mape_mean=float(mean[2]), mape_std=float(std[2]),
        folds=len(folds),
    )


def crossval(methods: Sequence[InterpolatorConfig], data: TrainingSet, k: Optional[int] = None,
             seed: int = 0, threads: int = 1, nmse_mode: Optional[str] = None) -> EvalReport:
    """Score every method on identical k folds of ``data``.

    A method that fails on any fold is reported as failed; the others proceed.
    With ``threads`` > 1 methods run concurrently; the report keeps the given order.
    """
    k = k or get_setting('DEFAULT_FOLDS')
    methods = list(methods)
    if not methods:
        return EvalReport(k=k, seed=seed)
    if len(data) < MIN_SAMPLES_PER_FOLD * k:
        raise SizeError(
            f"cross-validation with k={k} needs >= {MIN_SAMPLES_PER_FOLD * k} samples, got {len(data)}"
        )
    folds = kfold_split(len(data), k, seed)
    if threads > 1 and len(methods) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_score_method, cfg, data, folds, 1, nmse_mode) for cfg in methods]
            scores = [future.result() for future in futures]
    else:
        scores = [_score_method(cfg, data, folds, threads, nmse_mode) for cfg in methods]
    return EvalReport(k=k, seed=seed, scores=scores)


def _cell(mean, std):
    return f"{mean:.2f} ± {std:.2f}"


def render_report(r: EvalReport, format: str = 'markdown') -> str:
    """Table-shaped text: CSV with numeric columns, or markdown with "mean ± std" cells."""
    if format == 'csv':
        rows = []
        for s in r.scores:
            status = 'ok' if not s.failed else f"failed ({s.reason})"
            rows.append([s.method, s.rmse_mean, s.rmse_std, s.nmse_mean, s.nmse_std,
                         s.mape_mean, s.mape_std, status])
        frame = pd.DataFrame(rows, columns=REPORT_COLUMNS)
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format='%.6f', lineterminator='\n')
        return buffer.getvalue()
    if format != 'markdown':
        raise ValidationError(f"unknown report format {format!r}")
    lines = [
        "| Method | RMSE (dB) | NMSE | MAPE (%) |",
        "|---|---|---|---|",
    ]
    for s in r.scores:
        if s.failed:
            lines.append(f"| {s.method} | failed ({s.reason}) | | |")
        else:
            lines.append(
                f"| {s.method} | {_cell(s.rmse_mean, s.rmse_std)} | "
                f"{_cell(s.nmse_mean, s.nmse_std)} | {_cell(s.mape_mean, s.mape_std)} |"
            )
    return "\n".join(lines) + "\n"
