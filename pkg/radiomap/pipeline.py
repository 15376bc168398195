"""
End-to-end flows: walk-test ingest, measured RSSI/SINR maps and map comparison.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from interpolation.interpolators import InterpolatorConfig, TrainingSet, fit, predict

from .exceptions import FormatError, ShapeError, SizeError, ValidationError
from .conf import get_setting
from .forms import UeReportForm, WalkTestRowForm, form_violations, unparseable_fields
from .geo_grid import GeoPoint, GridSpec, Raster, Reducer, aggregate_xy, project
from .signal_metrics import UeReport, rssi_from_report

logger = logging.getLogger(__name__)

# cell id of samples whose row carried no PCI
UNKNOWN_CELL = -1


@dataclass(frozen=True)
class WalkTestRecord:
    timestamp: float
    position: GeoPoint
    report: UeReport


@dataclass(frozen=True)
class QuarantinedRow:
    line: int
    reasons: Tuple[str, ...]
    fields: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class IngestResult:
    rssi: TrainingSet
    sinr: TrainingSet
    quarantine: List[QuarantinedRow]
    records: List[WalkTestRecord]

    @property
    def n_rows(self) -> int:
        return len(self.rssi) + len(self.quarantine)


def _numbered(rows) -> Iterable[Tuple[int, dict]]:
    for i, row in enumerate(rows):
        if isinstance(row, tuple):
            yield row
        else:
            # dict rows are numbered as data lines after a header
            yield i + 2, row


def parse_walktest_row(line: int, raw: dict, origin: GeoPoint):
    """(WalkTestRecord, LocalPoint) for a valid row, or a QuarantinedRow with reasons.

    Cells holding text that is not a number are a format error. Empty required
    cells, row constraints and report constraints are all quarantine reasons,
    reported together.
    """
    form = WalkTestRowForm(data=raw)
    broken = unparseable_fields(form)
    if broken:
        raise FormatError(f"unparseable value in {', '.join(broken)}", line=line)
    reasons = form_violations(form)
    data = form.cleaned_data
    n_prb = data.get('n_prb')
    report_data = {
        'rsrp': data.get('rsrp_dbm'),
        'rsrq': data.get('rsrq_db'),
        'n_prb': get_setting('DEFAULT_N_PRB') if n_prb is None else n_prb,
        'pci': data.get('pci'),
    }
    # missing cells are already reported by the row form
    for reason in form_violations(UeReportForm(data=report_data), ignore_codes={'required'}):
        if reason not in reasons:
            reasons.append(reason)
    if 'lat_deg' in data and 'lon_deg' in data:
        position = GeoPoint(data['lat_deg'], data['lon_deg'])
        try:
            local = project(position, origin)
        except ValidationError as exc:
            reasons.append(f"position: {exc}")
    if reasons:
        return QuarantinedRow(line, tuple(reasons), dict(raw))
    report = UeReport.with_default_prb(
        rsrp=data['rsrp_dbm'],
        rsrq=data['rsrq_db'],
        n_prb=n_prb,
        sinr=data['sinr_db'],
        pci=data['pci'],
        timestamp=data['timestamp_s'],
    )
    return WalkTestRecord(data['timestamp_s'], position, report), local


def ingest_walktest(rows, origin: GeoPoint) -> IngestResult:
    """Turn walk-test rows into RSSI and SINR training sets plus a quarantine list.

    ``rows`` holds raw string fields per row, either as dicts or as
    ``(line, dict)`` pairs. Every row ends up as exactly one RSSI sample or one
    quarantined row.
    """
    records, points, rssi, cells = [], [], [], []
    sinr_points, sinr_values, sinr_cells = [], [], []
    quarantine = []
    for line, raw in _numbered(rows):
        parsed = parse_walktest_row(line, raw, origin)
        if isinstance(parsed, QuarantinedRow):
            logger.debug("Quarantined line %d: %s", line, "; ".join(parsed.reasons))
            quarantine.append(parsed)
            continue
        record, local = parsed
        cell = record.report.pci if record.report.pci is not None else UNKNOWN_CELL
        records.append(record)
        points.append(local)
        rssi.append(rssi_from_report(record.report))
        cells.append(cell)
        if record.report.sinr is not None:
            sinr_points.append(local)
            sinr_values.append(record.report.sinr)
            sinr_cells.append(cell)
    if quarantine:
        logger.warning("Quarantined %d of %d walk-test rows", len(quarantine), len(quarantine) + len(records))
    return IngestResult(
        rssi=TrainingSet.from_points(points, rssi, np.array(cells, dtype=np.int64)),
        sinr=TrainingSet.from_points(sinr_points, sinr_values, np.array(sinr_cells, dtype=np.int64)),
        quarantine=quarantine,
        records=records,
    )


def _binned_training_set(samples: TrainingSet, grid: GridSpec) -> TrainingSet:
    binned = aggregate_xy(samples.points, samples.values, grid, Reducer.MEAN).raster
    populated = binned.populated.ravel()
    if not populated.any():
        raise SizeError("no sample falls inside the grid extent")
    return TrainingSet(grid.bin_centers()[populated], binned.values.ravel()[populated])


def build_map(samples: TrainingSet, grid: GridSpec, cfg: Optional[InterpolatorConfig] = None,
              pin_to_binned_mean: bool = False, pre_bin: bool = False, threads: int = 1) -> Raster:
    """Fit ``cfg`` (default: RBF, epsilon 1, smoothing 0.1) and predict every bin centre.

    ``pre_bin`` interpolates from per-bin means at bin centres instead of raw
    samples; ``pin_to_binned_mean`` overwrites sampled bins with their mean.
    """
    if len(samples) == 0:
        raise SizeError("cannot build a map from zero samples")
    cfg = cfg or InterpolatorConfig.default_rbf()
    train = _binned_training_set(samples, grid) if pre_bin else samples
    model = fit(cfg, train, threads=threads)
    values = predict(model, grid.bin_centers()).reshape(grid.shape)
    if pin_to_binned_mean:
        binned = aggregate_xy(samples.points, samples.values, grid, Reducer.MEAN).raster
        values = np.where(binned.populated, binned.values, values)
    logger.info("Built %s map over %dx%d bins from %d samples", cfg.name, grid.n_cols, grid.n_rows, len(train))
    return Raster.from_values(grid, values)


def build_sinr_map(sinr_samples: TrainingSet, grid: GridSpec, cfg: Optional[InterpolatorConfig] = None,
                   **kwargs) -> Raster:
    """SINR map (dB) with the same contract and default interpolator as :func:`build_map`.

    Bins are clipped to the observed SINR range widened by ``OVERSHOOT_MARGIN_DB``.
    """
    if len(sinr_samples) == 0:
        raise SizeError("no SINR samples: rows without sinr_db are excluded from the SINR set")
    raster = build_map(sinr_samples, grid, cfg, **kwargs)
    margin = get_setting('OVERSHOOT_MARGIN_DB')
    low, high = sinr_samples.values.min() - margin, sinr_samples.values.max() + margin
    values = raster.values
    clipped = np.count_nonzero((values < low) | (values > high))
    if clipped:
        logger.info("Clipped %d SINR bins to [%.1f, %.1f] dB", clipped, low, high)
    return Raster.from_values(grid, np.clip(values, low, high))


@dataclass(frozen=True)
class MapComparison:
    rmse: Optional[float]
    bias: Optional[float]
    overlap_fraction: float


def compare_maps(a: Raster, b: Raster) -> Tuple[Raster, MapComparison]:
    """Per-bin ``a - b`` where both are populated, with RMSE and bias over that overlap."""
    if a.grid != b.grid:
        raise ShapeError(f"grids differ: {a.grid} vs {b.grid}")
    overlap = a.populated & b.populated
    diff = np.where(overlap, a.values - b.values, np.nan)
    n = int(np.count_nonzero(overlap))
    fraction = n / a.grid.size
    if n == 0:
        stats = MapComparison(None, None, 0.0)
    else:
        d = diff[overlap]
        stats = MapComparison(float(np.sqrt(np.mean(d ** 2))), float(np.mean(d)), fraction)
    return Raster(a.grid, diff, overlap.astype(np.int64)), stats
