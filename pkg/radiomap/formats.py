"""
File formats: raster CSV + JSON sidecar, sample CSVs, walk-test logs and quarantine.

Every writer goes through :func:`atomic_write_text`, so a reader never sees a
half-written file. Outputs use LF line endings and fixed float formatting and
carry no timestamps, so identical inputs give byte-identical files.
"""
import hashlib
import io
import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from interpolation.interpolators import TrainingSet

from .exceptions import FormatError
from .geo_grid import GeoPoint, GridSpec, LocalPoint, Raster

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6f'
SAMPLE_COLUMNS = ['x_m', 'y_m', 'value', 'cell_id']
WALKTEST_COLUMNS = ['timestamp_s', 'lat_deg', 'lon_deg', 'rsrp_dbm', 'rsrq_db', 'sinr_db', 'pci', 'n_prb']


def atomic_write_text(path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode('utf-8'))


def atomic_write_bytes(path, data: bytes) -> Path:
    """Write ``data`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, data) -> Path:
    return atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def file_digest(path) -> str:
    sha = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b''):
            sha.update(chunk)
    return f"sha256:{sha.hexdigest()}"


def _frame_to_csv(frame: pd.DataFrame, header=True) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, header=header, na_rep='', float_format=FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def _read_csv(path, **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(path, encoding='utf-8-sig', **kwargs)
    except pd.errors.EmptyDataError:
        return pd.DataFrame()
    except pd.errors.ParserError as exc:
        match = re.search(r'line (\d+)', str(exc))
        raise FormatError(str(exc).split('\n')[0], line=int(match.group(1)) if match else None, path=path) from exc
    except UnicodeDecodeError as exc:
        raise FormatError(f"not UTF-8 ({exc.reason})", path=path) from exc


# Rasters

def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix('.json')


def raster_sidecar(raster: Raster, metric: str = 'rssi', unit: str = 'dBm',
                   origin: Optional[GeoPoint] = None) -> dict:
    grid = raster.grid
    return {
        'origin_lat': origin.lat if origin is not None else None,
        'origin_lon': origin.lon if origin is not None else None,
        'origin_x_m': grid.origin.x,
        'origin_y_m': grid.origin.y,
        'bin_size_m': grid.bin_size,
        'n_cols': grid.n_cols,
        'n_rows': grid.n_rows,
        'metric': metric,
        'unit': unit,
    }


def raster_to_csv(raster: Raster) -> str:
    """Row-major matrix, northernmost row first; blank cells are bins without data."""
    return _frame_to_csv(pd.DataFrame(raster.values[::-1]), header=False)


def write_raster(path, raster: Raster, metric: str = 'rssi', unit: str = 'dBm',
                 origin: Optional[GeoPoint] = None) -> List[Path]:
    """Write the raster CSV and its JSON sidecar; returns both paths."""
    csv_path = atomic_write_text(path, raster_to_csv(raster))
    json_path = write_json(sidecar_path(path), raster_sidecar(raster, metric, unit, origin))
    return [csv_path, json_path]


def read_raster(path) -> Tuple[Raster, dict]:
    """Load a raster written by :func:`write_raster`; populated bins get count 1."""
    try:
        sidecar = json.loads(sidecar_path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, line=exc.lineno, path=sidecar_path(path)) from exc
    missing = {'bin_size_m', 'n_cols', 'n_rows'} - set(sidecar)
    if missing:
        raise FormatError(f"sidecar misses {sorted(missing)}", path=sidecar_path(path))
    grid = GridSpec(
        origin=LocalPoint(float(sidecar.get('origin_x_m') or 0.0), float(sidecar.get('origin_y_m') or 0.0)),
        bin_size=float(sidecar['bin_size_m']),
        n_cols=sidecar['n_cols'],
        n_rows=sidecar['n_rows'],
    )
    frame = _read_csv(path, header=None, skip_blank_lines=False)
    if frame.shape != grid.shape:
        raise FormatError(f"expected a {grid.n_rows}x{grid.n_cols} matrix, got {frame.shape[0]}x{frame.shape[1]}", path=path)
    try:
        values = frame.to_numpy(dtype=float)[::-1]
    except ValueError as exc:
        raise FormatError(f"non-numeric raster cell ({exc})", path=path) from exc
    return Raster.from_values(grid, values), sidecar


# Samples

def write_samples(path, train) -> Path:
    """``x_m,y_m,value,cell_id`` rows; cell_id is blank when the set carries none."""
    frame = pd.DataFrame({
        'x_m': train.points[:, 0],
        'y_m': train.points[:, 1],
        'value': train.values,
        'cell_id': pd.array(train.cell_ids if train.cell_ids is not None else [None] * len(train), dtype='Int64'),
    }, columns=SAMPLE_COLUMNS)
    return atomic_write_text(path, _frame_to_csv(frame))


def read_samples(path):
    """Load a samples CSV into a TrainingSet (cell ids kept only when every row has one)."""
    frame = _read_csv(path, dtype=str, keep_default_na=False)
    if frame.empty and not len(frame.columns):
        return TrainingSet(np.empty((0, 2)), np.empty(0))
    if list(frame.columns) != SAMPLE_COLUMNS:
        raise FormatError(f"expected header {','.join(SAMPLE_COLUMNS)}", line=1, path=path)
    numeric = {}
    for column in SAMPLE_COLUMNS[:3]:
        parsed = pd.to_numeric(frame[column], errors='coerce')
        bad = np.flatnonzero(parsed.isna().to_numpy())
        if len(bad):
            raise FormatError(f"{column} is not a number", line=int(bad[0]) + 2, path=path)
        numeric[column] = parsed.to_numpy(dtype=float)
    cell_ids = None
    raw_ids = frame['cell_id'].str.strip()
    if len(frame) and (raw_ids != '').all():
        parsed = pd.to_numeric(raw_ids, errors='coerce')
        bad = np.flatnonzero(parsed.isna().to_numpy())
        if len(bad):
            raise FormatError("cell_id is not an integer", line=int(bad[0]) + 2, path=path)
        cell_ids = parsed.to_numpy(dtype=np.int64)
    points = np.column_stack([numeric['x_m'], numeric['y_m']])
    return TrainingSet(points, numeric['value'], cell_ids)


# Walk-test logs

def read_walktest_rows(path) -> List[Tuple[int, dict]]:
    """(line number, raw string fields) per data row of a walk-test CSV.

    The header must match exactly; a row with the wrong number of fields is a
    format error. An empty file yields no rows.
    """
    frame = _read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    if frame.empty and not len(frame.columns):
        return []
    header = [str(c).strip() for c in frame.columns]
    if header != WALKTEST_COLUMNS:
        raise FormatError(f"expected header {','.join(WALKTEST_COLUMNS)}, got {','.join(header)}", line=1, path=path)
    frame.columns = WALKTEST_COLUMNS
    rows = []
    missing = frame.isna().to_numpy()
    for i, record in enumerate(frame.to_dict('records')):
        line = i + 2
        if missing[i].all():
            continue
        if missing[i].any():
            raise FormatError(f"expected {len(WALKTEST_COLUMNS)} fields", line=line, path=path)
        rows.append((line, {k: v.strip() for k, v in record.items()}))
    return rows


def write_quarantine(path, quarantined) -> Path:
    """``line,reasons,<walk-test columns>``; reasons are joined with ``; ``."""
    frame = pd.DataFrame(
        [{'line': q.line, 'reasons': '; '.join(q.reasons), **q.fields} for q in quarantined],
        columns=['line', 'reasons', *WALKTEST_COLUMNS],
    )
    return atomic_write_text(path, _frame_to_csv(frame))
