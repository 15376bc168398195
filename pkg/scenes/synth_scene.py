"""
Synthetic radio scenes used as a ground-truth oracle.

A scene is a set of transmitters over a rectangular extent. Each transmitter
contributes a log-distance path-loss field plus its own shadowing field, realised
once per extent bin from the scene seed; the received power in a bin is the
strongest transmitter there. Sampling the scene at arbitrary points reuses the
same shadowing realisation, so walk-test samples agree with the ground-truth map.
"""
import functools
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import fft

from interpolation.interpolators import TrainingSet
from radiomap.exceptions import ConfigError, ValidationError
from radiomap.geo_grid import GeoPoint, GridSpec, LocalPoint, Raster, as_xy, bin_indices

logger = logging.getLogger(__name__)

MIN_DISTANCE_M = 1.0
MIN_EXPONENT = 1.5
MAX_EXPONENT = 6.0
DEFAULT_BEAMWIDTH_DEG = 65.0
DEFAULT_FRONT_TO_BACK_DB = 25.0
DEFAULT_NOISE_DBM = -100.0
DEFAULT_WALK_SPACING_M = 5.0
DEFAULT_TIER = 'default'
# circulant embedding pads the extent by this many correlation lengths
SHADOW_PAD_LENGTHS = 5.0


@dataclass(frozen=True)
class Transmitter:
    """A radio with an omni or sector antenna.

    The antenna is directional when ``azimuth`` (degrees clockwise from north)
    is set; ``beamwidth`` and ``front_to_back`` then default to 65 degrees and 25 dB.
    """

    position: LocalPoint
    tx_power: float = 23.0
    ref_loss: float = 40.0
    exponent: float = 3.0
    azimuth: Optional[float] = None
    beamwidth: Optional[float] = None
    front_to_back: Optional[float] = None
    tier: str = DEFAULT_TIER
    cell_id: Optional[int] = None

    def __post_init__(self):
        if not MIN_EXPONENT <= self.exponent <= MAX_EXPONENT:
            raise ValidationError(
                f"path-loss exponent must be in [{MIN_EXPONENT}, {MAX_EXPONENT}], got {self.exponent}"
            )
        if not (math.isfinite(self.tx_power) and math.isfinite(self.ref_loss)):
            raise ValidationError("tx_power and ref_loss must be finite")
        if self.beamwidth is not None and not 0 < self.beamwidth <= 360:
            raise ValidationError(f"beamwidth must be in (0, 360], got {self.beamwidth}")
        if self.front_to_back is not None and not self.front_to_back >= 0:
            raise ValidationError(f"front_to_back must be >= 0, got {self.front_to_back}")
        if self.azimuth is not None and not math.isfinite(self.azimuth):
            raise ValidationError(f"azimuth must be finite, got {self.azimuth}")

    @property
    def is_directional(self) -> bool:
        return self.azimuth is not None

    def to_dict(self):
        data = asdict(self)
        del data['position']
        return {'x': self.position.x, 'y': self.position.y, **data}

    @classmethod
    def from_dict(cls, data, where='transmitter'):
        if not isinstance(data, dict):
            raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
        allowed = {f.name for f in fields(cls)} - {'position'} | {'x', 'y'}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        if 'x' not in data or 'y' not in data:
            raise ConfigError(f"{where}: 'x' and 'y' are required")
        values = {k: v for k, v in data.items() if k not in ('x', 'y')}
        try:
            return cls(position=LocalPoint(float(data['x']), float(data['y'])), **values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class SceneConfig:
    extent: GridSpec
    transmitters: Tuple[Transmitter, ...] = ()
    shadow_sigma: float = 0.0
    # 0 means spatially independent shadowing per bin
    shadow_correlation_length: float = 0.0
    seed: int = 0
    walk_spacing: float = DEFAULT_WALK_SPACING_M
    origin: Optional[GeoPoint] = None

    def __post_init__(self):
        txs = []
        for i, tx in enumerate(self.transmitters):
            if tx.cell_id is None:
                tx = replace(tx, cell_id=i)
            txs.append(tx)
        object.__setattr__(self, 'transmitters', tuple(txs))
        if not self.shadow_sigma >= 0:
            raise ValidationError(f"shadow_sigma must be >= 0, got {self.shadow_sigma}")
        if not self.shadow_correlation_length >= 0:
            raise ValidationError(
                f"shadow_correlation_length must be >= 0, got {self.shadow_correlation_length}"
            )
        if not self.walk_spacing > 0:
            raise ValidationError(f"walk_spacing must be > 0, got {self.walk_spacing}")

    @property
    def tiers(self) -> List[str]:
        return sorted({tx.tier for tx in self.transmitters})

    def to_dict(self):
        data = {
            'extent': self.extent.to_dict(),
            'transmitters': [tx.to_dict() for tx in self.transmitters],
            'shadow_sigma': self.shadow_sigma,
            'shadow_correlation_length': self.shadow_correlation_length,
            'seed': self.seed,
            'walk_spacing': self.walk_spacing,
        }
        if self.origin is not None:
            data['origin_lat'] = self.origin.lat
            data['origin_lon'] = self.origin.lon
        return data

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError(f"scene: expected an object, got {type(data).__name__}")
        known = {
            'extent', 'transmitters', 'shadow_sigma', 'shadow_correlation_length', 'seed',
            'walk_spacing', 'origin_lat', 'origin_lon',
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"scene: unknown keys {sorted(unknown)}")
        if 'extent' not in data:
            raise ConfigError("scene: missing 'extent'")
        txs = data.get('transmitters', [])
        if not isinstance(txs, list):
            raise ConfigError("scene: 'transmitters' must be a list")
        try:
            extent = GridSpec.from_dict(data['extent'])
            origin = None
            if data.get('origin_lat') is not None or data.get('origin_lon') is not None:
                origin = GeoPoint(float(data['origin_lat']), float(data['origin_lon']))
            return cls(
                extent=extent,
                transmitters=tuple(
                    Transmitter.from_dict(tx, where=f"transmitters[{i}]") for i, tx in enumerate(txs)
                ),
                shadow_sigma=float(data.get('shadow_sigma', 0.0)),
                shadow_correlation_length=float(data.get('shadow_correlation_length', 0.0)),
                seed=int(data.get('seed', 0)),
                walk_spacing=float(data.get('walk_spacing', DEFAULT_WALK_SPACING_M)),
                origin=origin,
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"scene: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> 'SceneConfig':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _directional_gain(tx: Transmitter, xy: np.ndarray) -> np.ndarray:
    """Parabolic sector pattern: -min(12 (theta / beamwidth)^2, front_to_back) dB."""
    bearing = np.degrees(np.arctan2(xy[:, 0] - tx.position.x, xy[:, 1] - tx.position.y))
    theta = np.abs((bearing - tx.azimuth + 180.0) % 360.0 - 180.0)
    beamwidth = tx.beamwidth if tx.beamwidth is not None else DEFAULT_BEAMWIDTH_DEG
    front_to_back = tx.front_to_back if tx.front_to_back is not None else DEFAULT_FRONT_TO_BACK_DB
    return -np.minimum(12.0 * (theta / beamwidth) ** 2, front_to_back)


def received_power_xy(tx: Transmitter, xy) -> np.ndarray:
    """Deterministic received power (dBm) of ``tx`` at every row of ``xy``."""
    xy = as_xy(xy)
    d = np.maximum(np.hypot(xy[:, 0] - tx.position.x, xy[:, 1] - tx.position.y), MIN_DISTANCE_M)
    power = tx.tx_power - (tx.ref_loss + 10.0 * tx.exponent * np.log10(d))
    if tx.is_directional:
        power = power + _directional_gain(tx, xy)
    return power


def received_power(tx: Transmitter, p: LocalPoint) -> float:
    return float(received_power_xy(tx, as_xy([p]))[0])


def _correlated_field(shape, bin_size, length, rng) -> np.ndarray:
    # circulant embedding of exp(-r / length) on a padded torus
    pad = int(math.ceil(SHADOW_PAD_LENGTHS * length / bin_size))
    n_rows, n_cols = shape
    p_rows = fft.next_fast_len(n_rows + pad)
    p_cols = fft.next_fast_len(n_cols + pad)
    dy = np.minimum(np.arange(p_rows), p_rows - np.arange(p_rows)) * bin_size
    dx = np.minimum(np.arange(p_cols), p_cols - np.arange(p_cols)) * bin_size
    covariance = np.exp(-np.hypot(dy[:, None], dx[None, :]) / length)
    eigenvalues = np.maximum(fft.fft2(covariance).real, 0.0)
    noise = rng.standard_normal((p_rows, p_cols))
    realised = fft.ifft2(np.sqrt(eigenvalues) * fft.fft2(noise)).real
    return realised[:n_rows, :n_cols]


@functools.lru_cache(maxsize=4)
def shadowing_fields(scene: SceneConfig) -> Tuple[np.ndarray, ...]:
    """One shadowing realisation (dB) per transmitter over the scene extent.

    Transmitter i draws from child i of the scene seed, so a transmitter's field
    does not depend on which other transmitters are enabled.
    """
    shape = scene.extent.shape
    if scene.shadow_sigma == 0:
        zeros = np.zeros(shape)
        zeros.setflags(write=False)
        return tuple(zeros for _ in scene.transmitters)
    children = np.random.SeedSequence(scene.seed).spawn(len(scene.transmitters))
    out = []
    for child in children:
        rng = np.random.default_rng(child)
        if scene.shadow_correlation_length == 0:
            unit = rng.standard_normal(shape)
        else:
            unit = _correlated_field(
                shape, scene.extent.bin_size, scene.shadow_correlation_length, rng,
            )
        realised = scene.shadow_sigma * unit
        realised.setflags(write=False)
        out.append(realised)
    logger.debug("Realised %d shadowing fields over %s bins", len(out), shape)
    return tuple(out)


def _enabled(scene: SceneConfig, tiers: Optional[Iterable[str]]) -> List[int]:
    if not scene.transmitters:
        raise ValidationError("scene has no transmitters")
    if tiers is None:
        return list(range(len(scene.transmitters)))
    tiers = set(tiers)
    unknown = tiers - set(scene.tiers)
    if unknown:
        raise ValidationError(f"unknown transmitter tiers {sorted(unknown)}; scene has {scene.tiers}")
    enabled = [i for i, tx in enumerate(scene.transmitters) if tx.tier in tiers]
    if not enabled:
        raise ValidationError(f"no transmitters in tiers {sorted(tiers)}")
    return enabled


def _power_stack(scene: SceneConfig, xy: np.ndarray, enabled: List[int]) -> np.ndarray:
    """(len(enabled), len(xy)) received powers including shadowing.

    Points are looked up in the extent bin that holds them, clamped to the
    nearest edge bin when they fall outside.
    """
    cols, rows, _ = bin_indices(scene.extent, xy)
    cols = np.clip(cols, 0, scene.extent.n_cols - 1)
    rows = np.clip(rows, 0, scene.extent.n_rows - 1)
    shadows = shadowing_fields(scene) if scene.shadow_sigma > 0 else None
    stack = np.empty((len(enabled), len(xy)))
    for k, i in enumerate(enabled):
        power = received_power_xy(scene.transmitters[i], xy)
        if shadows is not None:
            power = power + shadows[i][rows, cols]
        stack[k] = power
    return stack


def ground_truth_raster(scene: SceneConfig, grid: Optional[GridSpec] = None,
                        tiers: Optional[Iterable[str]] = None) -> Raster:
    """Strongest received power at every bin centre of ``grid`` (default: the scene extent).

    ``tiers`` restricts the map to transmitters of those tiers.
    """
    grid = grid or scene.extent
    enabled = _enabled(scene, tiers)
    stack = _power_stack(scene, grid.bin_centers(), enabled)
    return Raster.from_values(grid, stack.max(axis=0))


def sinr_raster(scene: SceneConfig, grid: Optional[GridSpec] = None,
                noise_dbm: float = DEFAULT_NOISE_DBM, tiers: Optional[Iterable[str]] = None) -> Raster:
    """Ground-truth SINR (dB): strongest transmitter over the sum of the others plus noise."""
    grid = grid or scene.extent
    enabled = _enabled(scene, tiers)
    stack = _power_stack(scene, grid.bin_centers(), enabled)
    strongest = stack.max(axis=0)
    linear = np.power(10.0, stack / 10.0)
    interference = linear.sum(axis=0) - np.power(10.0, strongest / 10.0)
    denominator = np.maximum(interference, 0.0) + 10.0 ** (noise_dbm / 10.0)
    return Raster.from_values(grid, strongest - 10.0 * np.log10(denominator))


def sample_scene(scene: SceneConfig, points, tiers: Optional[Iterable[str]] = None) -> TrainingSet:
    """Received power at ``points`` with the scene's shadowing, tagged with the serving cell."""
    xy = as_xy(points)
    _, _, inside = bin_indices(scene.extent, xy)
    if not np.all(inside):
        raise ValidationError(
            f"{int(np.count_nonzero(~inside))} of {len(xy)} sample points lie outside the scene extent"
        )
    enabled = _enabled(scene, tiers)
    if len(xy) == 0:
        return TrainingSet(xy, np.empty(0), np.empty(0, dtype=np.int64))
    stack = _power_stack(scene, xy, enabled)
    best = np.argmax(stack, axis=0)
    cell_ids = np.array([scene.transmitters[i].cell_id for i in enabled], dtype=np.int64)[best]
    return TrainingSet(xy, stack[best, np.arange(len(xy))], cell_ids)


def walk_path_xy(extent: GridSpec, spacing: float, seed: int = 0) -> np.ndarray:
    """Serpentine walk over ``extent`` sampled every ``spacing`` metres, with seeded jitter."""
    if not (math.isfinite(spacing) and spacing > 0):
        raise ValidationError(f"spacing must be > 0, got {spacing}")
    x0, y0 = extent.origin.x, extent.origin.y
    width, height = extent.width, extent.height
    n_lanes = max(1, int(round(height / spacing)))
    lane_y = y0 + (np.arange(n_lanes) + 0.5) * height / n_lanes
    margin = 0.5 * min(spacing, width)
    left, right = x0 + margin, x0 + width - margin

    vertices = []
    for i, y in enumerate(lane_y):
        ends = (left, right) if i % 2 == 0 else (right, left)
        vertices.extend([(ends[0], y), (ends[1], y)])
    vertices = np.array(vertices)
    steps = np.hypot(*np.diff(vertices, axis=0).T)
    keep = np.concatenate([[True], steps > 0])
    vertices = vertices[keep]
    arc = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(vertices, axis=0).T))])

    stations = np.arange(0.0, arc[-1] + 1e-9, spacing)
    xy = np.column_stack([np.interp(stations, arc, vertices[:, 0]), np.interp(stations, arc, vertices[:, 1])])
    rng = np.random.default_rng(seed)
    xy = xy + rng.normal(0.0, spacing / 10.0, size=xy.shape)
    xy[:, 0] = np.clip(xy[:, 0], x0, np.nextafter(x0 + width, x0))
    xy[:, 1] = np.clip(xy[:, 1], y0, np.nextafter(y0 + height, y0))
    return xy


def synth_walk_path(extent: GridSpec, spacing: float, seed: int = 0) -> List[LocalPoint]:
    return [LocalPoint(float(x), float(y)) for x, y in walk_path_xy(extent, spacing, seed)]


@dataclass(frozen=True, eq=False)
class SyntheticCampaign:
    """Everything ``synth`` produces for one scene."""

    scene: SceneConfig
    ground_truth: Raster
    samples: TrainingSet
    sinr: Optional[Raster] = None
    tiers: Optional[Tuple[str, ...]] = field(default=None)


def synthesize(scene: SceneConfig, tiers: Optional[Iterable[str]] = None,
               with_sinr: bool = False, noise_dbm: float = DEFAULT_NOISE_DBM) -> SyntheticCampaign:
    """Ground truth plus a walk test over the scene extent, all from ``scene.seed``."""
    tiers = tuple(sorted(tiers)) if tiers is not None else None
    truth = ground_truth_raster(scene, tiers=tiers)
    path = walk_path_xy(scene.extent, scene.walk_spacing, scene.seed)
    samples = sample_scene(scene, path, tiers=tiers)
    sinr = sinr_raster(scene, noise_dbm=noise_dbm, tiers=tiers) if with_sinr else None
    logger.info(
        "Synthesised %d transmitters over %dx%d bins; walk of %d samples",
        len(scene.transmitters), scene.extent.n_cols, scene.extent.n_rows, len(samples),
    )
    return SyntheticCampaign(scene=scene, ground_truth=truth, samples=samples, sinr=sinr, tiers=tiers)
