"""
Interpolator configuration and its JSON form.

A configuration document looks like::

    {"method": "RBF", "params": {"epsilon": 1.0, "smoothing": 0.1}, "seed": 0}

Omitted parameters take the defaults below; unknown methods or parameters are
configuration errors.
"""
import json
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Optional, Tuple

from radiomap.exceptions import ConfigError, ValidationError


class Method(str, Enum):
    IDW = 'IDW'
    RBF = 'RBF'
    OK = 'OK'
    RF = 'RF'
    GBT = 'GBT'
    MRI = 'MRI'


METHOD_ALIASES = {
    'XGBOOST': Method.GBT,
    'KRIGING': Method.OK,
}


def parse_method(tag) -> Method:
    if isinstance(tag, Method):
        return tag
    key = str(tag).strip().upper()
    if key in METHOD_ALIASES:
        return METHOD_ALIASES[key]
    try:
        return Method(key)
    except ValueError:
        known = ', '.join(m.value for m in Method)
        raise ConfigError(f"unknown interpolation method {tag!r} (known: {known})") from None


@dataclass(frozen=True)
class IdwParams:
    power: float = 2.0
    k_neighbors: int = 12

    def __post_init__(self):
        if not self.power > 0:
            raise ValidationError(f"IDW power must be > 0, got {self.power}")
        if self.k_neighbors < 1:
            raise ValidationError(f"IDW k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class RbfParams:
    # epsilon is in 1/m, applied to raw metric distances
    epsilon: float = 1.0
    smoothing: float = 0.1
    global_limit: int = 2000
    n_neighbors: int = 64

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"RBF epsilon must be > 0, got {self.epsilon}")
        if not self.smoothing >= 0:
            raise ValidationError(f"RBF smoothing must be >= 0, got {self.smoothing}")
        if self.n_neighbors < 3:
            raise ValidationError(f"RBF n_neighbors must be >= 3, got {self.n_neighbors}")


@dataclass(frozen=True)
class OkParams:
    variogram: str = 'exponential'
    n_lags: int = 20
    max_lag: Optional[float] = None
    n_neighbors: int = 64
    global_limit: int = 2000
    # a fixed variogram skips fitting; give all three or none
    variogram_nugget: Optional[float] = None
    variogram_sill: Optional[float] = None
    variogram_range: Optional[float] = None

    def __post_init__(self):
        if self.variogram not in ('exponential', 'spherical'):
            raise ValidationError(f"unknown variogram kind {self.variogram!r}")
        if self.n_lags < 1:
            raise ValidationError(f"OK n_lags must be >= 1, got {self.n_lags}")
        if self.max_lag is not None and not self.max_lag > 0:
            raise ValidationError(f"OK max_lag must be > 0, got {self.max_lag}")
        if self.n_neighbors < 1:
            raise ValidationError(f"OK n_neighbors must be >= 1, got {self.n_neighbors}")
        fixed = (self.variogram_nugget, self.variogram_sill, self.variogram_range)
        if any(v is not None for v in fixed) and any(v is None for v in fixed):
            raise ValidationError("a fixed variogram needs nugget, sill and range")

    @property
    def has_fixed_variogram(self) -> bool:
        return self.variogram_range is not None


@dataclass(frozen=True)
class RfParams:
    n_trees: int = 100
    max_depth: Optional[int] = 12
    min_leaf: int = 5
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValidationError(f"RF n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValidationError(f"RF max_depth must be >= 0, got {self.max_depth}")
        if self.min_leaf < 1:
            raise ValidationError(f"RF min_leaf must be >= 1, got {self.min_leaf}")


@dataclass(frozen=True)
class GbtParams:
    n_rounds: int = 200
    learning_rate: float = 0.1
    max_depth: int = 4

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValidationError(f"GBT n_rounds must be >= 1, got {self.n_rounds}")
        if not 0 < self.learning_rate <= 1:
            raise ValidationError(f"GBT learning_rate must be in (0, 1], got {self.learning_rate}")
        if self.max_depth < 0:
            raise ValidationError(f"GBT max_depth must be >= 0, got {self.max_depth}")


@dataclass(frozen=True)
class TransmitterSite:
    """Known transmitter position for path-loss regression; ``cell_id`` defaults to its list index."""

    x: float
    y: float
    cell_id: Optional[int] = None


@dataclass(frozen=True)
class MriParams:
    transmitters: Tuple[TransmitterSite, ...] = ()
    residual_idw: bool = False
    idw_power: float = 2.0
    idw_k_neighbors: int = 12

    def __post_init__(self):
        sites = []
        for i, site in enumerate(self.transmitters):
            if isinstance(site, dict):
                site = TransmitterSite(**site)
            elif not isinstance(site, TransmitterSite):
                x, y = site
                site = TransmitterSite(float(x), float(y))
            if site.cell_id is None:
                site = TransmitterSite(site.x, site.y, i)
            sites.append(site)
        object.__setattr__(self, 'transmitters', tuple(sites))
        if not self.idw_power > 0:
            raise ValidationError(f"MRI idw_power must be > 0, got {self.idw_power}")


PARAMS_BY_METHOD = {
    Method.IDW: IdwParams,
    Method.RBF: RbfParams,
    Method.OK: OkParams,
    Method.RF: RfParams,
    Method.GBT: GbtParams,
    Method.MRI: MriParams,
}


@dataclass(frozen=True)
class InterpolatorConfig:
    method: Method
    params: object = None
    seed: int = 0
    label: Optional[str] = None

    def __post_init__(self):
        method = parse_method(self.method)
        object.__setattr__(self, 'method', method)
        params_cls = PARAMS_BY_METHOD[method]
        if self.params is None:
            object.__setattr__(self, 'params', params_cls())
        elif not isinstance(self.params, params_cls):
            raise ConfigError(f"{method.value} expects {params_cls.__name__}")

    @property
    def name(self) -> str:
        return self.label or self.method.value

    @classmethod
    def default_rbf(cls, seed: int = 0) -> 'InterpolatorConfig':
        """The map-building default: multiquadric RBF with epsilon 1 and smoothing 0.1."""
        return cls(Method.RBF, RbfParams(epsilon=1.0, smoothing=0.1), seed=seed)

    def with_params(self, **changes) -> 'InterpolatorConfig':
        values = asdict(self.params)
        values.update(changes)
        return InterpolatorConfig(self.method, type(self.params)(**values), self.seed, self.label)

    @classmethod
    def from_dict(cls, data, where='config') -> 'InterpolatorConfig':
        if not isinstance(data, dict):
            raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
        unknown = set(data) - {'method', 'params', 'seed', 'label'}
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        if 'method' not in data:
            raise ConfigError(f"{where}: missing 'method'")
        method = parse_method(data['method'])
        params_cls = PARAMS_BY_METHOD[method]
        raw = data.get('params') or {}
        allowed = {f.name for f in fields(params_cls)}
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"{where}: unknown {method.value} parameters {sorted(unknown)}")
        if method is Method.MRI and 'transmitters' in raw:
            raw = dict(raw, transmitters=tuple(
                TransmitterSite(**site) if isinstance(site, dict) else TransmitterSite(*site)
                for site in raw['transmitters']
            ))
        try:
            params = params_cls(**raw)
        except (TypeError, ValidationError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        return cls(method, params, seed=int(data.get('seed', 0)), label=data.get('label'))

    def to_dict(self):
        params = asdict(self.params)
        if self.method is Method.MRI:
            params['transmitters'] = [asdict(site) for site in self.params.transmitters]
        data = {'method': self.method.value, 'params': params, 'seed': self.seed}
        if self.label:
            data['label'] = self.label
        return data

    @classmethod
    def from_json(cls, text: str) -> 'InterpolatorConfig':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_methods(data):
    """Method list from ``{"methods": [...]}`` or a bare list of configuration objects."""
    if isinstance(data, dict):
        if 'methods' not in data:
            raise ConfigError("methods document needs a 'methods' list")
        data = data['methods']
    if not isinstance(data, list):
        raise ConfigError("methods must be a list")
    configs = [InterpolatorConfig.from_dict(item, where=f"methods[{i}]") for i, item in enumerate(data)]
    names = [c.name for c in configs]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ConfigError(f"duplicate method labels {duplicates}; set 'label' to tell them apart")
    return configs
