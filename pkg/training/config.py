"""
Experiment configuration: the JSON schema, validation and named presets.
"""
import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from model import FOURIER_DEFAULTS, METHODS, WEIGHTINGS
from WeakSINDy.ode_bench import SYSTEM_CONFIG, make_system
from WeakSINDy.sparse_regression import SOLVER_DEFAULTS, SolverConfig


class ConfigError(ValueError):
    """Invalid experiment configuration."""


BENCHMARK_PROTOCOL = {
    'SYSTEM': 'lorenz',
    'T': 10.0,  # seconds
    'FS': 1000.0,  # Hz
    'DEGREE': 2,
    # 0.0001% to 100%
    'NOISE_LEVELS': [1e-6, 1e-4, 1e-2, 0.05, 0.25, 0.5, 1.0],
    'INSTANCES': 20,
    'SEED': 0,
    'METHODS': [
        {"name": "sindy", "label": "sindy", "params": {}},
        {"name": "wsindy_bump", "label": "wsindy_bump", "params": {"p": 1000, "q": 4}},
        {"name": "wsindy_fourier_sweep", "label": "fourier_sweep", "params": {"L_max": 500}},
        {"name": "wsindy_fourier_sde", "label": "fourier_sde", "params": {"K": 100, "nw": 4.0}},
    ],
}

METHOD_PARAMS = {
    "sindy": set(),
    "wsindy_bump": {"p", "q"},
    "wsindy_fourier_sweep": {"L_max", "weighting"},
    "wsindy_fourier_sde": {"K", "nw", "bandwidth_hz", "alpha", "weighting"},
    "wsindy_fourier_oracle": {"K", "weighting"},
}


@dataclass
class ExperimentConfig:
    """One benchmark sweep.

    Attributes:
        system: Benchmark system identifier
        params: System parameter overrides
        x0: Initial state (None uses the system default)
        T: Duration in seconds
        fs: Sampling rate in Hz
        degree: Polynomial dictionary degree
        noise_levels: Noise ratios
        instances_per_level: Noise realizations per level
        seed: Base seed for all noise realizations
        methods: Learners as {"name", "label", "params"}
        solver: SolverConfig fields
        traj_error: {"enabled": bool, "horizon": seconds or None for T}
    """
    system: str = BENCHMARK_PROTOCOL['SYSTEM']
    params: Dict[str, float] = field(default_factory=dict)
    x0: Optional[List[float]] = None
    T: float = BENCHMARK_PROTOCOL['T']
    fs: float = BENCHMARK_PROTOCOL['FS']
    degree: int = BENCHMARK_PROTOCOL['DEGREE']
    noise_levels: List[float] = field(default_factory=lambda: list(BENCHMARK_PROTOCOL['NOISE_LEVELS']))
    instances_per_level: int = BENCHMARK_PROTOCOL['INSTANCES']
    seed: int = BENCHMARK_PROTOCOL['SEED']
    methods: List[Dict[str, Any]] = field(default_factory=lambda: copy.deepcopy(BENCHMARK_PROTOCOL['METHODS']))
    solver: Dict[str, Any] = field(default_factory=lambda: {
        "threshold": SOLVER_DEFAULTS['THRESHOLD'],
        "ridge": SOLVER_DEFAULTS['RIDGE'],
        "max_iters": SOLVER_DEFAULTS['MAX_ITERS'],
        "normalize_columns": False,
        "debias": False,
    })
    traj_error: Dict[str, Any] = field(default_factory=lambda: {"enabled": False, "horizon": None})

    def __post_init__(self):
        self.validate()

    def validate(self):
        try:
            make_system(self.system, self.params)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        dim = len(SYSTEM_CONFIG[self.system]["x0"])
        if self.x0 is not None:
            if len(self.x0) != dim or not np.all(np.isfinite(self.x0)):
                raise ConfigError(f"x0 must be {dim} finite numbers, got {self.x0}")
        if not (self.T > 0 and self.fs > 0):
            raise ConfigError(f"T and fs must be positive, got T={self.T}, fs={self.fs}")
        if int(self.degree) != self.degree or self.degree < 0:
            raise ConfigError(f"degree must be a non-negative integer, got {self.degree}")
        if len(self.noise_levels) == 0:
            raise ConfigError("noise_levels is empty")
        for level in self.noise_levels:
            if not (np.isfinite(level) and level >= 0):
                raise ConfigError(f"Noise levels must be finite and >= 0, got {level}")
        if int(self.instances_per_level) != self.instances_per_level or self.instances_per_level < 1:
            raise ConfigError(f"instances_per_level must be >= 1, got {self.instances_per_level}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        self._validate_methods()
        try:
            self.solver_config()
        except (TypeError, ValueError) as err:
            raise ConfigError(f"Invalid solver settings: {err}") from err
        unknown = set(self.traj_error) - {"enabled", "horizon"}
        if unknown:
            raise ConfigError(f"Unknown traj_error keys: {sorted(unknown)}")
        horizon = self.traj_error.get("horizon")
        if horizon is not None and not horizon > 0:
            raise ConfigError(f"Trajectory error horizon must be positive, got {horizon}")

    def _validate_methods(self):
        if len(self.methods) == 0:
            raise ConfigError("methods is empty")
        labels = []
        for method in self.methods:
            unknown = set(method) - {"name", "label", "params"}
            if unknown:
                raise ConfigError(f"Unknown method keys: {sorted(unknown)}")
            name = method.get("name")
            if name not in METHODS:
                raise ConfigError(f"Unsupported method: {name} (choose from {METHODS})")
            extra = set(method.get("params", {})) - METHOD_PARAMS[name]
            if extra:
                raise ConfigError(f"Unknown parameters {sorted(extra)} for method {name}")
            weighting = method.get("params", {}).get("weighting", FOURIER_DEFAULTS['WEIGHTING'])
            if weighting not in WEIGHTINGS:
                raise ConfigError(f"Unsupported weighting '{weighting}' for method {name} "
                                  f"(choose from {list(WEIGHTINGS)})")
            labels.append(method.get("label", name))
        if len(set(labels)) != len(labels):
            raise ConfigError(f"Method labels must be unique, got {labels}")

    @property
    def method_labels(self) -> List[str]:
        return [m.get("label", m["name"]) for m in self.methods]

    @property
    def traj_horizon(self) -> float:
        return self.traj_error.get("horizon") or self.T

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"Configuration must be a JSON object, got {type(raw).__name__}")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        base = cls().to_dict()
        if "solver" in raw:
            base["solver"].update(raw["solver"])
            raw = {**raw, "solver": base["solver"]}
        if "traj_error" in raw:
            base["traj_error"].update(raw["traj_error"])
            raw = {**raw, "traj_error": base["traj_error"]}
        try:
            return cls(**{**base, **raw})
        except TypeError as err:
            raise ConfigError(str(err)) from err


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as err:
        raise ConfigError(f"Cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"Config {path} is not valid JSON: {err}") from err
    return ExperimentConfig.from_dict(raw)


PRESETS = {
    "lorenz": {},
    "lorenz-vary-k": {
        "noise_levels": [1e-4, 1e-2, 0.1, 0.25, 0.5, 1.0],
        "methods": [
            {"name": "wsindy_fourier_oracle", "label": f"oracle_K{K}", "params": {"K": K}}
            for K in (10, 30, 50, 100, 200)
        ],
    },
    "lorenz-vary-bw": {
        "noise_levels": [1e-4, 1e-2, 0.1, 0.25, 0.5, 1.0],
        "methods": [
            {"name": "wsindy_fourier_sde", "label": f"sde_bw{bw:g}Hz", "params": {"K": 100, "bandwidth_hz": bw}}
            for bw in (0.1, 0.2, 0.4, 0.8, 1.6)
        ],
    },
    "lotka-volterra": {"system": "lotka_volterra"},
    "hyper-lorenz": {"system": "hyper_lorenz"},
    "hyper-jha": {"system": "hyper_jha"},
    "lorenz-degree5": {"degree": 5},
    "hyper-lorenz-degree3": {"system": "hyper_lorenz", "degree": 3},
    "hyper-jha-degree3": {"system": "hyper_jha", "degree": 3},
    "lorenz-trajectory": {
        "noise_levels": [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.15, 0.2, 0.3],
        "methods": [m for m in BENCHMARK_PROTOCOL['METHODS'] if m["name"] != "wsindy_fourier_sweep"],
        "traj_error": {"enabled": True, "horizon": None},
    },
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset: {name} (choose from {sorted(PRESETS)})")
    return ExperimentConfig.from_dict(copy.deepcopy(PRESETS[name]))
