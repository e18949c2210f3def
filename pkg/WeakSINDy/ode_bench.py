"""
Benchmark dynamical systems, fixed-step RK4 simulation and measurement noise.

Four benchmark systems are provided (Lorenz, Lotka-Volterra, hyperchaotic
Lorenz, hyperchaotic Jha). Each carries a hand-written right-hand side and a
term table so that its exact coefficient matrix can be expressed in any
polynomial dictionary of sufficient degree.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .dictionary import CoefficientMatrix, DictionarySpec

logger = logging.getLogger(__name__)

# Integrator contract
RK4_SUBSTEPS = 10
DIVERGENCE_LIMIT = 1e8

Terms = Tuple[Dict[Tuple[int, ...], float], ...]


class DivergenceError(RuntimeError):
    """Raised when a simulated state leaves the finite region |x| <= 1e8."""

    def __init__(self, t: float, state: np.ndarray):
        self.t = float(t)
        self.state = np.array(state)
        super().__init__(f"Simulation diverged at t = {self.t:.6g} s (state {self.state})")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled multivariate time series.

    Attributes:
        t0: Start time in seconds
        dt: Sampling interval in seconds
        states: k x n matrix, one row per snapshot
    """
    t0: float
    dt: float
    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=np.float64)
        if states.ndim == 1:
            states = states[:, None]
        if states.ndim != 2 or states.shape[0] < 2:
            raise ValueError(f"Trajectory needs at least 2 snapshots, got shape {states.shape}")
        if not self.dt > 0:
            raise ValueError(f"Sampling interval must be positive, got {self.dt}")
        if not np.all(np.isfinite(states)):
            raise ValueError("Trajectory contains non-finite entries")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def k(self) -> int:
        return self.states.shape[0]

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def duration(self) -> float:
        return (self.k - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.k)


@dataclass(frozen=True)
class NoiseSpec:
    noise_ratio: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.noise_ratio) and self.noise_ratio >= 0):
            raise ValueError(f"Noise ratio must be finite and >= 0, got {self.noise_ratio}")


@dataclass(frozen=True)
class OdeSystem:
    """Polynomial ODE x' = f(x).

    Attributes:
        name: System identifier
        dim: State dimension n
        params: Named scalar parameters
        rhs: Direct evaluation of f at a state
        terms: Per component, exponent tuple -> coefficient
        x0: Default initial condition
    """
    name: str
    dim: int
    params: Mapping[str, float]
    rhs: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    terms: Terms = field(repr=False)
    x0: Tuple[float, ...] = ()

    @property
    def degree(self) -> int:
        return max((sum(alpha) for comp in self.terms for alpha in comp), default=0)

    def true_coeffs(self, spec: DictionarySpec) -> CoefficientMatrix:
        """Exact coefficient matrix of this system in the given dictionary."""
        if spec.dim != self.dim:
            raise ValueError(f"Dictionary dimension {spec.dim} does not match system '{self.name}' ({self.dim})")
        if spec.degree < self.degree:
            raise ValueError(
                f"System '{self.name}' needs dictionary degree >= {self.degree}, got {spec.degree}"
            )
        W = np.zeros((spec.m, self.dim))
        for i, component in enumerate(self.terms):
            for alpha, coefficient in component.items():
                W[spec.index(alpha), i] += coefficient
        return CoefficientMatrix(W, spec)


def _lorenz(sigma, rho, beta):
    def rhs(x):
        return np.array([
            sigma * (x[1] - x[0]),
            x[0] * (rho - x[2]) - x[1],
            x[0] * x[1] - beta * x[2],
        ])
    terms = (
        {(1, 0, 0): -sigma, (0, 1, 0): sigma},
        {(1, 0, 0): rho, (1, 0, 1): -1.0, (0, 1, 0): -1.0},
        {(1, 1, 0): 1.0, (0, 0, 1): -beta},
    )
    return rhs, terms


def _lotka_volterra(alpha, beta, gamma):
    def rhs(x):
        return np.array([
            alpha * x[0] - beta * x[0] * x[1],
            -gamma * x[1] + beta * x[0] * x[1],
        ])
    terms = (
        {(1, 0): alpha, (1, 1): -beta},
        {(0, 1): -gamma, (1, 1): beta},
    )
    return rhs, terms


def _hyper_lorenz(a, b, c, d):
    def rhs(x):
        return np.array([
            a * (x[1] - x[0]) + x[3],
            -x[0] * x[2] + c * x[0] - x[1],
            -b * x[2] + x[0] * x[1],
            d * x[3] - x[0] * x[2],
        ])
    terms = (
        {(1, 0, 0, 0): -a, (0, 1, 0, 0): a, (0, 0, 0, 1): 1.0},
        {(1, 0, 1, 0): -1.0, (1, 0, 0, 0): c, (0, 1, 0, 0): -1.0},
        {(0, 0, 1, 0): -b, (1, 1, 0, 0): 1.0},
        {(0, 0, 0, 1): d, (1, 0, 1, 0): -1.0},
    )
    return rhs, terms


def _hyper_jha(a, b, c, d):
    def rhs(x):
        return np.array([
            a * (x[1] - x[0]) + x[3],
            -x[0] * x[2] + b * x[0] - x[1],
            x[0] * x[1] - c * x[2],
            -x[0] * x[2] + d * x[3],
        ])
    terms = (
        {(1, 0, 0, 0): -a, (0, 1, 0, 0): a, (0, 0, 0, 1): 1.0},
        {(1, 0, 1, 0): -1.0, (1, 0, 0, 0): b, (0, 1, 0, 0): -1.0},
        {(1, 1, 0, 0): 1.0, (0, 0, 1, 0): -c},
        {(1, 0, 1, 0): -1.0, (0, 0, 0, 1): d},
    )
    return rhs, terms


SYSTEM_CONFIG = {
    "lorenz": {
        "builder": _lorenz,
        "params": {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0},
        "x0": (20.0, 12.0, -30.0),
    },
    "lotka_volterra": {
        "builder": _lotka_volterra,
        "params": {"alpha": 3.0, "beta": 1.0, "gamma": 6.0},
        "x0": (1.0, 1.0),
    },
    "hyper_lorenz": {
        "builder": _hyper_lorenz,
        "params": {"a": 10.0, "b": 2.667, "c": 28.0, "d": 1.1},
        "x0": (5.0, 8.0, 12.0, 21.0),
    },
    "hyper_jha": {
        "builder": _hyper_jha,
        "params": {"a": 10.0, "b": 28.0, "c": 8.0 / 3.0, "d": 1.3},
        "x0": (0.1, 0.1, 0.1, 0.1),
    },
}


def make_system(name: str, params: Optional[Mapping[str, float]] = None) -> OdeSystem:
    """Create one of the benchmark systems.

    Args:
        name: One of lorenz, lotka_volterra, hyper_lorenz, hyper_jha
        params: Optional parameter overrides

    Returns:
        OdeSystem: System with default parameters unless overridden
    """
    if name not in SYSTEM_CONFIG:
        raise ValueError(f"Unsupported system: {name} (choose from {sorted(SYSTEM_CONFIG)})")
    config = SYSTEM_CONFIG[name]
    merged = dict(config["params"])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"Unknown parameter '{key}' for system '{name}'")
        if not np.isfinite(value):
            raise ValueError(f"Parameter '{key}' must be finite, got {value}")
        merged[key] = float(value)
    rhs, terms = config["builder"](**merged)
    return OdeSystem(name=name, dim=len(config["x0"]), params=merged, rhs=rhs,
                     terms=terms, x0=config["x0"])


def make_polynomial_system(
    name: str,
    terms: Sequence[Mapping[Tuple[int, ...], float]],
    x0: Optional[Sequence[float]] = None,
) -> OdeSystem:
    """Build a user-supplied polynomial system from its term table."""
    dim = len(terms)
    if dim < 1:
        raise ValueError("A polynomial system needs at least one component")
    table = []
    for component in terms:
        entries = {}
        for alpha, coefficient in component.items():
            alpha = tuple(int(p) for p in alpha)
            if len(alpha) != dim or min(alpha, default=0) < 0:
                raise ValueError(f"Invalid exponent tuple {alpha} for a {dim}-dimensional system")
            if not np.isfinite(coefficient):
                raise ValueError(f"Coefficient of {alpha} must be finite, got {coefficient}")
            if coefficient != 0:
                entries[alpha] = float(coefficient)
        table.append(entries)
    table = tuple(table)

    exponents = sorted({alpha for component in table for alpha in component})
    W = np.zeros((len(exponents), dim))
    for i, component in enumerate(table):
        for alpha, coefficient in component.items():
            W[exponents.index(alpha), i] = coefficient

    powers = np.array(exponents, dtype=np.int64).reshape(len(exponents), dim)

    def rhs(x):
        return np.prod(np.asarray(x, dtype=np.float64) ** powers, axis=1) @ W

    if x0 is None:
        x0 = (0.0,) * dim
    return OdeSystem(name=name, dim=dim, params={}, rhs=rhs, terms=table,
                     x0=tuple(float(v) for v in x0))


def system_from_coefficients(W: CoefficientMatrix, name: str = "learned") -> OdeSystem:
    """Turn a learned coefficient matrix into a simulatable system."""
    if W.spec is None:
        raise ValueError("Coefficient matrix has no dictionary attached")
    terms = []
    for i in range(W.spec.dim):
        column = W.values[:, i]
        terms.append({alpha: float(column[j]) for j, alpha in enumerate(W.spec.terms)
                      if column[j] != 0})
    return make_polynomial_system(name, terms)


def _rk4_step(rhs, x, h):
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * h * k1)
    k3 = rhs(x + 0.5 * h * k2)
    k4 = rhs(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(sys: OdeSystem, x0: Optional[Sequence[float]], T: float, fs: float) -> Trajectory:
    """Integrate a system on a uniform grid with classical RK4.

    Args:
        sys: System to integrate
        x0: Initial state (None uses the system default)
        T: Duration in seconds
        fs: Sampling rate in Hz

    Returns:
        Trajectory: round(T * fs) samples at dt = 1 / fs starting at t0 = 0

    Raises:
        DivergenceError: if any component exceeds 1e8 in magnitude or becomes non-finite
    """
    if not (T > 0 and fs > 0):
        raise ValueError(f"Duration and sampling rate must be positive, got T={T}, fs={fs}")
    x = np.array(sys.x0 if x0 is None else x0, dtype=np.float64)
    if x.shape != (sys.dim,):
        raise ValueError(f"Initial state has shape {x.shape}, system '{sys.name}' expects ({sys.dim},)")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"Initial state must be finite, got {x}")

    k = int(round(T * fs))
    if k < 2:
        raise ValueError(f"T * fs must give at least 2 samples, got {k}")
    dt = 1.0 / fs
    h = dt / RK4_SUBSTEPS
    states = np.empty((k, sys.dim))
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, k):
            for s in range(RK4_SUBSTEPS):
                x = _rk4_step(sys.rhs, x, h)
                if not np.all(np.abs(x) <= DIVERGENCE_LIMIT):
                    t = (i - 1) * dt + (s + 1) * h
                    logger.debug("System '%s' diverged at t=%.4f", sys.name, t)
                    raise DivergenceError(t, x)
            states[i] = x
    return Trajectory(t0=0.0, dt=dt, states=states)


def noise_sigma(traj: Trajectory, noise_ratio: float) -> float:
    """Noise standard deviation sigma_NR * ||X||_F / sqrt(k n) of a clean trajectory."""
    return float(noise_ratio * np.linalg.norm(traj.states) / np.sqrt(traj.states.size))


def add_noise(traj: Trajectory, spec: NoiseSpec) -> Trajectory:
    """Add i.i.d. Gaussian measurement noise scaled from the clean trajectory.

    Samples come from a Philox counter-based generator seeded with spec.seed,
    so outputs are bit-reproducible for a given seed.
    """
    sigma = noise_sigma(traj, spec.noise_ratio)
    if sigma == 0:
        return Trajectory(t0=traj.t0, dt=traj.dt, states=traj.states.copy())
    rng = np.random.Generator(np.random.Philox(spec.seed))
    noise = rng.standard_normal(traj.states.shape)
    return Trajectory(t0=traj.t0, dt=traj.dt, states=traj.states + sigma * noise)


def save_trajectory_csv(traj: Trajectory, path) -> Path:
    """Write a trajectory as CSV with header t,x1,...,xn at full precision."""
    path = Path(path)
    columns = ["t"] + [f"x{i + 1}" for i in range(traj.n)]
    frame = pd.DataFrame(np.column_stack([traj.times, traj.states]), columns=columns)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def load_trajectory_csv(path) -> Trajectory:
    frame = pd.read_csv(path, float_precision="round_trip")
    if frame.columns[0] != "t" or frame.shape[0] < 2:
        raise ValueError(f"{path} is not a trajectory CSV (expected header t,x1,...)")
    t = frame["t"].to_numpy()
    dt = float(np.mean(np.diff(t)))
    if not np.allclose(np.diff(t), dt, rtol=1e-6, atol=0):
        raise ValueError(f"{path} is not uniformly sampled")
    return Trajectory(t0=float(t[0]), dt=dt, states=frame.iloc[:, 1:].to_numpy())
