import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import optimize, sparse

from WeakSINDy.dictionary import CoefficientMatrix, DictionarySpec, evaluate, term_names
from WeakSINDy.ode_bench import Trajectory
from WeakSINDy.sparse_regression import SolverConfig, ridge_solve, st_ridge_info, st_ridge_multi
from WeakSINDy.spectral import (FourierCoeffs, FrequencySelection, fourier_coeffs, multitaper_psd, periodogram,
                                select_frequencies, sweep_selection)

BUMP_DEFAULTS = {
    'SUBDOMAINS': 1000,
    'Q': 4,
}

SPECTRAL_DEFAULTS = {
    'K': 100,
    'NW': 4.0,
    'L_MAX': 500,
    # family-wise false-alarm rate of the noise-floor test
    'ALPHA': 1e-3,
}

FOURIER_DEFAULTS = {
    'WEIGHTING': 'noise',
}

METHODS = ["sindy", "wsindy_bump", "wsindy_fourier_sweep", "wsindy_fourier_sde", "wsindy_fourier_oracle"]
WEIGHTINGS = ("noise", "none")


@dataclass(frozen=True)
class BumpTestFunctionSpec:
    """Bump test functions (1 - s^2)^q on p equal non-overlapping subdomains.

    Attributes:
        p: Number of subdomains (one test function each)
        q: Bump exponent; larger q gives narrower bumps
    """
    p: int = BUMP_DEFAULTS['SUBDOMAINS']
    q: int = BUMP_DEFAULTS['Q']

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"Number of subdomains must be >= 1, got {self.p}")
        if self.q < 1:
            raise ValueError(f"Bump exponent q must be a positive integer, got {self.q}")


@dataclass(frozen=True)
class SelectionStrategy:
    """How wsindy_fourier picks test-function frequencies per state component.

    method is one of 'sweep' (indices 1..L_max), 'sde' (top-K bins of the
    multitaper PSD of the noisy component) or 'oracle' (top-K bins of the
    periodogram of a clean reference trajectory).

    For 'sde', alpha restricts the candidates to bins above the estimated
    white-noise floor (see spectral.significant_bins); None ranks every bin.
    """
    method: str
    K: int = SPECTRAL_DEFAULTS['K']
    nw: float = SPECTRAL_DEFAULTS['NW']
    L_max: int = SPECTRAL_DEFAULTS['L_MAX']
    alpha: Optional[float] = SPECTRAL_DEFAULTS['ALPHA']
    reference: Optional[Trajectory] = field(default=None, repr=False)

    def __post_init__(self):
        if self.method not in ("sweep", "sde", "oracle"):
            raise ValueError(f"Unsupported frequency selection method: {self.method}")
        if self.method == "oracle" and self.reference is None:
            raise ValueError("Oracle selection needs a clean reference trajectory")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise ValueError(f"Significance level must be in (0, 1), got {self.alpha}")

    def resolve(self, data: Trajectory, component: int) -> FrequencySelection:
        if self.method == "sweep":
            return sweep_selection(self.L_max)
        if self.method == "sde":
            psd = multitaper_psd(data.states[:, component], data.dt, self.nw)
            return select_frequencies(psd, self.K, method=f"sde(K={self.K},nw={self.nw:g})", alpha=self.alpha)
        if self.reference.states.shape != data.states.shape:
            raise ValueError("Oracle reference trajectory must match the data shape")
        psd = periodogram(self.reference.states[:, component], self.reference.dt)
        return select_frequencies(psd, self.K, method=f"oracle(K={self.K})")


@dataclass(frozen=True)
class LearnerResult:
    coeffs: CoefficientMatrix
    method: str
    selected: Optional[Tuple[Tuple[int, ...], ...]] = None
    residual_norm: float = 0.0
    iterations: Tuple[int, ...] = ()

    @property
    def selected_frequency_count(self) -> int:
        if self.selected is None:
            return 0
        return int(sum(len(s) for s in self.selected))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "terms": term_names(self.coeffs.spec),
            "coefficients": self.coeffs.values.tolist(),
            "selected_frequencies": None if self.selected is None else [list(s) for s in self.selected],
            "iterations": list(self.iterations),
            "residual_norm": self.residual_norm,
        }


def learner_result_to_json(result: LearnerResult) -> str:
    return json.dumps(result.to_dict(), indent=2)


def _check_data(data: Trajectory, spec: DictionarySpec):
    if data.n != spec.dim:
        raise ValueError(f"Data has {data.n} components, dictionary expects {spec.dim}")


def sindy_classic(data: Trajectory, spec: DictionarySpec, cfg: SolverConfig) -> LearnerResult:
    """Classic SINDy on finite-difference derivatives.

    Derivatives use second-order centered differences with second-order
    one-sided stencils at the boundaries.

    Args:
        data: Measured trajectory
        spec: Polynomial dictionary
        cfg: Solver configuration

    Returns:
        LearnerResult: Learned coefficients
    """
    _check_data(data, spec)
    if data.k < 5:
        raise ValueError(f"Classic SINDy needs at least 5 samples, got {data.k}")
    x_dot = np.gradient(data.states, data.dt, axis=0, edge_order=2)
    theta = evaluate(spec, data).values
    W, iterations = st_ridge_multi(theta, x_dot, cfg, spec=spec, return_iterations=True)
    residual = np.linalg.norm(theta @ W.values - x_dot)
    logging.info(f"sindy: {np.count_nonzero(W.values)} active terms, residual {residual:.4g}")
    return LearnerResult(coeffs=W, method="sindy", residual_norm=float(residual),
                         iterations=tuple(iterations))


def bump_test_functions(k: int, dt: float, tf: BumpTestFunctionSpec) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Sample bump test functions and their derivatives on the time grid.

    The interval [0, (k-1) dt] is tiled by tf.p equal subdomains; on each one
    phi(t) = (1 - s^2)^q with s = (t - center) / half_width, zero elsewhere.

    Returns:
        Tuple of sparse p x k matrices (Phi, dPhi)
    """
    T = (k - 1) * dt
    width = T / tf.p
    half_width = width / 2.0
    t = dt * np.arange(k)
    owner = np.minimum((t / width).astype(int), tf.p - 1)
    counts = np.bincount(owner, minlength=tf.p)
    if counts.min() < tf.q + 3:
        raise ValueError(
            f"Subdomain too narrow: {counts.min()} samples per subdomain with q={tf.q} "
            f"(need >= {tf.q + 3}); use fewer subdomains"
        )
    s = (t - (owner + 0.5) * width) / half_width
    inside = np.abs(s) < 1
    s = np.where(inside, s, 0.0)
    base = np.where(inside, 1.0 - s ** 2, 0.0)
    phi = base ** tf.q
    dphi = np.where(inside, -2.0 * tf.q * s * base ** (tf.q - 1) / half_width, 0.0)
    columns = np.arange(k)
    Phi = sparse.csr_matrix((phi, (owner, columns)), shape=(tf.p, k))
    dPhi = sparse.csr_matrix((dphi, (owner, columns)), shape=(tf.p, k))
    return Phi, dPhi


def wsindy_bump(data: Trajectory, spec: DictionarySpec, tf: BumpTestFunctionSpec,
                cfg: SolverConfig) -> LearnerResult:
    """Weak SINDy with bump test functions.

    Solves dt Phi Theta(Y) W = -dt Phi' Y; test functions vanish at subdomain
    endpoints so the sampled sums are trapezoid quadrature.
    """
    _check_data(data, spec)
    Phi, dPhi = bump_test_functions(data.k, data.dt, tf)
    theta = evaluate(spec, data).values
    G = data.dt * (Phi @ theta)
    rhs = -data.dt * (dPhi @ data.states)
    W, iterations = st_ridge_multi(G, rhs, cfg, spec=spec, return_iterations=True)
    residual = np.linalg.norm(G @ W.values - rhs)
    logging.info(f"wsindy_bump(p={tf.p},q={tf.q}): {np.count_nonzero(W.values)} active terms")
    return LearnerResult(coeffs=W, method=f"wsindy_bump(p={tf.p},q={tf.q})",
                         residual_norm=float(residual), iterations=tuple(iterations))


def weak_form_coeffs(data: Trajectory, spec: DictionarySpec) -> Tuple[FourierCoeffs, FourierCoeffs]:
    """Closed-interval Fourier coefficients of the states and of Theta(Y)."""
    state_coeffs = fourier_coeffs(data.states, data.dt, periodic=False)
    theta_coeffs = fourier_coeffs(evaluate(spec, data).values, data.dt, periodic=False)
    return state_coeffs, theta_coeffs


def fourier_weak_system(data: Trajectory, spec: DictionarySpec, selection: FrequencySelection, component: int,
                        coeffs: Optional[Tuple[FourierCoeffs, FourierCoeffs]] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Assemble (B_dom, a_dom) for one state component.

    Rows are B_l = [b_l(theta_1) ... b_l(theta_m)] and targets are
    -(2 pi l / T) a_l(y_i) for the selected indices l. coeffs, when given,
    is the output of weak_form_coeffs for the same data and dictionary.
    """
    state_coeffs, theta_coeffs = coeffs if coeffs is not None else weak_form_coeffs(data, spec)
    selection.check_bound(state_coeffs.L)
    ell = np.asarray(selection.indices)
    a_dom = -(2.0 * np.pi * ell / state_coeffs.T) * state_coeffs.a[ell, component]
    return theta_coeffs.b[ell], a_dom


def frequency_weights(B_dom: np.ndarray, a_dom: np.ndarray, omega: np.ndarray, ridge: float) -> np.ndarray:
    """Row weights 1 / sd for one Fourier weak system.

    The residual variance of row l is modeled as alpha omega_l^2 + beta, where
    omega_l = 2 pi l / T: measurement noise in a_l(y_i) is scaled by omega_l,
    noise carried through b_l(theta) is not. alpha and beta are fitted by
    nonnegative least squares to the squared residuals of an unthresholded
    ridge fit. Weights have unit root mean square; they are uniform when the
    system has too few rows or no measurable residual.
    """
    p, m = B_dom.shape
    uniform = np.ones(p)
    if p < 2 * m + 2:
        return uniform
    residual = B_dom @ ridge_solve(B_dom, a_dom, ridge) - a_dom
    design = np.column_stack([omega ** 2, np.ones(p)])
    scale = np.max(design, axis=0)
    (alpha, beta), _ = optimize.nnls(design / scale, residual ** 2)
    variance = (design / scale) @ np.array([alpha, beta])
    # residuals at round-off level carry no noise information
    resolution = (1e-10 * np.sqrt(np.mean(a_dom ** 2))) ** 2
    if not (np.all(np.isfinite(variance)) and np.max(variance) > resolution):
        return uniform
    variance = np.maximum(variance, 1e-12 * np.max(variance))
    weights = 1.0 / np.sqrt(variance)
    return weights / np.sqrt(np.mean(weights ** 2))


def wsindy_fourier(data: Trajectory, spec: DictionarySpec, sel, cfg: SolverConfig,
                   weighting: str = FOURIER_DEFAULTS['WEIGHTING']) -> LearnerResult:
    """Fourier weak SINDy.

    Sinusoidal test functions turn the weak form into the coefficient relation
    -(2 pi l / T) a_l(x_i) = sum_j w_ij b_l(theta_j), solved with STRidge over
    the selected frequencies of each component.

    Args:
        data: Measured trajectory
        spec: Polynomial dictionary
        sel: A FrequencySelection shared by all components, or a
            SelectionStrategy resolved per component
        cfg: Solver configuration
        weighting: 'noise' scales each row by frequency_weights before the
            solve; 'none' solves the unweighted system

    Returns:
        LearnerResult: Learned coefficients with the selected indices per component
    """
    _check_data(data, spec)
    if weighting not in WEIGHTINGS:
        raise ValueError(f"Unsupported weighting '{weighting}', expected one of {WEIGHTINGS}")
    coeffs = weak_form_coeffs(data, spec)
    T = coeffs[0].T

    W = np.zeros((spec.m, spec.dim))
    selected = []
    iterations = []
    residual_sq = 0.0
    for i in range(spec.dim):
        selection = sel.resolve(data, i) if isinstance(sel, SelectionStrategy) else sel
        B_dom, a_dom = fourier_weak_system(data, spec, selection, i, coeffs=coeffs)
        if weighting == "noise":
            omega = 2.0 * np.pi * np.asarray(selection.indices) / T
            rows = frequency_weights(B_dom, a_dom, omega, cfg.ridge)
        else:
            rows = np.ones(len(a_dom))
        W[:, i], its = st_ridge_info(rows[:, None] * B_dom, rows * a_dom, cfg)
        residual_sq += float(np.sum((B_dom @ W[:, i] - a_dom) ** 2))
        selected.append(tuple(selection.indices))
        iterations.append(its)
        logging.debug(f"component {i}: {len(a_dom)} frequencies, {np.count_nonzero(W[:, i])} active terms")

    method = selection.method if not isinstance(sel, SelectionStrategy) else f"wsindy_fourier_{sel.method}"
    logging.info(f"{method}: {np.count_nonzero(W)} active terms")
    return LearnerResult(coeffs=CoefficientMatrix(W, spec), method=method, selected=tuple(selected),
                         residual_norm=float(np.sqrt(residual_sq)), iterations=tuple(iterations))


def learn(method: str, data: Trajectory, spec: DictionarySpec, cfg: SolverConfig,
          params: Optional[Dict[str, Any]] = None, clean: Optional[Trajectory] = None) -> LearnerResult:
    """Run a learner by method tag.

    Args:
        method: One of METHODS
        data: Measured trajectory
        spec: Polynomial dictionary
        cfg: Solver configuration
        params: Method parameters (p, q, L_max, K, nw or bandwidth_hz, alpha, weighting)
        clean: Clean trajectory, required by wsindy_fourier_oracle

    Returns:
        LearnerResult: Learned coefficients
    """
    params = dict(params or {})
    if method == "sindy":
        return sindy_classic(data, spec, cfg)
    if method == "wsindy_bump":
        tf = BumpTestFunctionSpec(p=int(params.get("p", BUMP_DEFAULTS['SUBDOMAINS'])),
                                  q=int(params.get("q", BUMP_DEFAULTS['Q'])))
        return wsindy_bump(data, spec, tf, cfg)
    if method == "wsindy_fourier_sweep":
        strategy = SelectionStrategy("sweep", L_max=int(params.get("L_max", SPECTRAL_DEFAULTS['L_MAX'])))
    elif method == "wsindy_fourier_sde":
        nw = float(params.get("nw", SPECTRAL_DEFAULTS['NW']))
        if "bandwidth_hz" in params:
            # half-bandwidth in Hz times the record length
            nw = float(params["bandwidth_hz"]) * (data.k * data.dt)
        alpha = params.get("alpha", SPECTRAL_DEFAULTS['ALPHA'])
        strategy = SelectionStrategy("sde", K=int(params.get("K", SPECTRAL_DEFAULTS['K'])), nw=nw,
                                     alpha=None if alpha is None else float(alpha))
    elif method == "wsindy_fourier_oracle":
        strategy = SelectionStrategy("oracle", K=int(params.get("K", SPECTRAL_DEFAULTS['K'])),
                                     reference=clean)
    else:
        raise ValueError(f"Unsupported method: {method}")
    return wsindy_fourier(data, spec, strategy, cfg,
                          weighting=str(params.get("weighting", FOURIER_DEFAULTS['WEIGHTING'])))
