"""
Sequentially thresholded ridge regression (STRidge / STLSQ for ridge = 0).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as linalg

from .dictionary import CoefficientMatrix, DictionarySpec

logger = logging.getLogger(__name__)

SOLVER_DEFAULTS = {
    'THRESHOLD': 0.5,
    'RIDGE': 1e-3,
    'MAX_ITERS': 20,
}


@dataclass(frozen=True)
class SolverConfig:
    """Sequential thresholding settings.

    Attributes:
        threshold: Coefficient magnitude cutoff eta > 0
        ridge: Ridge penalty lambda >= 0
        max_iters: Maximum number of solve/threshold rounds
        normalize_columns: Threshold coefficients of unit-norm columns
        debias: Refit the final active set without the ridge penalty
    """
    threshold: float = SOLVER_DEFAULTS['THRESHOLD']
    ridge: float = SOLVER_DEFAULTS['RIDGE']
    max_iters: int = SOLVER_DEFAULTS['MAX_ITERS']
    normalize_columns: bool = False
    debias: bool = False

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"Threshold must be > 0, got {self.threshold}")
        if not self.ridge >= 0:
            raise ValueError(f"Ridge penalty must be >= 0, got {self.ridge}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


def ridge_solve(A: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    # orthogonal factorization of the augmented system [A; sqrt(ridge) I]
    if ridge > 0:
        A = np.vstack([A, np.sqrt(ridge) * np.eye(A.shape[1])])
        y = np.concatenate([y, np.zeros(A.shape[1])])
    coef, _, _, _ = linalg.lstsq(A, y, lapack_driver="gelsd", check_finite=False)
    return coef


def st_ridge_info(A, y, cfg: SolverConfig) -> Tuple[np.ndarray, int]:
    """Sequentially thresholded ridge regression with iteration count.

    Args:
        A: p x m design matrix
        y: length-p target
        cfg: Solver configuration

    Returns:
        Tuple[np.ndarray, int]: coefficient vector and number of ridge solves
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"Design matrix must be p x m with p, m >= 1, got shape {A.shape}")
    if A.shape[0] != y.shape[0]:
        raise ValueError(f"Design has {A.shape[0]} rows but target has {y.shape[0]}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise ValueError("Regression inputs contain non-finite values")

    norms = np.linalg.norm(A, axis=0)
    active = norms > 0
    if cfg.normalize_columns:
        scale = np.where(active, norms, 1.0)
        A = A / scale
    else:
        scale = np.ones(A.shape[1])

    w = np.zeros(A.shape[1])
    iterations = 0
    for iterations in range(1, int(cfg.max_iters) + 1):
        w = np.zeros(A.shape[1])
        if active.any():
            w[active] = ridge_solve(A[:, active], y, cfg.ridge)
        keep = active & (np.abs(w) >= cfg.threshold)
        if np.array_equal(keep, active):
            break
        active = keep
    w[~active] = 0.0

    if cfg.debias and active.any():
        w[active] = ridge_solve(A[:, active], y, 0.0)
        w[np.abs(w) < cfg.threshold] = 0.0

    logger.debug("STRidge finished after %d iterations with %d active terms",
                 iterations, int(np.count_nonzero(w)))
    return w / scale, iterations


def st_ridge(A, y, cfg: SolverConfig) -> np.ndarray:
    """Solve min ||A w - y||^2 + ridge ||w||^2 with sequential hard thresholding."""
    return st_ridge_info(A, y, cfg)[0]


def st_ridge_multi(A, Y, cfg: SolverConfig, spec: Optional[DictionarySpec] = None,
                   return_iterations: bool = False):
    """Column-wise st_ridge; column i of the result depends only on Y[:, i].

    Args:
        A: p x m design matrix
        Y: p x n targets
        cfg: Solver configuration
        spec: Dictionary attached to the result
        return_iterations: Also return the per-column iteration counts

    Returns:
        CoefficientMatrix, or (CoefficientMatrix, List[int]) if return_iterations
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != Y.shape[0]:
        raise ValueError(f"Inconsistent shapes: design {A.shape}, targets {Y.shape}")
    columns = [st_ridge_info(A, Y[:, i], cfg) for i in range(Y.shape[1])]
    W = CoefficientMatrix(np.column_stack([w for w, _ in columns]), spec)
    if return_iterations:
        return W, [its for _, its in columns]
    return W
