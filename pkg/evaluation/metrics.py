import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from WeakSINDy.dictionary import CoefficientMatrix
from WeakSINDy.ode_bench import DivergenceError, OdeSystem, simulate, system_from_coefficients


@dataclass(frozen=True)
class MetricsRecord:
    """Scores of one learned model.

    traj_err is NaN when the trajectory error was not requested and +inf when
    the learned model diverged.
    """
    e2: float
    tpr: float
    traj_err: float = float("nan")
    stable: bool = True

    def to_dict(self):
        return asdict(self)


def _check_pair(What: CoefficientMatrix, W: CoefficientMatrix):
    if What.values.shape != W.values.shape:
        raise ValueError(f"Coefficient shapes differ: {What.values.shape} vs {W.values.shape}")
    if What.spec is not None and W.spec is not None and What.spec.terms != W.spec.terms:
        raise ValueError("Coefficient matrices use different dictionaries")


def coeff_error(What: CoefficientMatrix, W: CoefficientMatrix) -> float:
    """Relative Frobenius error ||What - W|| / ||W||."""
    _check_pair(What, W)
    scale = np.linalg.norm(W.values)
    if scale == 0:
        raise ValueError("True coefficient matrix is identically zero")
    return float(np.linalg.norm(What.values - W.values) / scale)


def tpr(What: CoefficientMatrix, W: CoefficientMatrix) -> float:
    """True positive ratio TP / (TP + FP + FN) over exact-nonzero supports.

    Two all-zero matrices score 1.
    """
    _check_pair(What, W)
    learned = What.support
    true = W.support
    tp = np.count_nonzero(learned & true)
    fp = np.count_nonzero(learned & ~true)
    fn = np.count_nonzero(~learned & true)
    total = tp + fp + fn
    if total == 0:
        return 1.0
    return float(tp / total)


def trajectory_error(What: CoefficientMatrix, sys: OdeSystem, x0: Optional[Sequence[float]],
                     T: float, fs: float) -> Tuple[float, bool]:
    """Relative trajectory error of a learned model against the true system.

    Both models are integrated from x0 on the same grid with the same
    integrator. A diverging learned model is reported as (inf, False).

    Args:
        What: Learned coefficients (with dictionary attached)
        sys: True system
        x0: Initial state (None uses the system default)
        T: Horizon in seconds
        fs: Sampling rate in Hz

    Returns:
        Tuple[float, bool]: error and stability flag
    """
    reference = simulate(sys, x0, T, fs)
    learned = system_from_coefficients(What, name=f"learned_{sys.name}")
    try:
        estimate = simulate(learned, reference.states[0], T, fs)
    except DivergenceError as err:
        logging.info(f"learned {sys.name} model diverged at t={err.t:.3f} s")
        return float("inf"), False
    error = np.linalg.norm(estimate.states - reference.states) / np.linalg.norm(reference.states)
    return float(error), True


def score(What: CoefficientMatrix, sys: OdeSystem, x0: Optional[Sequence[float]] = None,
          T: float = 10.0, fs: float = 1000.0, traj_error: bool = False) -> MetricsRecord:
    """Compute e2 and tpr against sys, optionally with the trajectory error."""
    W = sys.true_coeffs(What.spec)
    record = MetricsRecord(e2=coeff_error(What, W), tpr=tpr(What, W))
    if traj_error:
        err, stable = trajectory_error(What, sys, x0, T, fs)
        record = MetricsRecord(e2=record.e2, tpr=record.tpr, traj_err=err, stable=stable)
    return record
