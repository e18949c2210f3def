"""
Benchmark sweep: one clean trajectory, seeded noise realizations and every
configured learner on each realization.
"""
import logging
import time
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from evaluation.metrics import score
from model import learn
from training.dataset_generation import generate_clean, generate_instance
from WeakSINDy.dictionary import build_spec
from WeakSINDy.ode_bench import Trajectory, make_system

RESULT_COLUMNS = [
    "system", "method", "noise_ratio", "instance", "e2", "tpr", "traj_err", "stable",
    "wall_time_ms", "selected_frequency_count", "status", "reason",
]


def _failed_row(cfg, label: str, noise_ratio: float, instance: int, reason: str) -> Dict[str, Any]:
    return {
        "system": cfg.system, "method": label, "noise_ratio": noise_ratio, "instance": instance,
        "e2": np.nan, "tpr": np.nan, "traj_err": np.nan, "stable": None,
        "wall_time_ms": np.nan, "selected_frequency_count": 0, "status": "failed", "reason": reason,
    }


def run_cell(cfg, clean: Trajectory, level_index: int, instance: int, method: Dict[str, Any]) -> Dict[str, Any]:
    """Learn and score one (level, instance, method) cell.

    Exceptions are turned into a failed row.
    """
    label = method.get("label", method["name"])
    noise_ratio = float(cfg.noise_levels[level_index])
    try:
        system = make_system(cfg.system, cfg.params)
        spec = build_spec(system.dim, cfg.degree)
        data = generate_instance(clean, noise_ratio, cfg.seed, level_index, instance)
        start = time.perf_counter()
        result = learn(method["name"], data, spec, cfg.solver_config(), method.get("params"), clean=clean)
        wall_time_ms = 1e3 * (time.perf_counter() - start)
        x0 = clean.states[0]
        record = score(result.coeffs, system, x0, cfg.traj_horizon, cfg.fs,
                       traj_error=bool(cfg.traj_error.get("enabled")))
    except Exception as err:
        logging.warning(f"{label} failed at noise {noise_ratio:g}, instance {instance}: {err}")
        return _failed_row(cfg, label, noise_ratio, instance, f"{type(err).__name__}: {err}")
    return {
        "system": cfg.system, "method": label, "noise_ratio": noise_ratio, "instance": instance,
        "e2": record.e2, "tpr": record.tpr, "traj_err": record.traj_err, "stable": record.stable,
        "wall_time_ms": wall_time_ms, "selected_frequency_count": result.selected_frequency_count,
        "status": "ok", "reason": "",
    }


def run_experiment(cfg, jobs: int = 1, progress: bool = True) -> pd.DataFrame:
    """Run a full benchmark sweep.

    Args:
        cfg: ExperimentConfig
        jobs: Worker processes (1 runs in-process)
        progress: Show a progress bar

    Returns:
        pd.DataFrame: one row per (level, instance, method), ordered by level,
        then instance, then method
    """
    tasks = [(level_index, instance, method)
             for level_index in range(len(cfg.noise_levels))
             for instance in range(cfg.instances_per_level)
             for method in cfg.methods]
    logging.info(f"running {len(tasks)} cells for {cfg.system} with {jobs} job(s)")

    try:
        _, clean = generate_clean(cfg)
    except Exception as err:
        logging.warning(f"clean simulation failed: {err}")
        rows = [_failed_row(cfg, m.get("label", m["name"]), float(cfg.noise_levels[li]), inst,
                            f"{type(err).__name__}: {err}") for li, inst, m in tasks]
        return pd.DataFrame(rows, columns=RESULT_COLUMNS)

    parallel = Parallel(n_jobs=jobs, return_as="generator")
    cells = parallel(delayed(run_cell)(cfg, clean, li, inst, m) for li, inst, m in tasks)
    rows: List[Dict[str, Any]] = list(tqdm(cells, total=len(tasks), disable=not progress, desc=cfg.system))

    failed = sum(row["status"] == "failed" for row in rows)
    logging.info(f"finished {len(rows)} cells, {failed} failed")
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def write_results(table: pd.DataFrame, path, timing: bool = True) -> Path:
    """Write a result table as CSV (17 significant digits, '\\n' line endings).

    Without timing the wall_time_ms column is dropped, which makes the file
    byte-identical across runs of the same configuration.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not timing:
        table = table.drop(columns=["wall_time_ms"])
    table.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def read_results(path) -> pd.DataFrame:
    table = pd.read_csv(path, float_precision="round_trip", keep_default_na=True)
    missing = {"method", "noise_ratio", "e2", "tpr"} - set(table.columns)
    if missing:
        raise ValueError(f"{path} is not a result table (missing columns {sorted(missing)})")
    return table
