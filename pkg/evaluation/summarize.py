import logging

import numpy as np
import pandas as pd

GROUP_KEYS = ["system", "method", "noise_ratio"]


def summarize(table: pd.DataFrame) -> pd.DataFrame:
    """Median and quartiles of e2 and tpr per (system, method, noise level).

    Quartiles interpolate linearly between order statistics. Failed rows are
    counted but not scored; the trajectory-error median only uses stable
    models and unstable models are counted separately.

    Args:
        table: Result table from run_experiment or read_results

    Returns:
        pd.DataFrame: one row per group, methods in order of first appearance,
        noise levels ascending
    """
    if table.empty:
        raise ValueError("Result table is empty")
    table = table.copy()
    if "status" not in table.columns:
        table["status"] = "ok"
    if "system" not in table.columns:
        table["system"] = ""
    method_order = list(dict.fromkeys(table["method"]))
    table["method"] = pd.Categorical(table["method"], categories=method_order, ordered=True)

    rows = []
    for (system, method, noise_ratio), group in table.groupby(GROUP_KEYS, sort=True, observed=True):
        ok = group[group["status"] == "ok"]
        row = {"system": system, "method": method, "noise_ratio": noise_ratio,
               "count": len(ok), "failed": len(group) - len(ok)}
        for metric in ("e2", "tpr"):
            values = ok[metric].to_numpy(dtype=float)
            if len(values):
                q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75])
            else:
                q25 = median = q75 = np.nan
            row.update({f"{metric}_median": median, f"{metric}_q25": q25, f"{metric}_q75": q75})
        if "traj_err" in ok.columns:
            stable = ok["stable"].astype(str).str.lower().isin(["true", "1", "1.0"])
            traj = ok.loc[stable, "traj_err"].to_numpy(dtype=float)
            traj = traj[np.isfinite(traj)]
            row["traj_err_median"] = float(np.median(traj)) if len(traj) else np.nan
            row["unstable"] = int(ok["stable"].astype(str).str.lower().isin(["false", "0", "0.0"]).sum())
        rows.append(row)

    summary = pd.DataFrame(rows)
    summary["method"] = summary["method"].astype(str)
    logging.info(f"summarized {len(table)} rows into {len(summary)} groups")
    return summary


def write_summary(summary: pd.DataFrame, path):
    summary.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path
