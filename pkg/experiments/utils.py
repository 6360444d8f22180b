from pathlib import Path

import pandas as pd

from .models import CellStatus, Sweep

METRIC_COLUMNS = ["lightness", "sparsity", "max_stretch", "build_ms", "certified", "min_c"]
CSV_COLUMNS = ["generator", "n", "dim", "eps", "seed", *METRIC_COLUMNS, "status"]
SUMMARY_COLUMNS = [
    "generator",
    "dim",
    "eps",
    "n_from",
    "n_to",
    "lightness_from",
    "lightness_to",
    "lightness_ratio",
    "sparsity_ratio",
]


def sweep_frame(sweep: Sweep) -> pd.DataFrame:
    """
    Every cell of a sweep, one row each, in grid order.

    Cells that did not succeed keep their status and leave the metric
    fields empty.
    """
    rows = sweep.cells.order_by("generator", "dim", "eps", "n", "seed").values(*CSV_COLUMNS)
    df = pd.DataFrame.from_records(list(rows), columns=CSV_COLUMNS)
    unfinished = df["status"] != CellStatus.SUCCESS
    if unfinished.any():
        df[METRIC_COLUMNS] = df[METRIC_COLUMNS].astype(object).where(~unfinished, None)
    return df


def successful(df: pd.DataFrame) -> pd.DataFrame:
    """Rows of succeeded cells with numeric metrics."""
    if "status" in df:
        df = df[df["status"] == CellStatus.SUCCESS]
    return df.astype({"lightness": float, "sparsity": float})


def growth_summary(df: pd.DataFrame) -> pd.DataFrame:
    """
    Seed-averaged lightness per (generator, dim, eps, n), and the ratio
    between consecutive n. A flat ratio means lightness independent of n.
    """
    if not df.empty:
        df = successful(df)
    if df.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    means = (
        df.groupby(["generator", "dim", "eps", "n"], as_index=False)[["lightness", "sparsity"]]
        .mean()
        .sort_values(["generator", "dim", "eps", "n"])
    )
    rows = []
    for (generator, dim, eps), group in means.groupby(["generator", "dim", "eps"], sort=True):
        prev = None
        for row in group.itertuples(index=False):
            if prev is not None:
                rows.append(
                    {
                        "generator": generator,
                        "dim": dim,
                        "eps": eps,
                        "n_from": prev.n,
                        "n_to": row.n,
                        "lightness_from": prev.lightness,
                        "lightness_to": row.lightness,
                        "lightness_ratio": row.lightness / prev.lightness,
                        "sparsity_ratio": row.sparsity / prev.sparsity,
                    }
                )
            prev = row
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def summary_path(output_path: str | Path) -> Path:
    path = Path(output_path)
    return path.with_name(f"{path.stem}.summary.csv")


def write_sweep_csv(sweep: Sweep) -> int:
    """
    Rewrite the sweep CSV and its growth summary from the database.

    Returns:
        Number of rows written, one per cell.
    """
    df = sweep_frame(sweep)
    path = Path(sweep.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.12g")
    growth_summary(df).to_csv(summary_path(path), index=False, float_format="%.6g")
    return len(df)
