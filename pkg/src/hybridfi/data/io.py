import logging
import os

import numpy as np
import pandas as pd

from hybridfi.data.dataset import Dataset, FeatureDescriptor
from hybridfi.errors import DatasetError

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every float64 exactly
FLOAT_FORMAT = "%.17g"


def _parse_column(cells: pd.Series, column: str) -> np.ndarray:
    """
    Parse one text column into float64, reporting the first offending cell by its
    1-based file line (the header is line 1) and column name.
    """
    try:
        parsed = cells.astype(np.float64).to_numpy()
    except (TypeError, ValueError):
        parsed = None
    if parsed is not None and np.all(np.isfinite(parsed)):
        return parsed

    for row, cell in enumerate(cells.tolist()):
        try:
            value = float(cell)
        except (TypeError, ValueError):
            raise DatasetError(f"non-numeric cell {cell!r} at line {row + 2}, column {column!r}") from None
        if not np.isfinite(value):
            raise DatasetError(f"non-finite cell {cell!r} at line {row + 2}, column {column!r}")
    raise DatasetError(f"could not parse column {column!r}")


def load_csv(path: str | os.PathLike, target_name: str) -> Dataset:
    """
    Load a comma-separated, header-first, UTF-8 numeric table.

    Every column except `target_name` becomes a raw feature, in file order.
    """
    if not os.path.isfile(path):
        raise DatasetError(f"data file not found: {path}")
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path} is empty") from None
    except pd.errors.ParserError as e:
        raise DatasetError(f"malformed CSV {path}: {e}") from None

    header = [h.strip() for h in raw.iloc[0].tolist()]
    duplicates = sorted({h for h in header if header.count(h) > 1})
    if duplicates:
        raise DatasetError(f"duplicate header names in {path}: {duplicates}")
    if target_name not in header:
        raise DatasetError(f"target column {target_name!r} not found in {path} (columns: {header})")
    body = raw.iloc[1:].reset_index(drop=True)
    if body.empty:
        raise DatasetError(f"{path} has a header but no data rows")

    columns = {name: _parse_column(body.iloc[:, j], name) for j, name in enumerate(header)}
    feature_names = [h for h in header if h != target_name]
    if not feature_names:
        raise DatasetError(f"{path} has no feature columns besides the target {target_name!r}")

    values = np.column_stack([columns[n] for n in feature_names])
    features = tuple(FeatureDescriptor(name=n) for n in feature_names)
    d = Dataset(features=features, values=values, target_name=target_name, target=columns[target_name])
    logger.info(f"Loaded {path}: {d.n_rows} rows, {d.n_features} features, target {target_name!r}")
    return d


def dataset_frame(d: Dataset) -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(d.values), columns=d.feature_names)
    frame[d.target_name] = np.asarray(d.target)
    return frame


def write_csv(d: Dataset, path: str | os.PathLike) -> None:
    """Write features then target, 17 significant digits, so `load_csv` reproduces values bit-for-bit."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    dataset_frame(d).to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")
