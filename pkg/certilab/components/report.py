"""CSV, JSON and console renderings of results."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Sequence, Union

import numpy as np
import pandas as pd

from certilab.utils.errors import CertilabError
from certilab.utils.scaling import SweepRecord

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["family", "N", "p", "quantity", "value", "kind"]
SCHEMA_VERSION = "1"


def records_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """One row per record, stably sorted by (N, p)"""
    df = pd.DataFrame([r.to_row() for r in records], columns=CSV_COLUMNS)
    if df.empty:
        return df
    df["N"] = df["N"].astype(int)
    return df.sort_values(["N", "p"], kind="mergesort").reset_index(drop=True)


def emit_csv(records: Sequence[SweepRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        records_frame(records).to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
    except OSError as exc:
        raise CertilabError(f"cannot write {path}: {exc}") from None
    logger.info("wrote %d rows to %s", len(records), path)
    return path


def _plain(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def to_json(payload: Dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_plain) + "\n"


def emit_json(payload: Dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    try:
        path.write_text(to_json(payload))
    except OSError as exc:
        raise CertilabError(f"cannot write {path}: {exc}") from None
    logger.info("wrote %s", path)
    return path


def render_records(records: Sequence[SweepRecord]) -> str:
    """Console table of the records, one line per row"""
    df = records_frame(records)
    if df.empty:
        return "(no records)"
    return df.to_string(index=False, float_format=lambda v: f"{v:.6g}")
