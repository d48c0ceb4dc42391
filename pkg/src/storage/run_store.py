# src/storage/run_store.py
"""
Run directory persistence: result tables, JSON summaries, log-log SVG plots
and the run manifest.

CSV tables are the reproducible artifact: fixed column order, 17 significant
digits, "\\n" line endings. SVG output pins the hash salt and drops the date
so reruns usually match as well, but only the CSVs are compared byte for byte.
"""
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.core.exceptions import UsageException  # noqa: E402

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
SVG_HASH_SALT = "fracbubble"

Series = Dict[str, Tuple[Sequence[float], Sequence[float]]]


def _json_default(value: Any):
    """numpy scalars/arrays, enums and paths for json.dumps"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _clean(value: Any) -> Any:
    """NaN/inf become strings so the JSON stays standard"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(float(value)):
        return str(float(value))
    return value


def to_json(payload: Any) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2, default=_json_default) + "\n"


class RunStore:
    """One output directory per run"""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files: List[str] = []

    def _path(self, name: str, suffix: str) -> Path:
        if not name or "/" in name or "\\" in name:
            raise UsageException(f"invalid artifact name '{name}'", "name")
        path = self.out_dir / f"{name}{suffix}"
        if path.name not in self.files:
            self.files.append(path.name)
        return path

    def write_table(self, name: str, table: pd.DataFrame) -> Path:
        """<name>.csv with a header row and 17 significant digits"""
        path = self._path(name, ".csv")
        table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("wrote %s (%d rows)", path, len(table))
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._path(name, ".json")
        path.write_text(to_json(payload), encoding="utf-8")
        return path

    def write_loglog(self, name: str, series: Series, xlabel: str, ylabel: str,
                     title: Optional[str] = None) -> Optional[Path]:
        """Log-log line/marker plot; series with no positive points are skipped"""
        plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
        fig, ax = plt.subplots(figsize=(6, 4))
        plotted = 0
        for label, (x, y) in series.items():
            x = np.asarray(x, dtype=float)
            y = np.abs(np.asarray(y, dtype=float))
            keep = (x > 0.0) & (y > 0.0) & np.isfinite(y)
            if not np.any(keep):
                continue
            ax.loglog(x[keep], y[keep], "o-", label=label)
            plotted += 1
        if plotted == 0:
            plt.close(fig)
            logger.warning("plot %s skipped: nothing positive to draw", name)
            return None
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = self._path(name, ".svg")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        return path

    def write_manifest(self, manifest: Dict[str, Any]) -> Path:
        path = self._path("manifest", ".json")
        body = dict(manifest)
        body["files"] = sorted(f for f in self.files if f != "manifest.json")
        path.write_text(to_json(body), encoding="utf-8")
        logger.info("wrote manifest %s", path)
        return path
