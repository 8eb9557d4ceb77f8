"""
results_archive.py
------------------
Writes result tables and the bookkeeping around a run.

  - CSV tables: `# key: value` metadata lines, then a header row and the
    data (comma separated, `.` decimals, "\n" line ends, UTF-8 without BOM)
  - run manifest JSON in reports/: every table written with its row count
  - `<run_id>_success.log` / `<run_id>_error.log` in logs/

`run_and_archive` is the flow-side entry point: it builds every table,
archives it, and on any failure writes the error log and re-raises so the
orchestrator marks the run failed.
"""

import io
import json
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, NamedTuple

import pandas as pd

from utils.config import CSV_DIR, LOG_DIR, REPORT_DIR, ensure_dirs

TableBuilder = Callable[[], tuple[pd.DataFrame, dict]]


class ArchivedTable(NamedTuple):
    path: str
    rows: int
    metadata: dict
    frame: pd.DataFrame

    def summary(self) -> dict:
        return {"path": self.path, "rows": self.rows, "metadata": self.metadata}


# ---------------------------------------------------------------------------
# CSV with metadata header
# ---------------------------------------------------------------------------

def _format_meta(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    return str(value).replace("\n", " ")


def render_csv(df: pd.DataFrame, metadata: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {_format_meta(value)}\n")
    df.to_csv(buf, index=False, lineterminator="\n")
    return buf.getvalue()


def write_csv(df: pd.DataFrame, path: str | Path | None, metadata: dict | None = None) -> str:
    """
    Writes the table to path, or to standard output when path is None or "-".

    Returns:
        The destination ("<stdout>" or the path).
    """
    text = render_csv(df, metadata)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return "<stdout>"

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return str(path)


def read_csv(path: str | Path) -> tuple[pd.DataFrame, dict]:
    """Reads a table written by write_csv back into (DataFrame, metadata)."""
    metadata = {}
    skip = 0
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(":")
            metadata[key.strip()] = value.strip()
            skip += 1
    df = pd.read_csv(path, skiprows=skip, encoding="utf-8")
    return df, metadata


# ---------------------------------------------------------------------------
# Run bookkeeping
# ---------------------------------------------------------------------------

def new_run_id(prefix: str) -> str:
    return f"{prefix}_{datetime.now().strftime('%Y%m%d%H%M%S')}"


def write_error_log(run_id: str, error: Exception) -> Path:
    ensure_dirs()
    log_path = LOG_DIR / f"{run_id}_error.log"
    with open(log_path, "w", encoding="utf-8") as f:
        f.write(f"Run: {run_id}\n")
        f.write(f"Timestamp: {datetime.now(timezone.utc).isoformat()}\n")
        f.write(f"Error: {error}\n\n")
        f.write("".join(traceback.format_exception(error)))
    return log_path


def write_success_log(run_id: str, outputs: dict[str, ArchivedTable]) -> Path:
    ensure_dirs()
    log_path = LOG_DIR / f"{run_id}_success.log"
    with open(log_path, "w", encoding="utf-8") as f:
        f.write(f"Run {run_id} completed successfully at "
                f"{datetime.now(timezone.utc).isoformat()}\n")
        for name, info in outputs.items():
            f.write(f"{name}: {info.rows} rows -> {info.path}\n")
    return log_path


def write_run_manifest(run_id: str, outputs: dict[str, ArchivedTable], parameters: dict) -> Path:
    ensure_dirs()
    manifest = {
        "run_id":     run_id,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "parameters": parameters,
        "outputs":    {name: t.summary() for name, t in outputs.items()},
    }
    path = REPORT_DIR / f"{run_id}_MANIFEST.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, default=str)
    return path


def run_and_archive(run_id: str, builders: dict[str, TableBuilder],
                    parameters: dict | None = None, logger=None) -> dict[str, ArchivedTable]:
    """
    Builds each table in order and writes it to csv/<run_id>/<name>.csv.

    Returns:
        {name: ArchivedTable} for every table, in build order.
    """
    ensure_dirs()
    outputs: dict[str, ArchivedTable] = {}
    run_dir = CSV_DIR / run_id

    try:
        for name, build in builders.items():
            df, meta = build()
            path = write_csv(df, run_dir / f"{name}.csv", meta)
            outputs[name] = ArchivedTable(path, len(df), meta, df)
            if logger:
                logger.info(f"Table {name}: {len(df)} rows -> {path}")

        manifest = write_run_manifest(run_id, outputs, parameters or {})
        write_success_log(run_id, outputs)
        if logger:
            logger.info(f"Run {run_id} archived, manifest {manifest.name}")
        return outputs

    except Exception as exc:
        log_path = write_error_log(run_id, exc)
        if logger:
            logger.error(f"Run {run_id} failed after {len(outputs)} table(s); see {log_path}")
        raise
