"""Report envelope and the JSON / CSV writers.

Report files hold no timestamps or worker counts, so identical inputs give
byte-identical files.
"""

import csv
import dataclasses
import json
import math
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from . import __version__
from .geometry.circle import Arc, CirclePoint

SCHEMA_VERSION = "1.0"

OutputFormat = Literal["csv", "json"]


class ReportEnvelope(BaseModel):
    schema_version: str = SCHEMA_VERSION
    tool_version: str = __version__
    subcommand: str
    spec_hash: str
    master_seed: int
    config: dict[str, Any]
    payload: dict[str, Any]


def to_jsonable(obj: Any) -> Any:
    """Plain JSON values for results made of dataclasses, numpy values and geometry types.

    Non-finite floats become None.
    """
    if isinstance(obj, Arc):
        return list(obj.as_tuple())
    if isinstance(obj, CirclePoint):
        return obj.value
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def write_json_report(envelope: ReportEnvelope, out_dir: Path) -> Path:
    path = Path(out_dir) / f"{envelope.subcommand}.json"
    body = json.dumps(envelope.model_dump(mode="json"), sort_keys=True, indent=2)
    path.write_text(body + "\n")
    return path


def _metadata(envelope: ReportEnvelope) -> dict[str, Any]:
    return {
        "schema_version": envelope.schema_version,
        "tool_version": envelope.tool_version,
        "subcommand": envelope.subcommand,
        "spec_hash": envelope.spec_hash,
        "master_seed": envelope.master_seed,
    }


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def write_csv(path: Path, rows: Sequence[Mapping[str, Any]], metadata: Mapping[str, Any],
              columns: Optional[Sequence[str]] = None) -> Path:
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="") as fh:
        for key, value in metadata.items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    return path


def flatten(payload: Mapping[str, Any], prefix: str = "") -> list[tuple[str, Any]]:
    """Scalar leaves of a nested payload as dotted keys; lists of records are skipped."""
    items = []
    for key in sorted(payload):
        value = payload[key]
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            items.extend(flatten(value, name + "."))
        elif isinstance(value, list) and value and isinstance(value[0], Mapping):
            continue
        else:
            items.append((name, value))
    return items


def summary_items(payload: Mapping[str, Any]) -> list[tuple[str, Any]]:
    return flatten({k: v for k, v in payload.items() if k != "tables"})


def write_csv_report(envelope: ReportEnvelope, tables: Mapping[str, Sequence[Mapping[str, Any]]],
                     out_dir: Path) -> list[Path]:
    """One CSV per table plus ``<subcommand>_summary.csv`` of scalar results."""
    out_dir = Path(out_dir)
    meta = _metadata(envelope)
    paths = []
    for name in sorted(tables):
        paths.append(write_csv(out_dir / f"{envelope.subcommand}_{name}.csv", tables[name], meta))
    summary = [{"key": k, "value": v} for k, v in summary_items(envelope.payload)]
    paths.append(write_csv(out_dir / f"{envelope.subcommand}_summary.csv", summary, meta, ["key", "value"]))
    return paths


def write_report(envelope: ReportEnvelope, tables: Mapping[str, Sequence[Mapping[str, Any]]],
                 out_dir: Path, fmt: OutputFormat) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        return [write_json_report(envelope, out_dir)]
    if fmt == "csv":
        return write_csv_report(envelope, tables, out_dir)
    raise ValueError(f"unknown format {fmt!r}")
