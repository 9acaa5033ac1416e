"""
CSV output and the metadata sidecar that makes it reproducible.
"""

from __future__ import annotations

import csv
import math
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any

import orjson
from pydantic import BaseModel, Field

from .. import __version__
from ..pipeline.models import SweepRow


class RowFailure(BaseModel):
    index: int
    value: float
    r0: float
    cn2: float
    error: str


class RunMetadata(BaseModel):
    """Everything needed to regenerate a CSV: the resolved config and the seeds."""

    code_version: str = __version__
    config_text: str
    preset: str | None = None
    seed: int
    row_seeds: list[int] = Field(default_factory=list)
    tol: float
    mc_samples: int
    threads: int
    output: str
    started_at: datetime
    wall_time_s: float
    rows: int
    failures: list[RowFailure] = Field(default_factory=list)


def sidecar_path(output: Path) -> Path:
    return output.with_name(output.name + ".meta.json")


def format_cell(value: Any) -> str:
    """Text of one CSV cell; floats keep 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def write_csv(rows: list[SweepRow], path: Path) -> None:
    """Header plus one line per row, comma separated with LF line endings."""
    columns = SweepRow.columns()
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(getattr(row, column)) for column in columns])


def write_metadata(metadata: RunMetadata, path: Path) -> None:
    path.write_bytes(orjson.dumps(metadata.model_dump(mode="json"), option=orjson.OPT_INDENT_2))


def read_metadata(path: Path) -> RunMetadata:
    return RunMetadata.model_validate(orjson.loads(path.read_bytes()))
