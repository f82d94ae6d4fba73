"""
Dataset Export

CSV and JSON renderings of experiment tables and reports. Numbers use six
significant digits through %-formatting, which does not depend on the locale.
Files are written to a temporary sibling first and renamed into place.
"""

import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Literal

import pandas as pd
from pydantic import BaseModel

from ..db.schemas import TableRow

OutputFormat = Literal["csv", "json"]

FLOAT_FORMAT = "%.6g"
COLUMNS = list(TableRow.model_fields)


def _round(value: Any, float_format: str = FLOAT_FORMAT) -> Any:
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return float(float_format % value)
    if isinstance(value, dict):
        return {k: _round(v, float_format) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, float_format) for v in value]
    return value


def rows_to_frame(rows: Iterable[TableRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)


def render_table(rows: List[TableRow], fmt: OutputFormat = "csv") -> str:
    if fmt == "json":
        return json.dumps([_round(row.model_dump()) for row in rows], indent=2) + "\n"
    buffer = io.StringIO()
    rows_to_frame(rows).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def render_model(model: BaseModel, float_format: str = FLOAT_FORMAT) -> str:
    return json.dumps(_round(model.model_dump(mode="json"), float_format), indent=2) + "\n"


def atomic_write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
    return path

