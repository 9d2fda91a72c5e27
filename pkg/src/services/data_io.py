"""File formats: price CSV, spin CSV, model JSON and series CSV.

Every writer produces deterministic bytes for identical inputs, and every
reader accepts what the matching writer produced.
"""

from __future__ import annotations

import io
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.lib.errors import RejectedInputError
from src.models.coupling_model import CouplingModel
from src.models.price_series import PriceSeries
from src.models.series_report import TimeSeriesReport
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_OPEN_SUFFIX = "_open"
_CLOSE_SUFFIX = "_close"


class DataIOError(Exception):
    """Raised when a file cannot be read or parsed.

    `line` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class IngestReport:
    rows_read: int
    rows_kept: int
    dropped_dates: Tuple[str, ...]
    first_date: Optional[str]
    last_date: Optional[str]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": len(self.dropped_dates),
            "dropped_dates": list(self.dropped_dates),
            "first_date": self.first_date,
            "last_date": self.last_date,
        }


def _read_frame(path: PathLike) -> pd.DataFrame:
    p = Path(path)
    if not p.is_file():
        raise DataIOError(f"file not found: {p}")
    text = p.read_text(encoding="utf-8")
    if not text.strip():
        raise DataIOError(f"{p} is empty", line=1)
    try:
        return pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as exc:
        # pandas reports "Expected 5 fields in line 7, saw 6"
        m = re.search(r"line (\d+)", str(exc))
        raise DataIOError(f"malformed CSV {p}: {exc}", line=int(m.group(1)) if m else None) from exc


def _price_labels(columns: List[str]) -> Tuple[str, ...]:
    if not columns or columns[0] != "date":
        raise DataIOError("price CSV header must start with 'date'", line=1)
    rest = columns[1:]
    if not rest or len(rest) % 2:
        raise DataIOError("price CSV needs <label>_open,<label>_close column pairs", line=1)
    labels = []
    for open_col, close_col in zip(rest[::2], rest[1::2]):
        if not (open_col.endswith(_OPEN_SUFFIX) and close_col.endswith(_CLOSE_SUFFIX)):
            raise DataIOError(f"unexpected column pair {open_col!r}, {close_col!r}", line=1)
        label = open_col[: -len(_OPEN_SUFFIX)]
        if close_col[: -len(_CLOSE_SUFFIX)] != label:
            raise DataIOError(f"open/close columns disagree on the label: {open_col!r}, {close_col!r}", line=1)
        labels.append(label)
    return tuple(labels)


def read_prices(path: PathLike) -> Tuple[PriceSeries, IngestReport]:
    """Read a wide price CSV: `date,<label>_open,<label>_close,...`.

    Rows with any empty cell are dropped and their dates reported. Cells that
    are present but not numbers raise DataIOError with the file line number.
    """
    frame = _read_frame(path)
    labels = _price_labels(list(frame.columns))
    # short rows come back as NaN; they count as missing quotes
    values = frame.iloc[:, 1:].fillna("")
    missing = (values == "").any(axis=1).to_numpy()

    numeric = values.apply(pd.to_numeric, errors="coerce")
    malformed = numeric.isna().to_numpy() & ~(values == "").to_numpy()
    if malformed.any():
        row, col = (int(x) for x in np.argwhere(malformed)[0])
        raise DataIOError(f"not a number: {values.iat[row, col]!r} in column {values.columns[col]!r}", line=row + 2)

    dates = frame["date"].to_numpy()
    dropped = tuple(str(d) for d in dates[missing])
    for d in dropped:
        logger.warning("dropping %s: incomplete quotes", d)
    kept = numeric.to_numpy(dtype=np.float64)[~missing]
    kept_dates = tuple(str(d) for d in dates[~missing])
    if kept.shape[0] == 0:
        raise DataIOError(f"no complete rows in {path}")

    try:
        prices = PriceSeries(labels, kept_dates, kept[:, 0::2], kept[:, 1::2])
    except RejectedInputError as exc:
        line = None
        if exc.row is not None:
            line = int(np.flatnonzero(~missing)[exc.row]) + 2
        raise DataIOError(str(exc), line=line) from exc
    report = IngestReport(
        rows_read=int(frame.shape[0]),
        rows_kept=int(kept.shape[0]),
        dropped_dates=dropped,
        first_date=kept_dates[0],
        last_date=kept_dates[-1],
    )
    return prices, report


def write_prices(prices: PriceSeries, path: PathLike) -> None:
    """Write a price CSV with 15 significant digits."""
    header = ["date"] + [f"{label}{suffix}" for label in prices.labels for suffix in (_OPEN_SUFFIX, _CLOSE_SUFFIX)]
    lines = [",".join(header)]
    for t, date in enumerate(prices.dates):
        cells = [date]
        for i in range(prices.n_assets):
            cells.append(f"{prices.open[t, i]:.15g}")
            cells.append(f"{prices.close[t, i]:.15g}")
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_spins(spins: SpinMatrix, path: PathLike) -> None:
    """Write `date,<label>,...` rows of 1/-1; undated matrices leave the date cell empty."""
    lines = [",".join(["date", *spins.labels])]
    dates = spins.dates if spins.dates is not None else ("",) * spins.n_samples
    for date, row in zip(dates, spins.spins):
        lines.append(",".join([date, *(str(int(v)) for v in row)]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_spins(path: PathLike) -> SpinMatrix:
    frame = _read_frame(path)
    columns = list(frame.columns)
    if not columns or columns[0] != "date" or len(columns) < 2:
        raise DataIOError("spin CSV header must be 'date,<label>,...'", line=1)
    values = frame.iloc[:, 1:]
    valid = values.isin(["1", "-1", "+1"]).to_numpy()
    if not valid.all():
        row, col = (int(x) for x in np.argwhere(~valid)[0])
        raise DataIOError(f"spin entries must be 1 or -1, got {values.iat[row, col]!r}", line=row + 2)
    if frame.shape[0] == 0:
        raise DataIOError(f"{path} holds no spin rows", line=2)
    spins = values.astype(np.int64).to_numpy().astype(np.int8)
    dates_col = frame["date"].tolist()
    dates = None if all(d == "" for d in dates_col) else tuple(dates_col)
    return SpinMatrix(tuple(columns[1:]), spins, dates)


def write_json(payload: Mapping[str, Any], path: PathLike) -> None:
    """Deterministic JSON: sorted keys, UTF-8, non-finite floats as null."""
    text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_json(path: PathLike) -> Dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise DataIOError(f"file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataIOError(f"invalid JSON in {p}: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise DataIOError(f"{p} must hold a JSON object")
    return data


def _json_safe(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return f if math.isfinite(f) else None
    if isinstance(value, Path):
        return value.as_posix()
    return value


def model_to_dict(model: CouplingModel) -> Dict[str, Any]:
    return {
        "labels": list(model.labels),
        "J": model.J.tolist(),
        "h": model.h.tolist(),
        "diagonal_meaningful": model.diagonal_meaningful,
        "warnings": list(model.warnings),
    }


def write_model(model: CouplingModel, path: PathLike, extra: Optional[Mapping[str, Any]] = None) -> None:
    payload: Dict[str, Any] = {"model": model_to_dict(model)}
    payload.update(extra or {})
    write_json(payload, path)


def read_model(path: PathLike) -> CouplingModel:
    data = read_json(path)
    body = data.get("model", data)
    try:
        return CouplingModel(
            labels=tuple(body["labels"]),
            J=np.asarray(body["J"], dtype=np.float64),
            h=np.asarray(body["h"], dtype=np.float64),
            diagonal_meaningful=bool(body.get("diagonal_meaningful", False)),
            warnings=tuple(body.get("warnings", ())),
        )
    except KeyError as exc:
        raise DataIOError(f"model JSON {path} lacks field {exc}") from exc
    except (RejectedInputError, TypeError, ValueError) as exc:
        raise DataIOError(f"invalid model in {path}: {exc}") from exc


def write_series(report: TimeSeriesReport, path: PathLike, metadata: Optional[Mapping[str, Any]] = None) -> None:
    """Series CSV: a `# {json}` metadata line, then `window_start,value` rows.

    Gaps are written as empty values. Values use repr so they re-read exactly.
    """
    header: Dict[str, Any] = {
        "kind": report.kind,
        "spec": {"width": report.spec.width, "shift": report.spec.shift},
        "gaps": list(report.gaps),
    }
    header.update(report.metadata)
    header.update(metadata or {})
    lines = ["# " + json.dumps(_json_safe(header), sort_keys=True, ensure_ascii=False, allow_nan=False)]
    lines.append("window_start,value")
    for start, value in zip(report.window_starts, report.values):
        lines.append(f"{start},{'' if math.isnan(value) else repr(float(value))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_series(path: PathLike) -> TimeSeriesReport:
    p = Path(path)
    if not p.is_file():
        raise DataIOError(f"file not found: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if len(lines) < 2 or not lines[0].startswith("# "):
        raise DataIOError(f"{p} lacks the metadata header line", line=1)
    try:
        header = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise DataIOError(f"invalid metadata header: {exc.msg}", line=1) from exc
    if lines[1] != "window_start,value":
        raise DataIOError("expected 'window_start,value' column header", line=2)
    starts: List[Union[str, int]] = []
    values: List[float] = []
    for lineno, line in enumerate(lines[2:], start=3):
        start, sep, value = line.rpartition(",")
        if not sep:
            raise DataIOError(f"expected two fields, got {line!r}", line=lineno)
        starts.append(int(start) if re.fullmatch(r"-?\d+", start) else start)
        try:
            values.append(float(value) if value else float("nan"))
        except ValueError as exc:
            raise DataIOError(f"not a number: {value!r}", line=lineno) from exc
    spec = WindowSpec(**header.pop("spec"))
    kind = header.pop("kind")
    gaps = tuple(header.pop("gaps", ()))
    return TimeSeriesReport(tuple(starts), np.asarray(values), spec, kind, gaps, header)


def read_frequencies(path: PathLike) -> Dict[int, int]:
    """Degree frequencies from `{"frequencies": {"1": 32, ...}}` or a bare mapping."""
    data = read_json(path)
    raw = data.get("frequencies", data)
    try:
        return {int(k): int(v) for k, v in raw.items()}
    except (AttributeError, TypeError, ValueError) as exc:
        raise DataIOError(f"invalid degree frequencies in {path}: {exc}") from exc
