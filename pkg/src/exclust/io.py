"""CSV ingestion and emission plus JSON report helpers.

The CSV dialect is fixed: comma separated, header row, dot decimal, UTF-8.
Floats are written with 17 significant digits so a write/read round trip
reproduces every value exactly.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from importlib import resources

import numpy as np

from .errors import CsvFormatError
from .series import SegmentedSeries

SCHEMA_VERSION = 1


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def ingest_csv(
    path,
    value_col: str,
    segment_col: str | None = None,
    djfm_date_col: str | None = None,
) -> SegmentedSeries:
    """Read a series from CSV, optionally segmenting it.

    Rows are grouped into segments by consecutive equal values of
    ``segment_col`` (the whole file is one segment when absent).  With
    ``djfm_date_col``, rows are restricted to December-March and grouped into
    winter seasons (December of year y through March of year y+1, leap years
    included automatically); the two options are mutually exclusive.

    Raises
    ------
    CsvFormatError
        On a missing column, an unparsable value or date, or an empty file;
        carries the 1-based file row number (header = row 1).
    """
    if segment_col is not None and djfm_date_col is not None:
        raise ValueError("segment_col and djfm_date_col are mutually exclusive")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("empty file: no header row", row=1) from None
        header = [h.strip() for h in header]
        columns = {}
        for name in (value_col, segment_col, djfm_date_col):
            if name is None:
                continue
            if name not in header:
                raise CsvFormatError(f"column {name!r} not found in header", row=1)
            columns[name] = header.index(name)

        values: list[float] = []
        keys: list = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            raw = row[columns[value_col]] if columns[value_col] < len(row) else ""
            try:
                v = float(raw)
            except ValueError:
                raise CsvFormatError(
                    f"cannot parse value {raw!r} at row {row_no}", row=row_no
                ) from None
            if not np.isfinite(v):
                raise CsvFormatError(
                    f"non-finite value {raw!r} at row {row_no}", row=row_no
                )
            if djfm_date_col is not None:
                raw_date = row[columns[djfm_date_col]]
                try:
                    date = _dt.date.fromisoformat(raw_date.strip())
                except ValueError:
                    raise CsvFormatError(
                        f"cannot parse date {raw_date!r} at row {row_no}", row=row_no
                    ) from None
                season = _djfm_season(date)
                if season is None:
                    continue  # outside the extended winter season
                keys.append(f"{season}/{season + 1}")
            elif segment_col is not None:
                keys.append(row[columns[segment_col]])
            values.append(v)

    if not values:
        raise CsvFormatError("no data rows", row=1)
    if segment_col is None and djfm_date_col is None:
        return SegmentedSeries([np.asarray(values)])
    segments: list[np.ndarray] = []
    labels: list[str] = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or keys[i] != keys[start]:
            segments.append(np.asarray(values[start:i]))
            labels.append(str(keys[start]))
            start = i
    return SegmentedSeries(segments, labels)


def _djfm_season(date: _dt.date) -> int | None:
    """Starting year of the winter season a date belongs to, if any."""
    if date.month == 12:
        return date.year
    if date.month in (1, 2, 3):
        return date.year - 1
    return None


def write_series_csv(series: SegmentedSeries, path) -> None:
    """Write a series as segment,value rows (ingestible by ingest_csv)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["segment", "value"])
        for i, seg in enumerate(series.segments):
            label = series.label_of(i)
            for v in seg:
                writer.writerow([label, _format_float(v)])


def write_table_csv(path, header: list[str], rows: list[list]) -> None:
    """Write a small plot-data table; floats get 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [_format_float(v) if isinstance(v, float) else v for v in row]
            )


def report_json(report: dict) -> str:
    """Serialize a report deterministically (keys keep insertion order)."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def timestamp_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def load_report_schema() -> dict:
    """The versioned JSON schema every report validates against."""
    text = (
        resources.files("exclust").joinpath("schemas/report-v1.json").read_text("utf-8")
    )
    return json.loads(text)
