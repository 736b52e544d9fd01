"""Multivariate panel data model, CSV ingestion/serialization, and slicing.

A panel holds N aligned real-valued series of length T. Time indices are
abstract integers: column j of ``values`` is time ``t0 + j``. There is no
timestamp parsing; calendars are out of scope.

CSV conventions: UTF-8, comma-delimited, '.' decimal separator. Wide layout
is one column per series and one row per timestep, with an optional header
row of series names. Long layout is (series, t, value) triples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import IngestError, ParseError, ShapeError, SplitError

__all__ = ["TimePanel", "SplitSpec", "load_csv", "save_csv", "split"]


@dataclass(frozen=True)
class TimePanel:
    """N aligned series of length T.

    ``values`` has one row per series. ``t0`` is the absolute time index of
    the first column (1 for a freshly loaded panel); slices produced by
    :func:`split` carry their absolute position so that downstream consumers
    can align forecasts with ground truth.

    Instances are immutable and safe to share across threads.
    """

    series_names: tuple[str, ...]
    values: np.ndarray
    t0: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"panel values must be 2-D, got shape {values.shape}")
        n, _ = values.shape
        if n < 1:
            raise ShapeError("panel needs at least one series")
        if len(self.series_names) != n:
            raise ShapeError(
                f"{len(self.series_names)} names for {n} series"
            )
        if not np.all(np.isfinite(values)):
            raise IngestError("panel values must be finite (no NaN/Inf)")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "series_names", tuple(self.series_names))

    @property
    def n_series(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    def series(self, n: int) -> np.ndarray:
        """Values of series ``n`` (0-based row index)."""
        return self.values[n]


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test boundaries, as 1-based inclusive end indices."""

    train_end: int
    valid_end: int
    test_end: int

    def validate(self, length: int) -> None:
        ok = 1 <= self.train_end < self.valid_end <= self.test_end <= length
        if not ok:
            raise SplitError(
                f"invalid split ({self.train_end}, {self.valid_end}, "
                f"{self.test_end}) for T={length}"
            )


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"non-numeric cell {text!r} at row {row}, column {col}"
        ) from None
    if not np.isfinite(value):
        raise IngestError(f"non-finite value {text!r} at row {row}, column {col}")
    return value


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [row for row in csv.reader(fh)]
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc


def _looks_like_header(row: list[str]) -> bool:
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _load_wide(rows: list[list[str]]) -> TimePanel:
    if not rows:
        raise IngestError("empty CSV")
    start = 0
    if _looks_like_header(rows[0]):
        names = tuple(cell.strip() for cell in rows[0])
        start = 1
    else:
        names = tuple(f"s{i + 1}" for i in range(len(rows[0])))
    data_rows = rows[start:]
    if not data_rows:
        raise IngestError("CSV has a header but no data rows")
    width = len(names)
    out = np.empty((len(data_rows), width))
    for i, row in enumerate(data_rows):
        if len(row) != width:
            raise IngestError(
                f"ragged row {start + i + 1}: expected {width} cells, got {len(row)}"
            )
        for j, cell in enumerate(row):
            out[i, j] = _parse_cell(cell, row=start + i + 1, col=j + 1)
    return TimePanel(series_names=names, values=out.T)


def _long_header(row: list[str]) -> bool:
    # The series column is free text, so a header is recognized by a
    # non-numeric t or value column.
    if len(row) != 3:
        return True
    try:
        float(row[1])
        float(row[2])
    except ValueError:
        return True
    return False


def _load_long(rows: list[list[str]]) -> TimePanel:
    if not rows:
        raise IngestError("empty CSV")
    start = 1 if _long_header(rows[0]) else 0
    triples: dict[str, dict[int, float]] = {}
    order: list[str] = []
    for i, row in enumerate(rows[start:]):
        lineno = start + i + 1
        if len(row) != 3:
            raise IngestError(
                f"ragged row {lineno}: long layout needs (series, t, value) triples"
            )
        name = row[0].strip()
        t_raw = _parse_cell(row[1], row=lineno, col=2)
        if t_raw != int(t_raw):
            raise ParseError(f"non-integer time index {row[1]!r} at row {lineno}")
        t = int(t_raw)
        value = _parse_cell(row[2], row=lineno, col=3)
        if name not in triples:
            triples[name] = {}
            order.append(name)
        if t in triples[name]:
            raise IngestError(f"duplicate (series, t) pair ({name!r}, {t}) at row {lineno}")
        triples[name][t] = value
    if not order:
        raise IngestError("no data rows")
    t_min = min(min(d) for d in triples.values())
    t_max = max(max(d) for d in triples.values())
    length = t_max - t_min + 1
    out = np.empty((len(order), length))
    for n, name in enumerate(order):
        d = triples[name]
        for j, t in enumerate(range(t_min, t_max + 1)):
            if t not in d:
                raise IngestError(f"missing (series, t) pair ({name!r}, {t})")
            out[n, j] = d[t]
    return TimePanel(series_names=tuple(order), values=out, t0=t_min)


def load_csv(path, layout: str = "wide") -> TimePanel:
    """Load a panel from a CSV file.

    ``layout`` is ``"wide"`` (one column per series, column order preserved)
    or ``"long"`` ((series, t, value) triples; every series must cover the
    full time range; gaps are rejected, imputation is out of scope).
    """
    rows = _read_rows(path)
    if layout == "wide":
        return _load_wide(rows)
    if layout == "long":
        return _load_long(rows)
    raise ValueError(f"unknown layout {layout!r}")


def save_csv(panel: TimePanel, path, layout: str = "wide") -> None:
    """Write a panel to CSV. Floats use shortest round-trip formatting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if layout == "wide":
            writer.writerow(panel.series_names)
            for j in range(panel.length):
                writer.writerow([repr(float(v)) for v in panel.values[:, j]])
        elif layout == "long":
            writer.writerow(["series", "t", "value"])
            for n, name in enumerate(panel.series_names):
                for j in range(panel.length):
                    writer.writerow([name, panel.t0 + j, repr(float(panel.values[n, j]))])
        else:
            raise ValueError(f"unknown layout {layout!r}")


def split(panel: TimePanel, spec: SplitSpec) -> tuple[TimePanel, TimePanel, TimePanel]:
    """Cut a panel into contiguous train/validation/test slices.

    The slices cover [1, train_end], (train_end, valid_end], and
    (valid_end, test_end] in the panel's own 1-based indexing; each carries
    an absolute ``t0``. The test slice may be empty (``valid_end ==
    test_end``), in which case its panel has zero columns.
    """
    spec.validate(panel.length)
    cuts = [(0, spec.train_end), (spec.train_end, spec.valid_end), (spec.valid_end, spec.test_end)]
    parts = []
    for lo, hi in cuts:
        parts.append(
            TimePanel(
                series_names=panel.series_names,
                values=panel.values[:, lo:hi],
                t0=panel.t0 + lo,
            )
        )
    return parts[0], parts[1], parts[2]
