"""Series data model, validation and CSV ingestion.

A series is an epoch-ordered sequence of d-dimensional sample vectors.
Detectors consume windows (contiguous index ranges) of a series; the
reference window R stays fixed while the moving window W slides.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ParseError, ValidationError


@dataclass(frozen=True)
class SeriesPoint:
    epoch: int
    timestamp: int
    values: tuple

    @property
    def d(self):
        return len(self.values)


@dataclass(frozen=True)
class Series:
    """Immutable epoch-ordered collection of d-dimensional points.

    ``data`` is an (n, d) float array in epoch order; ``epochs`` and
    ``timestamps`` are parallel integer arrays. Timestamps are stored but
    never consulted by any detector.
    """

    epochs: np.ndarray
    timestamps: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        epochs = np.asarray(self.epochs, dtype=np.int64)
        timestamps = np.asarray(self.timestamps, dtype=np.int64)
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValidationError("data must be a 2-D array of shape (n, d)")
        if data.shape[1] < 1:
            raise ValidationError("dimension d must be >= 1")
        if len(epochs) != len(data) or len(timestamps) != len(data):
            raise ValidationError("epochs, timestamps and data must align")
        if len(epochs) and np.any(epochs < 0):
            raise ValidationError("epochs must be non-negative")
        if len(epochs) > 1 and np.any(np.diff(epochs) <= 0):
            raise ValidationError("epochs must strictly increase")
        if not np.all(np.isfinite(data)):
            raise ValidationError("sample values must be finite")
        object.__setattr__(self, "epochs", epochs)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "data", data)

    def __len__(self):
        return len(self.data)

    @property
    def d(self):
        return self.data.shape[1]

    def point(self, i):
        return SeriesPoint(
            epoch=int(self.epochs[i]),
            timestamp=int(self.timestamps[i]),
            values=tuple(self.data[i]),
        )

    @classmethod
    def from_values(cls, data, epochs=None, timestamps=None):
        """Build a series from an (n, d) array, defaulting epoch = index."""
        data = np.atleast_2d(np.asarray(data, dtype=np.float64))
        if data.shape[0] == 1 and data.shape[1] > 1 and np.ndim(data) == 2:
            # accept a 1-D vector as a d=1 series
            pass
        if epochs is None:
            epochs = np.arange(len(data))
        if timestamps is None:
            timestamps = np.asarray(epochs)
        return cls(epochs=np.asarray(epochs), timestamps=np.asarray(timestamps), data=data)


@dataclass(frozen=True)
class Window:
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0:
            raise ArgumentError("window start and length must be non-negative")

    @property
    def stop(self):
        return self.start + self.length


@dataclass
class FormatOptions:
    delimiter: str = ","
    has_timestamp: bool = False
    has_header: bool | None = None  # None = autodetect
    reorder_by_epoch: bool = False


def _is_int(token):
    try:
        int(token)
        return True
    except ValueError:
        return False


def _is_float(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


def parse_series(stream, options: FormatOptions | None = None) -> Series:
    """Parse CSV rows ``epoch[,timestamp],v1,...,vd`` into a Series.

    ``stream`` may be a text stream, a byte stream, a string or bytes.
    """
    options = options or FormatOptions()
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    if hasattr(stream, "read") and isinstance(stream.read(0), bytes):
        stream = io.TextIOWrapper(stream, encoding="utf-8")

    reader = csv.reader(stream, delimiter=options.delimiter)
    rows = []
    header_skipped = False
    ncols = None
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not tok.strip() for tok in row):
            continue
        row = [tok.strip() for tok in row]
        if row[0].startswith("#"):
            continue
        if not header_skipped and not rows:
            autodetect = options.has_header is None and not _is_int(row[0])
            if options.has_header or autodetect:
                header_skipped = True
                continue
        if ncols is None:
            ncols = len(row)
        elif len(row) != ncols:
            raise ParseError(f"expected {ncols} columns, got {len(row)}", line=lineno)
        meta = 2 if options.has_timestamp else 1
        if len(row) <= meta:
            raise ParseError("row has no value columns", line=lineno)
        if not _is_int(row[0]):
            raise ParseError(f"bad epoch {row[0]!r}", line=lineno)
        epoch = int(row[0])
        if options.has_timestamp:
            if not _is_int(row[1]):
                raise ParseError(f"bad timestamp {row[1]!r}", line=lineno)
            timestamp = int(row[1])
        else:
            timestamp = epoch
        values = []
        for tok in row[meta:]:
            if not _is_float(tok):
                raise ParseError(f"bad value {tok!r}", line=lineno)
            v = float(tok)
            if not np.isfinite(v):
                raise ValidationError(f"line {lineno}: non-finite value {tok!r}")
            values.append(v)
        rows.append((epoch, timestamp, values, lineno))

    if not rows:
        raise ParseError("no data rows")

    epochs = np.array([r[0] for r in rows], dtype=np.int64)
    if options.reorder_by_epoch:
        order = np.argsort(epochs, kind="stable")
        rows = [rows[i] for i in order]
        epochs = epochs[order]
    if len(np.unique(epochs)) != len(epochs):
        raise ValidationError("duplicate epoch values")
    timestamps = np.array([r[1] for r in rows], dtype=np.int64)
    data = np.array([r[2] for r in rows], dtype=np.float64)
    return Series(epochs=epochs, timestamps=timestamps, data=data)


def serialize_series(series: Series, with_timestamp=False, delimiter=",") -> str:
    """Inverse of parse_series for valid input (row-equivalent round trip)."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    for i in range(len(series)):
        row = [int(series.epochs[i])]
        if with_timestamp:
            row.append(int(series.timestamps[i]))
        row.extend(repr(float(v)) for v in series.data[i])
        writer.writerow(row)
    return out.getvalue()


def window_view(series: Series, w: Window) -> np.ndarray:
    """Return the (length, d) slice of the series covered by ``w``."""
    if w.stop > len(series):
        raise ArgumentError(
            f"window [{w.start}, {w.stop}) out of bounds for series of length {len(series)}"
        )
    return series.data[w.start : w.stop]


def split_blocks(series: Series, block_len: int) -> list[Window]:
    """Maximal list of non-overlapping consecutive windows; remainder dropped."""
    if block_len < 2:
        raise ArgumentError("block_len must be >= 2")
    n = len(series) // block_len
    return [Window(i * block_len, block_len) for i in range(n)]
