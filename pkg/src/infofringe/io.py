"""CSV and key-value formats.

Every CSV written here starts with ``#``-prefixed comment lines (the run
manifest or table metadata) followed by a normal header row.
"""
from __future__ import annotations

import contextlib
import csv
import datetime
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParseError


def fmt(value) -> str:
    """Shortest text that reads back to the same value."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


@contextlib.contextmanager
def _open_out(path_or_buf):
    if hasattr(path_or_buf, "write"):
        yield path_or_buf
    else:
        with open(path_or_buf, "w", newline="") as fh:
            yield fh


def write_csv(path_or_buf, columns, rows, header=()):
    with _open_out(path_or_buf) as fh:
        for line in header:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


@dataclass
class CsvTable:
    comments: list
    columns: list
    rows: list  # list of (line number, dict)

    def column(self, name, convert=float):
        out = []
        for lineno, row in self.rows:
            try:
                out.append(convert(row[name]))
            except (KeyError, TypeError, ValueError):
                raise ParseError(f"bad value {row.get(name)!r} in column {name!r}", lineno) from None
        return out


def read_csv(path_or_buf) -> CsvTable:
    if hasattr(path_or_buf, "read"):
        text = path_or_buf.read()
    else:
        try:
            with open(path_or_buf, newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {path_or_buf}: {exc.strerror}") from None
    comments, columns, rows = [], None, []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append(stripped[1:].strip())
            continue
        fields = next(csv.reader([stripped]))
        if columns is None:
            columns = [c.strip() for c in fields]
            if len(set(columns)) != len(columns):
                raise ParseError("duplicate column names", lineno)
            continue
        if len(fields) != len(columns):
            raise ParseError(f"expected {len(columns)} fields, found {len(fields)}", lineno)
        rows.append((lineno, dict(zip(columns, (f.strip() for f in fields)))))
    if columns is None:
        raise ParseError("no header row found")
    return CsvTable(comments, columns, rows)


def parse_metadata(comments) -> dict:
    """``key: value`` and ``key=value`` pairs from comment lines."""
    meta = {}
    for line in comments:
        for part in line.split(","):
            sep = ":" if ":" in part else "=" if "=" in part else None
            if sep is None:
                continue
            key, _, value = part.partition(sep)
            meta[key.strip()] = value.strip()
    return meta


def write_fringe_table(table, path_or_buf, extra_header=()):
    header = list(extra_header) + [f"k={fmt(table.k)}, f0={table.f0}, step={fmt(table.step)}"]
    write_csv(path_or_buf, ["x", "f"], zip(table.xs, table.fs), header)


def read_fringe_table(path_or_buf):
    from .geometry import FringeTable

    tab = read_csv(path_or_buf)
    meta = parse_metadata(tab.comments)
    try:
        k, f0, step = float(meta["k"]), int(meta["f0"]), float(meta["step"])
    except (KeyError, ValueError):
        raise ParseError("fringe table header must record k, f0 and step") from None
    xs = np.array(tab.column("x"))
    fs = np.array(tab.column("f"))
    direction = np.sign(np.append(np.diff(fs), 0.0))
    slopes = direction * k * np.sqrt(np.clip(fs * (1.0 - fs), 0.0, None))
    return FringeTable(xs=xs, fs=fs, k=k, f0=f0, step=step, slopes=slopes)


CLICK_COLUMNS = ["trial_id", "setup", "x", "outcome", "choice"]


def write_click_stream(stream, path_or_buf, header=()):
    setups = np.where(stream.recombined, "recombined", "open")
    rows = zip(stream.trial_id, setups, stream.x, stream.outcome, stream.delayed_choice.astype(int))
    write_csv(path_or_buf, CLICK_COLUMNS, rows, header)


def read_click_stream(path_or_buf):
    tab = read_csv(path_or_buf)
    missing = set(CLICK_COLUMNS) - set(tab.columns)
    if missing:
        raise ParseError(f"click log lacks columns {sorted(missing)}")
    return _clicks_from_table(tab)


def _clicks_from_table(tab):
    from .trials import ClickStream

    def setup(value):
        if value not in ("open", "recombined"):
            raise ValueError(value)
        return value == "recombined"

    def outcome(value):
        v = int(value)
        if v not in (1, 2):
            raise ValueError(value)
        return v

    return ClickStream(
        trial_id=np.array(tab.column("trial_id", int), dtype=np.int64),
        x=np.array(tab.column("x")),
        recombined=np.array(tab.column("setup", setup), dtype=bool),
        outcome=np.array(tab.column("outcome", outcome), dtype=np.int8),
        delayed_choice=np.array(tab.column("choice", lambda v: bool(int(v))), dtype=bool),
    )


def read_count_data(path_or_buf) -> np.ndarray:
    """Rows of ``(x, n1, n2)`` from either a click log or a count table.

    Count tables need ``x``, ``n1`` and ``n2`` columns (``scan`` output has
    them); click logs are aggregated per ``x`` over recombined trials.
    """
    tab = read_csv(path_or_buf)
    cols = set(tab.columns)
    if {"x", "n1", "n2"} <= cols:
        x = tab.column("x")
        n1 = tab.column("n1", _count)
        n2 = tab.column("n2", _count)
        for (lineno, _), xv in zip(tab.rows, x):
            if not math.isfinite(xv):
                raise ParseError("x must be finite", lineno)
        return np.column_stack([x, n1, n2]) if x else np.empty((0, 3))
    if set(CLICK_COLUMNS) <= cols:
        stream = _clicks_from_table(tab)
        keep = stream.recombined
        x = stream.x[keep]
        xs, inverse = np.unique(x, return_inverse=True)
        ones = (stream.outcome[keep] == 1).astype(float)
        n1 = np.bincount(inverse, weights=ones, minlength=len(xs))
        n2 = np.bincount(inverse, weights=1.0 - ones, minlength=len(xs))
        return np.column_stack([xs, n1, n2])
    raise ParseError("expected columns x,n1,n2 or a click log (" + ",".join(CLICK_COLUMNS) + ")", 1)


def _count(value) -> int:
    v = float(value)
    if v < 0 or v != int(v):
        raise ValueError(value)
    return int(v)


def format_report(values: dict) -> str:
    return "".join(f"{key} = {fmt(value)}\n" for key, value in values.items())


def parse_report(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if "=" in line and not line.lstrip().startswith("#"):
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


@dataclass
class RunManifest:
    """What is needed to rerun a command exactly."""

    command: str
    params: dict
    seed: object = None
    version: str = ""
    outputs: list = field(default_factory=list)
    created: str = ""

    def __post_init__(self):
        if not self.version:
            from . import __version__

            self.version = __version__
        if not self.created:
            self.created = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")

    def header_lines(self) -> list:
        lines = [f"infofringe {self.version}", f"command: {self.command}"]
        lines += [f"param.{key}: {fmt(value)}" for key, value in sorted(self.params.items())]
        lines.append(f"seed: {fmt(self.seed)}")
        lines.append("outputs: " + " ".join(os.fspath(p) for p in self.outputs))
        lines.append(f"created: {self.created}")
        return lines
