"""Table serialization.

CSV files follow RFC 4180 (comma separated, CRLF line ends, quoting when
needed) preceded by a block of ``# key: value`` provenance lines. Cells are
written with ``repr`` for floats so that :func:`parse` recovers them
exactly; ``NA`` marks a cell that does not apply.
"""

from __future__ import annotations

import csv
import io
import os
from typing import List, Optional, Sequence

from .runner import ResultTable

NA_TOKEN = "NA"
FORMATS = ("csv", "plot")


def _fmt(v) -> str:
    if v is None:
        return NA_TOKEN
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _unfmt(text: str):
    if text == NA_TOKEN:
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def to_csv_text(table: ResultTable) -> str:
    buf = io.StringIO(newline="")
    for key, value in table.provenance.items():
        if "\n" in key or "\r" in key or "\n" in value or "\r" in value:
            raise ValueError(f"provenance entry {key!r} spans lines")
        buf.write(f"# {key}: {value}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def parse_csv_text(text: str) -> ResultTable:
    lines = text.splitlines(keepends=True)
    provenance = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].rstrip("\r\n")
        body = body[1:] if body.startswith(" ") else body
        key, sep, value = body.partition(": ")
        if not sep:
            raise ValueError(f"malformed provenance line {i + 1}: {lines[i]!r}")
        provenance[key] = value
        i += 1
    reader = csv.reader(io.StringIO("".join(lines[i:]), newline=""))
    try:
        columns = next(reader)
    except StopIteration as exc:
        raise ValueError("CSV has no header row") from exc
    rows = [tuple(_unfmt(c) for c in r) for r in reader if r]
    return ResultTable(tuple(columns), rows, provenance)


def parse(path: str) -> ResultTable:
    """Read a table written by :func:`emit`."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_csv_text(fh.read())


def _check_dir(out_dir: str) -> None:
    if not os.path.isdir(out_dir):
        raise FileNotFoundError(f"output directory does not exist: {out_dir}")


def emit(table: ResultTable, fmt: str = "csv", out_dir: str = ".",
         stem: Optional[str] = None) -> List[str]:
    """Write ``table`` to ``out_dir`` and return the paths written.

    ``fmt="csv"`` writes ``<stem>.csv``; ``fmt="plot"`` writes the CSV and
    a standalone SVG figure ``<stem>.svg`` next to it.

    Raises
    ------
    FileNotFoundError
        If ``out_dir`` is missing (the message names the path).
    OSError
        On write failures, with the path in the message.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r} (choose from {', '.join(FORMATS)})")
    _check_dir(out_dir)
    stem = stem or table.provenance.get("experiment", "table")
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    try:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_csv_text(table))
    except OSError as exc:
        raise OSError(f"cannot write {csv_path}: {exc.strerror}") from exc
    paths = [csv_path]
    if fmt == "plot":
        from .plots import render

        paths.append(render(table, os.path.join(out_dir, f"{stem}.svg")))
    return paths
