"""CSV emission: a timestamped comment line, a header row, then 17-significant-digit values."""
from __future__ import annotations

import csv
import io
import sys
from datetime import datetime, timezone

from . import __version__


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return _fmt(v.item())
    return str(v)


def render_csv(header, rows, note: str = "") -> str:
    buf = io.StringIO()
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    buf.write(f"# siegel-lab {__version__} {stamp}{' ' + note if note else ''}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, note: str = "") -> None:
    text = render_csv(header, rows, note)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def strip_stamp(text: str) -> str:
    """Drop the leading timestamp comment so two runs can be compared byte-for-byte."""
    lines = text.splitlines(keepends=True)
    return "".join(lines[1:]) if lines and lines[0].startswith("#") else text
