"""Atomic, byte-stable file output."""
import csv
import io as _io
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence


def format_value(value: Any) -> str:
    """Shortest round-trip text of a number; other values use ``str``."""
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to a sibling temporary file and rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with a header row, ``,`` separators and LF line endings."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Atomically write a CSV file."""
    write_atomic(path, csv_text(header, rows))
