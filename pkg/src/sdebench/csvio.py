"""CSV emission and parsing for experiment outputs.

All experiment artifacts are plain CSV with a fixed column order, float
cells rendered at 17 significant digits (lossless for binary64), and
leading '#' metadata lines (tool version, configuration echo, seed).
Nothing time- or host-dependent is ever written, so reruns with the same
configuration are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import Error

__all__ = ["CsvTable", "format_cell", "read_csv", "write_csv"]

_FLOAT_FMT = "%.17g"


def format_cell(value) -> str:
    """Render one cell deterministically.

    Floats use %.17g (value-preserving round trip), ints plain decimal,
    anything else str().  bool is rejected to avoid surprising 'True'
    cells that downstream numeric parsers would choke on.
    """
    if isinstance(value, bool):
        raise TypeError("boolean cells are not part of any schema")
    if isinstance(value, float):
        return _FLOAT_FMT % value
    if isinstance(value, int):
        return str(value)
    return str(value)


@dataclass
class CsvTable:
    """A rectangular table plus ordered '#' metadata lines."""

    columns: Sequence[str]
    rows: list = field(default_factory=list)
    metadata: list = field(default_factory=list)  # list of (key, value)

    def add_row(self, *cells) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(
                f"row has {len(cells)} cells, table has "
                f"{len(self.columns)} columns")
        self.rows.append(tuple(cells))

    def add_meta(self, key: str, value) -> None:
        self.metadata.append((str(key), format_cell(value)))

    def column(self, name: str) -> list:
        i = list(self.columns).index(name)
        return [row[i] for row in self.rows]

    def float_column(self, name: str) -> list:
        return [float(v) for v in self.column(name)]

    def render(self) -> str:
        lines = [f"# {k} = {v}" for k, v in self.metadata]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(format_cell(c) for c in row))
        return "\n".join(lines) + "\n"


def write_csv(table: CsvTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(table.render(), encoding="utf-8", newline="\n")
    return path


def read_csv(path) -> CsvTable:
    """Parse a CSV written by write_csv; cells come back as strings."""
    text = Path(path).read_text(encoding="utf-8")
    metadata = []
    columns = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, _, v = body.partition("=")
                metadata.append((k.strip(), v.strip()))
            else:
                metadata.append((body, ""))
            continue
        cells = line.split(",")
        if columns is None:
            columns = [c.strip() for c in cells]
            continue
        if len(cells) != len(columns):
            raise Error(f"{path}:{lineno}: row has {len(cells)} cells, "
                        f"header has {len(columns)}")
        rows.append(tuple(cells))
    if columns is None:
        raise Error(f"{path}: no header row found")
    table = CsvTable(columns=columns, metadata=metadata)
    table.rows = rows
    return table
