"""
Plain-text outputs: CSV tables and key=value summaries.

Every output opens with ``#`` header lines carrying the tool version, the command and
the full effective configuration. Dropping the ``#`` lines leaves strict CSV.
Floating-point values are written with six significant digits.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Optional, Union


def fmt(value: Any) -> str:
    """Render one cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def header_block(command: str, version: str, config_lines: Iterable[str]) -> list[str]:
    """Provenance header: version and command first, then the sorted config."""
    return [f"# fogcell_version={version}", f"# command={command}", *config_lines]


def render_csv(
    header: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> str:
    buffer = io.StringIO()
    for line in header:
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    return buffer.getvalue()


def render_key_values(header: Sequence[str], lines: Iterable[str]) -> str:
    return "".join(f"{line}\n" for line in [*header, *lines])


def write_text(text: str, path: Union[str, Path]) -> Path:
    """Write ``text`` as UTF-8 with ``\\n`` line endings on every platform."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path
