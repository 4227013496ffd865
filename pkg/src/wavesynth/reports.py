"""CSV tables with JSON configuration sidecars.

File layout::

    # sidecar=<name>.config.json sha256=<hex digest of the sidecar bytes>
    col_a,col_b,...
    1,0.10000000000000001,...

Floats are written with 17 significant digits so that parsing restores the
exact binary value.  Lines end with LF and files are UTF-8.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import numbers
import os
from pathlib import Path

from .exceptions import ConfigError
from .scenarios import Table

__all__ = ["emit_csv", "format_value", "read_csv", "read_sidecar", "sidecar_bytes", "write_report"]


def format_value(v) -> str:
    """Text form of one cell."""
    if isinstance(v, (bool,)):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def _parse_value(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def sidecar_bytes(subcommand: str, config: dict) -> bytes:
    """Canonical JSON encoding of a run configuration."""
    doc = {"subcommand": subcommand, "config": config}
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _csv_text(table: Table, comment: str | None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write("# " + comment + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _write(path: Path, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ConfigError(f"output: cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(table: Table, path, comment: str | None = None) -> Path:
    """Write ``table`` to ``path``, optionally preceded by a ``#`` comment line."""
    if not table.rows:
        raise ConfigError("table: refusing to write an empty table")
    path = Path(path)
    _write(path, _csv_text(table, comment).encode("utf-8"))
    return path


def write_report(table: Table, outdir, subcommand: str, config: dict):
    """Write ``<subcommand>.csv`` and ``<subcommand>.config.json`` into ``outdir``.

    Returns the paths of the CSV and the sidecar.
    """
    outdir = Path(outdir)
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output: cannot create {outdir}: {exc.strerror or exc}") from exc
    side = outdir / f"{subcommand}.config.json"
    data = sidecar_bytes(subcommand, config)
    digest = hashlib.sha256(data).hexdigest()
    _write(side, data)
    csv_path = emit_csv(table, outdir / f"{subcommand}.csv", f"sidecar={side.name} sha256={digest}")
    return csv_path, side


def read_csv(path):
    """Parse a file written by :func:`emit_csv`.

    Returns
    -------
    table : Table
    comment : str or None
        The leading comment without the ``# `` prefix.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"csv: cannot read {path}: {exc.strerror or exc}") from exc
    lines = text.split("\n")
    comment = None
    if lines and lines[0].startswith("#"):
        comment = lines[0][1:].strip()
        lines = lines[1:]
    rows = list(csv.reader([ln for ln in lines if ln]))
    if not rows:
        raise ConfigError(f"csv: {path} has no header")
    return Table(rows[0], [[_parse_value(v) for v in r] for r in rows[1:]]), comment


def read_sidecar(path):
    """Load ``(subcommand, config)`` from a sidecar file."""
    path = Path(path)
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "subcommand" not in doc or not isinstance(doc.get("config"), dict):
        raise ConfigError(f"config: {path} lacks 'subcommand' and 'config' entries")
    return doc["subcommand"], doc["config"]
