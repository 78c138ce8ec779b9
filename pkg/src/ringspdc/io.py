"""Deterministic CSV/JSON writers with atomic replacement."""

import json
import os
import tempfile
from pathlib import Path

from . import __version__


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.8e}"
    return str(value)


def csv_text(rows, columns, digest):
    lines = [f"# ringspdc {__version__} config_sha256={digest}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def json_text(payload, digest):
    data = {"tool": "ringspdc", "version": __version__, "config_sha256": digest}
    data.update(_jsonable(payload))
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(out_dir, stem, rows, columns, digest, fmt="csv"):
    """Write rows as ``stem.csv`` (default) or ``stem.json``."""
    if fmt == "json":
        return atomic_write(Path(out_dir) / f"{stem}.json",
                            json_text({"columns": list(columns), "rows": rows}, digest))
    return atomic_write(Path(out_dir) / f"{stem}.csv", csv_text(rows, columns, digest))


def write_report(out_dir, stem, payload, digest):
    return atomic_write(Path(out_dir) / f"{stem}.json", json_text(payload, digest))
