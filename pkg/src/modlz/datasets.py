"""Deterministic tabular output.

Datasets are plain tables of floats with a flat metadata header carrying
the fully resolved run configuration, so any emitted file can be traced
back to (and re-run from) its exact inputs.  Identical configurations
produce byte-identical bytes: floats are written with 17 significant
digits, key order is fixed, and nothing time- or host-dependent is
recorded.

CSV files put the metadata in '#'-prefixed lines above the header row,
one TOML-style `key = value` pair per line, so the block re-parses with
any TOML reader.  JSON files carry the same content under "meta",
"columns" and "rows" keys.
"""

import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return repr(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)  # valid TOML basic string
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"unsupported metadata value type: {type(v).__name__}")


@dataclass
class Dataset:
    """Column-named table of floats with a resolved-config header."""

    columns: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, len(self.columns))
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError("rows must be shaped (n, len(columns))")

    def render_csv(self):
        buf = io.StringIO()
        for key, value in self.meta.items():
            buf.write(f"# {key} = {_toml_value(value)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    def render_json(self):
        payload = {
            "meta": self.meta,
            "columns": list(self.columns),
            "rows": [[float(v) for v in row] for row in self.rows],
        }
        return json.dumps(payload, indent=2) + "\n"

    def render(self, fmt):
        if fmt == "csv":
            return self.render_csv()
        if fmt == "json":
            return self.render_json()
        raise ValueError(f"unknown format {fmt!r}")

    def write(self, path=None, fmt="csv"):
        """Write to path, or to stdout when path is None."""
        text = self.render(fmt)
        if path is None:
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)


def parse_csv_meta(text):
    """Recover the metadata dict from rendered CSV text."""
    lines = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        lines.append(line[1:].strip())
    return tomllib.loads("\n".join(lines))


def load_csv(text):
    """Parse rendered CSV back into a Dataset (for round-trip checks)."""
    meta = parse_csv_meta(text)
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    if not body:
        raise ValueError("no header row found")
    columns = body[0].split(",")
    rows = [[float(x) for x in ln.split(",")] for ln in body[1:] if ln]
    arr = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return Dataset(columns=columns, rows=arr, meta=meta)
