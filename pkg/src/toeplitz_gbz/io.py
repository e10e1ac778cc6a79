"""CSV/JSON serialization of spectral sets, pseudospectrum grids and tables."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .limits import PseudospectrumGrid
from .sets import SpectralSet, Table

SCHEMA = "gbz-spectra/1"
SCHEMA_LINE = f"# schema: {SCHEMA}"


class SchemaError(ValueError):
    pass


def _num(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _json_num(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    x = float(x)
    return None if math.isnan(x) else x


def _unjson_num(x) -> float:
    return math.nan if x is None else float(x)


def to_csv(dataset) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(dataset, SpectralSet):
        if len(dataset) == 0:
            raise ValueError("refusing to emit an empty spectral set")
        w.writerow(["re", "im", "source", "param1", "param2"])
        for p, (a, b) in zip(dataset.points, dataset.params):
            w.writerow([_num(p.real), _num(p.imag), dataset.source, _num(a), _num(b)])
    elif isinstance(dataset, PseudospectrumGrid):
        w.writerow(["x", "y", "sigma_min"])
        for i, x in enumerate(dataset.xs):
            for j, y in enumerate(dataset.ys):
                w.writerow([_num(x), _num(y), _num(dataset.values[i, j])])
    elif isinstance(dataset, Table):
        if not dataset.rows:
            raise ValueError("refusing to emit an empty table")
        w.writerow(dataset.columns)
        for row in dataset.rows:
            w.writerow([v if isinstance(v, str) else _num(v) for v in row])
    elif isinstance(dataset, dict):
        w.writerow(["key", "value"])
        for key, val in dataset.items():
            w.writerow([key, json.dumps(val)])
    else:
        raise TypeError(f"cannot serialize {type(dataset).__name__}")
    return buf.getvalue()


def to_json_obj(dataset) -> dict[str, Any]:
    if isinstance(dataset, SpectralSet):
        if len(dataset) == 0:
            raise ValueError("refusing to emit an empty spectral set")
        return {
            "schema": SCHEMA,
            "kind": "spectral_set",
            "source": dataset.source,
            "param_names": list(dataset.param_names),
            "points": [[float(p.real), float(p.imag)] for p in dataset.points],
            "params": [[_json_num(a), _json_num(b)] for a, b in dataset.params],
        }
    if isinstance(dataset, PseudospectrumGrid):
        return {
            "schema": SCHEMA,
            "kind": "pseudospectrum_grid",
            "rectangle": list(dataset.rectangle),
            "resolution": list(dataset.resolution),
            "m": dataset.m,
            "values": dataset.values.tolist(),
        }
    if isinstance(dataset, Table):
        if not dataset.rows:
            raise ValueError("refusing to emit an empty table")
        rows = [[v if isinstance(v, str) else _json_num(v) for v in r] for r in dataset.rows]
        return {"schema": SCHEMA, "kind": "table", "columns": dataset.columns, "rows": rows}
    if isinstance(dataset, dict):
        return {"schema": SCHEMA, "kind": "record", **dataset}
    raise TypeError(f"cannot serialize {type(dataset).__name__}")


def to_json(dataset) -> str:
    return json.dumps(to_json_obj(dataset), indent=1, allow_nan=False) + "\n"


def from_json_obj(obj: dict[str, Any]):
    if obj.get("schema") != SCHEMA:
        raise SchemaError(f"unsupported schema {obj.get('schema')!r}; expected {SCHEMA!r}")
    kind = obj.get("kind")
    if kind == "spectral_set":
        pts = np.array([complex(re, im) for re, im in obj["points"]], dtype=complex)
        params = np.array([[_unjson_num(a), _unjson_num(b)] for a, b in obj["params"]])
        return SpectralSet(pts, obj["source"], params.reshape(-1, 2), tuple(obj["param_names"]))
    if kind == "pseudospectrum_grid":
        return PseudospectrumGrid(
            tuple(obj["rectangle"]), tuple(obj["resolution"]), np.array(obj["values"], dtype=float), obj["m"]
        )
    if kind == "table":
        rows = [tuple(math.nan if v is None else v for v in r) for r in obj["rows"]]
        return Table(list(obj["columns"]), rows)
    if kind == "record":
        return {k: v for k, v in obj.items() if k not in ("schema", "kind")}
    raise SchemaError(f"unknown dataset kind {kind!r}")


def from_json(text: str):
    return from_json_obj(json.loads(text))


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Header and raw rows of an emitted CSV file, after checking its schema line."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        found = lines[0] if lines else ""
        raise SchemaError(f"unsupported or missing schema line {found!r}; expected {SCHEMA_LINE!r}")
    reader = csv.reader(lines[1:])
    header = next(reader)
    return header, [row for row in reader]


def emit(dataset, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Serialize ``dataset`` and write it to ``path`` (stdout when ``None``)."""
    if fmt == "csv":
        text = to_csv(dataset)
    elif fmt == "json":
        text = to_json(dataset)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
