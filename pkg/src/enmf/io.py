"""Reading and writing COPE and matrix files.

JSON files hold entries in the scalar text grammar.  A bundle file keeps
several named matrices under ``"matrices"``; ``bundle.json#A1`` selects one.
CSV files hold one matrix row per line; a leading ``# blocks: 2,2`` comment
sets the measurement blocks.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from importlib import resources
from pathlib import Path

from .field import FieldError
from .matrix import CopeMatrix, Matrix, validate_cope

__all__ = [
    "InputError",
    "read_cope",
    "read_matrix",
    "cope_to_json",
    "matrix_to_json",
    "matrix_rows_text",
    "fixture_names",
    "fixture_path",
    "load_fixture",
    "fixture_matrix",
    "fixture_cope",
    "digest",
]


class InputError(ValueError):
    """Unreadable or malformed input file."""


def _parse_entries(rows, field, source: str) -> Matrix:
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{source}: entries must be a non-empty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise InputError(f"{source}: row {i + 1} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{source}: row {i + 1} has {len(row)} entries, expected {width}")
        vals = []
        for j, text in enumerate(row):
            try:
                vals.append(field.parse(str(text)))
            except (ValueError, FieldError) as exc:
                raise InputError(
                    f"{source}: cannot parse entry {text!r} at row {i + 1}, column {j + 1}: {exc}"
                ) from exc
        out.append(vals)
    if width == 0:
        raise InputError(f"{source}: rows are empty")
    return Matrix(out, field)


def _load_json_text(text: str, source: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{source}: top-level JSON value must be an object")
    return data


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _check_radicand(data: dict, field, source: str) -> None:
    rad = data.get("radicand")
    if rad is not None and field.exact and int(rad) != field.radicand:
        raise InputError(f"{source}: radicand {rad} does not match backend radicand "
                         f"{field.radicand}")


def _read_csv(text: str, field, source: str) -> tuple[Matrix, list[int] | None]:
    blocks = None
    lines = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.lower().startswith("blocks:"):
                try:
                    blocks = [int(x) for x in body.split(":", 1)[1].split(",") if x.strip()]
                except ValueError as exc:
                    raise InputError(f"{source}: malformed blocks comment {stripped!r}") from exc
            continue
        lines.append(line)
    rows = [[cell.strip() for cell in r] for r in csv.reader(_io.StringIO("\n".join(lines)))
            if any(cell.strip() for cell in r)]
    return _parse_entries(rows, field, source), blocks


def read_cope(path, field, form: str = "A") -> CopeMatrix:
    """Load and validate a COPE matrix from JSON or CSV."""
    source = str(path)
    text = _read_text(path)
    if source.lower().endswith(".csv"):
        m, blocks = _read_csv(text, field, source)
        heights = blocks if blocks is not None else [m.rows]
    else:
        data = _load_json_text(text, source)
        _check_radicand(data, field, source)
        if "entries" not in data:
            raise InputError(f"{source}: missing 'entries'")
        m = _parse_entries(data["entries"], field, source)
        heights = data.get("block_heights") or [m.rows]
        if "l" in data and int(data["l"]) != len(heights):
            raise InputError(f"{source}: l = {data['l']} but {len(heights)} block heights given")
        form = data.get("form", form)
    return validate_cope(m, heights, form)


def read_matrix(spec: str, field) -> Matrix:
    """Load a plain matrix; ``file.json#name`` picks one from a bundle."""
    path, _, key = str(spec).partition("#")
    text = _read_text(path)
    if path.lower().endswith(".csv"):
        return _read_csv(text, field, path)[0]
    data = _load_json_text(text, path)
    _check_radicand(data, field, path)
    if key:
        mats = data.get("matrices", {})
        if key not in mats:
            raise InputError(f"{path}: no matrix named {key!r} (have {sorted(mats)})")
        return _parse_entries(mats[key], field, f"{path}#{key}")
    if "entries" not in data:
        raise InputError(f"{path}: missing 'entries' (use file.json#name for bundles)")
    return _parse_entries(data["entries"], field, path)


def matrix_rows_text(m: Matrix) -> list[list[str]]:
    f = m.field
    return [[f.format(x) for x in row] for row in m.row_list()]


def matrix_to_json(m: Matrix) -> dict:
    out = {"entries": matrix_rows_text(m)}
    if m.field.exact:
        out = {"radicand": m.field.radicand, **out}
    return out


def cope_to_json(c: CopeMatrix, name: str | None = None) -> dict:
    out: dict = {}
    if name:
        out["name"] = name
    if c.field.exact:
        out["radicand"] = c.field.radicand
    out.update({"l": c.l, "block_heights": list(c.block_heights), "form": c.form,
                "entries": matrix_rows_text(c.data)})
    return out


def digest(m: Matrix) -> str:
    """Stable short hash of a matrix's textual entries."""
    h = hashlib.sha256()
    h.update(f"{m.rows}x{m.cols};".encode())
    for row in matrix_rows_text(m):
        h.update((",".join(row) + ";").encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# shipped fixtures

def _fixture_dir():
    return resources.files("enmf") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-5] for p in _fixture_dir().iterdir() if p.name.endswith(".json"))


def fixture_path(name: str) -> Path:
    name = name[:-5] if name.endswith(".json") else name
    p = _fixture_dir() / f"{name}.json"
    if not p.is_file():
        raise InputError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return Path(str(p))


def load_fixture(name: str) -> dict:
    return json.loads(fixture_path(name).read_text())


def fixture_matrix(name: str, key: str, field) -> Matrix:
    return read_matrix(f"{fixture_path(name)}#{key}", field)


def fixture_cope(name: str, field) -> CopeMatrix:
    return read_cope(fixture_path(name), field)
