"""Embedded transcription of the printed Tables 1-10, used as the test oracle.

One JSON file per table lives in ``cyqc/data``.  ``CYQC_DATASET`` may point
to another directory with the same layout.  Every cell that names a lattice,
a fiber or a configuration is parsed on load, so a malformed row fails with
its table, row and column.
"""

from __future__ import annotations

import ast
import hashlib
import json
import operator
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from . import lattice as lat
from .kodaira import FiberError, parse_config, parse_fiber

VERSION = "1.0"
TABLE_IDS = tuple(range(1, 11))


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    tables: dict[int, dict]
    version: str
    checksum: str
    source: str

    def rows(self, table: int) -> list[dict]:
        return self.tables[table]["rows"]

    def errata(self, table: int) -> list[dict]:
        """Documented corrections: cells of the printed table that the
        derivation contradicts, with the derived value and the reason."""
        return self.tables[table].get("errata", [])

    def row(self, table: int, key: str, value) -> dict:
        for r in self.rows(table):
            if r.get(key) == value:
                return r
        raise KeyError(f"table {table} has no row with {key}={value!r}")


# ---------------------------------------------------------------- formulas

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod}


def eval_formula(expr: str, env: dict[str, int]) -> int:
    """Evaluate an integer arithmetic expression over the names in ``env``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise DatasetError(f"unknown name {node.id!r} in formula {expr!r}")
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise DatasetError(f"unsupported syntax in formula {expr!r}")

    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise DatasetError(f"cannot parse formula {expr!r}") from exc
    return ev(tree)


# ---------------------------------------------------------------- validation

def _check_lattice(cell: Any, where: str) -> None:
    if cell is None or cell == "MW":
        return
    if not isinstance(cell, dict) or "lat" not in cell or "tors" not in cell:
        raise DatasetError(f"{where}: expected {{lat, tors}}, got {cell!r}")
    try:
        lat.lattice(cell["lat"], cell["tors"])
    except (lat.LatticeError, ValueError) as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def _check_spec(text: str, where: str) -> None:
    try:
        lat.gram_of(text)
    except (lat.LatticeError, ValueError) as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def _check_config(text: str, where: str, strict: bool = True) -> None:
    try:
        parse_config(text, strict=strict)
    except FiberError as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def _check_fiber(text: str, where: str) -> None:
    try:
        parse_fiber(text)
    except FiberError as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def _validate(tid: int, doc: dict) -> None:
    if doc.get("table") != tid:
        raise DatasetError(f"table {tid}: file declares table {doc.get('table')!r}")
    rows = doc.get("rows")
    if not isinstance(rows, list) or not rows:
        raise DatasetError(f"table {tid}: no rows")
    for i, r in enumerate(rows, 1):
        at = f"table {tid} row {i}"
        for col in doc.get("columns", []):
            if col not in r and not (tid == 9 and col == "G_printed") and not (tid == 7 and col == "G_printed"):
                raise DatasetError(f"{at} column {col}: missing")
        if tid == 3:
            for j, f in enumerate(r["f0"]):
                _check_fiber(f, f"{at} column f0[{j}]")
        elif tid == 2:
            env = {"m": 2, "chi": 2}
            for name, e in r["aux"].items():
                env[name] = eval_formula(e, env)
            eval_formula(r["formula"], env)
        elif tid == 4:
            _check_fiber(r["quotient"]["f0"], f"{at} column quotient.f0")
            _check_fiber(r["total"]["f0"], f"{at} column total.f0")
            _check_lattice(r["quotient"], f"{at} column quotient")
            _check_lattice(r["total"], f"{at} column total")
            _check_spec(r["total"]["T"], f"{at} column total.T")
            _check_config(r["quotient_config"], f"{at} column quotient_config")
        elif tid == 5:
            _check_lattice(r["ker"], f"{at} column ker")
            _check_lattice(r["ker_d1"], f"{at} column ker_d1")
        elif tid == 6:
            _check_config(r["config"], f"{at} column config")
            _check_spec(r["T"], f"{at} column T")
            _check_lattice(r["MW"], f"{at} column MW")
        elif tid == 7:
            for j, c in enumerate(r["configs"]):
                _check_config(c, f"{at} column configs[{j}]", strict=False)
        elif tid == 8:
            _check_config(r["config"], f"{at} column config")
            _check_spec(r["T"], f"{at} column T")
            for col in ("MW", "MW_alpha", "ker", "ker_d1"):
                _check_lattice(r[col], f"{at} column {col}")
        elif tid == 9:
            for j, stratum in enumerate(r["strata"]):
                for k, c in enumerate(stratum):
                    _check_config(c, f"{at} column strata[{j}][{k}]", strict=False)
        elif tid == 10:
            for j, line in enumerate(r["lines"]):
                for col in ("m", "h", "cases"):
                    if col not in line:
                        raise DatasetError(f"{at} line {j + 1} column {col}: missing")


def _validate_errata(tid: int, doc: dict) -> None:
    keys = {8: ("row", "column", "derived", "reason"), 10: ("G", "line", "column", "derived", "reason")}
    errata = doc.get("errata", [])
    if errata and tid not in keys:
        raise DatasetError(f"table {tid}: errata are only recorded for tables 8 and 10")
    for i, e in enumerate(errata, 1):
        for k in keys.get(tid, ()):
            if k not in e:
                raise DatasetError(f"table {tid} erratum {i} column {k}: missing")
        if tid == 8:
            _check_lattice(e["derived"], f"table 8 erratum {i} column derived")


def _canonical(tables: dict[int, dict]) -> bytes:
    return json.dumps({str(k): tables[k] for k in sorted(tables)}, sort_keys=True,
                      separators=(",", ":"), ensure_ascii=True).encode("ascii")


def _read_dir(path: Path | None):
    out = {}
    for tid in TABLE_IDS:
        name = f"table{tid}.json"
        if path is None:
            text = resources.files("cyqc").joinpath("data", name).read_text(encoding="utf-8")
        else:
            f = path / name
            if not f.exists():
                raise DatasetError(f"table {tid}: {f} not found")
            text = f.read_text(encoding="utf-8")
        try:
            out[tid] = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"table {tid}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return out


_CACHE: dict[str, Dataset] = {}


def load_dataset(path: str | os.PathLike | None = None) -> Dataset:
    """Load and validate the tables; ``path`` or ``$CYQC_DATASET`` overrides
    the embedded copy."""
    if path is None:
        path = os.environ.get("CYQC_DATASET") or None
    key = str(Path(path).resolve()) if path is not None else "<embedded>"
    if key in _CACHE:
        return _CACHE[key]
    tables = _read_dir(Path(path) if path is not None else None)
    for tid, doc in tables.items():
        _validate(tid, doc)
        _validate_errata(tid, doc)
    digest = hashlib.sha256(_canonical(tables)).hexdigest()
    ds = Dataset(tables, VERSION, digest, key)
    _CACHE[key] = ds
    return ds


def dump_table(ds: Dataset, tid: int) -> str:
    """Deterministic JSON text of one table."""
    return json.dumps(ds.tables[tid], sort_keys=True, indent=1, ensure_ascii=True)


__all__ = ["Dataset", "DatasetError", "TABLE_IDS", "VERSION", "dump_table", "eval_formula", "load_dataset"]
