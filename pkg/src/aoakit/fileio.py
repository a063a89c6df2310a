"""Plain-text array and encoding files, plus the JSON-sidecar catalog.

Array file (bit-exact): line 1 is ``N k s``; lines 2..N+1 hold k integers in
1..s separated by single spaces; optional ``# key: value`` metadata lines
follow the body; LF line endings.  Encoding file: line 1 is
``kind s k [param]``, line 2 the generator in ``levels|columns`` cycle
notation, then core rows, then rows prefixed ``fixed:``.

A catalog is a directory of array files with one JSON sidecar each carrying
the parameters, provenance, a recomputable metrics snapshot (exact values
stored as strings), and the seed/config needed to reproduce the array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arrays import Array, is_oa, tolerance, unbalance
from .discrepancy import cd, md, wd
from .metrics import d1, d2, d_value, default_contrast
from .symmetry import SymmetricEncoding, format_generator, parse_generator

__all__ = [
    "ParseError",
    "parse_array",
    "serialize_array",
    "read_array",
    "write_array",
    "parse_encoding",
    "serialize_encoding",
    "read_encoding",
    "write_encoding",
    "format_exact",
    "metrics_snapshot",
    "CatalogEntry",
    "CatalogReport",
    "catalog_add",
    "catalog_list",
    "catalog_recheck",
]


class ParseError(Exception):
    """Malformed file content, located by 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1, path: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = f"{path or '<text>'}:{line}:{column}"
        super().__init__(f"{where}: {message}")


def _int_fields(line: str, lineno: int, path: str | None) -> list[tuple[int, int]]:
    """(value, 1-based column) per whitespace-separated field."""
    out = []
    col = 0
    for part in line.split(" "):
        col += 1
        if part:
            try:
                out.append((int(part), col))
            except ValueError:
                raise ParseError(f"expected an integer, got {part!r}", lineno, col, path)
        col += len(part)
    return out


def parse_array(text: str, path: str | None = None) -> tuple[Array, dict[str, str]]:
    """Parse an array file; returns the array and its metadata mapping."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file", 1, 1, path)
    header = _int_fields(lines[0], 1, path)
    if len(header) != 3:
        raise ParseError("header must be 'N k s'", 1, 1, path)
    (n, _), (k, _), (s, _) = header
    if n < 1 or k < 1 or s < 1:
        raise ParseError("N, k, s must be positive", 1, 1, path)
    if len(lines) < 1 + n:
        raise ParseError(f"expected {n} rows, found {len(lines) - 1}", len(lines), 1, path)
    cells = np.zeros((n, k), dtype=np.int64)
    for r in range(n):
        lineno = 2 + r
        fields = _int_fields(lines[lineno - 1], lineno, path)
        if len(fields) != k:
            raise ParseError(f"expected {k} values, found {len(fields)}", lineno, 1, path)
        for c, (value, col) in enumerate(fields):
            if not 1 <= value <= s:
                raise ParseError(f"value {value} outside 1..{s}", lineno, col, path)
            cells[r, c] = value
    metadata: dict[str, str] = {}
    for offset, line in enumerate(lines[1 + n :], start=2 + n):
        if not line.strip():
            continue
        if not line.startswith("#"):
            raise ParseError("trailing lines must be '# key: value' metadata", offset, 1, path)
        body = line[1:].strip()
        if ":" not in body:
            raise ParseError("metadata line lacks 'key: value'", offset, 1, path)
        key, value = body.split(":", 1)
        metadata[key.strip()] = value.strip()
    return Array(cells, s), metadata


def serialize_array(a: Array, metadata: dict[str, str] | None = None) -> str:
    lines = [f"{a.n_runs} {a.n_factors} {a.n_levels}"]
    lines.extend(" ".join(str(v) for v in row) for row in a.cells)
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + "\n"


def read_array(path) -> tuple[Array, dict[str, str]]:
    return parse_array(Path(path).read_text(encoding="ascii"), path=str(path))


def write_array(path, a: Array, metadata: dict[str, str] | None = None) -> None:
    Path(path).write_text(serialize_array(a, metadata), encoding="ascii", newline="")


def parse_encoding(text: str, path: str | None = None) -> SymmetricEncoding:
    """Parse an encoding file into a validated SymmetricEncoding."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise ParseError("encoding needs a header, a generator, and rows", 1, 1, path)
    head = lines[0].split()
    if len(head) not in (3, 4):
        raise ParseError("header must be 'kind s k [param]'", 1, 1, path)
    kind = head[0]
    try:
        s, k = int(head[1]), int(head[2])
        param = int(head[3]) if len(head) == 4 else None
    except ValueError:
        raise ParseError("s, k and param must be integers", 1, 1, path)
    try:
        generator = parse_generator(lines[1], s, k)
    except ValueError as exc:
        raise ParseError(str(exc), 2, 1, path)
    core: list[tuple[int, ...]] = []
    fixed: list[tuple[int, ...]] = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        target, body = (fixed, line[len("fixed:") :]) if line.startswith("fixed:") else (core, line)
        fields = _int_fields(body.strip(), lineno, path)
        if len(fields) != k:
            raise ParseError(f"expected {k} values, found {len(fields)}", lineno, 1, path)
        target.append(tuple(v for v, _ in fields))
    try:
        return SymmetricEncoding(
            kind=kind,
            n_levels=s,
            n_factors=k,
            generator=generator,
            core=tuple(core),
            fixed_rows=tuple(fixed),
            param=param,
        )
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1, path)


def serialize_encoding(e: SymmetricEncoding) -> str:
    head = f"{e.kind} {e.n_levels} {e.n_factors}"
    if e.param is not None:
        head += f" {e.param}"
    lines = [head, format_generator(e.generator)]
    lines.extend(" ".join(str(v) for v in row) for row in e.core)
    lines.extend("fixed: " + " ".join(str(v) for v in row) for row in e.fixed_rows)
    return "\n".join(lines) + "\n"


def read_encoding(path) -> SymmetricEncoding:
    return parse_encoding(Path(path).read_text(encoding="ascii"), path=str(path))


def write_encoding(path, e: SymmetricEncoding) -> None:
    Path(path).write_text(serialize_encoding(e), encoding="ascii", newline="")


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

_FORMAT_VERSION = 1


def format_exact(value) -> str:
    """Deterministic string form: ints and Fractions verbatim, floats via repr."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def metrics_snapshot(a: Array) -> dict[str, str]:
    """The recomputable snapshot stored with every catalog entry."""
    f = default_contrast(a.n_levels)
    return {
        "is_oa2": format_exact(int(a.n_factors >= 2 and is_oa(a, 2))),
        "tol2": format_exact(tolerance(a, 2)),
        "unb1": format_exact(unbalance(a, 2, 1)),
        "unb2": format_exact(unbalance(a, 2, 2)),
        "d1": format_exact(d1(a)),
        "d2": format_exact(d2(a)),
        "d_f": format_exact(d_value(a, f)),
        "cd": format_exact(cd(a)),
        "wd": format_exact(wd(a)),
        "md": format_exact(md(a)),
    }


@dataclass
class CatalogEntry:
    """One catalogued array: parameters, provenance, snapshot, and config."""

    name: str
    n_runs: int
    n_factors: int
    n_levels: int
    provenance: str
    metrics: dict[str, str]
    config: dict = field(default_factory=dict)

    @property
    def lam(self) -> int | None:
        s2 = self.n_levels**2
        return self.n_runs // s2 if self.n_runs % s2 == 0 else None

    def to_json(self) -> str:
        doc = {
            "format_version": _FORMAT_VERSION,
            "name": self.name,
            "parameters": {
                "N": self.n_runs,
                "k": self.n_factors,
                "s": self.n_levels,
                "lam": self.lam,
            },
            "provenance": self.provenance,
            "metrics": self.metrics,
            "config": self.config,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CatalogEntry":
        doc = json.loads(text)
        if doc.get("format_version") != _FORMAT_VERSION:
            raise ValueError(f"unsupported catalog format {doc.get('format_version')!r}")
        params = doc["parameters"]
        return cls(
            name=doc["name"],
            n_runs=params["N"],
            n_factors=params["k"],
            n_levels=params["s"],
            provenance=doc["provenance"],
            metrics=doc["metrics"],
            config=doc.get("config", {}),
        )


_PROVENANCES = ("construction", "search", "ip", "imported")


def catalog_add(
    directory,
    a: Array,
    name: str,
    provenance: str = "imported",
    config: dict | None = None,
) -> CatalogEntry:
    """Store the array file plus a sidecar with its metrics snapshot."""
    if provenance not in _PROVENANCES:
        raise ValueError(f"provenance must be one of {_PROVENANCES}")
    if not name or "/" in name or name.startswith("."):
        raise ValueError(f"bad entry name {name!r}")
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"catalog directory {directory} does not exist")
    entry = CatalogEntry(
        name=name,
        n_runs=a.n_runs,
        n_factors=a.n_factors,
        n_levels=a.n_levels,
        provenance=provenance,
        metrics=metrics_snapshot(a),
        config=config or {},
    )
    write_array(directory / f"{name}.txt", a)
    (directory / f"{name}.json").write_text(entry.to_json(), encoding="ascii", newline="")
    return entry


def catalog_list(
    directory, s: int | None = None, k: int | None = None, n: int | None = None
) -> list[CatalogEntry]:
    """All entries sorted by name, optionally filtered by parameters.

    Corrupt sidecars raise rather than being skipped.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"catalog directory {directory} does not exist")
    entries = []
    for sidecar in sorted(directory.glob("*.json")):
        try:
            entry = CatalogEntry.from_json(sidecar.read_text(encoding="ascii"))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"corrupt catalog entry {sidecar.name}: {exc}") from exc
        if s is not None and entry.n_levels != s:
            continue
        if k is not None and entry.n_factors != k:
            continue
        if n is not None and entry.n_runs != n:
            continue
        entries.append(entry)
    return entries


@dataclass
class CatalogReport:
    """Outcome of a recheck: snapshot mismatches and unreadable entries."""

    checked: int
    mismatches: list[tuple[str, str, str, str]]  # (name, key, stored, recomputed)
    corrupt: list[tuple[str, str]]  # (name, error)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.corrupt


def catalog_recheck(directory) -> CatalogReport:
    """Recompute every snapshot from its array file and compare field by field."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"catalog directory {directory} does not exist")
    checked = 0
    mismatches: list[tuple[str, str, str, str]] = []
    corrupt: list[tuple[str, str]] = []
    for sidecar in sorted(directory.glob("*.json")):
        name = sidecar.stem
        try:
            entry = CatalogEntry.from_json(sidecar.read_text(encoding="ascii"))
            a, _ = read_array(directory / f"{name}.txt")
        except (ValueError, KeyError, OSError, ParseError) as exc:
            corrupt.append((name, str(exc)))
            continue
        checked += 1
        if (a.n_runs, a.n_factors, a.n_levels) != (entry.n_runs, entry.n_factors, entry.n_levels):
            mismatches.append(
                (name, "parameters", f"{entry.n_runs} {entry.n_factors} {entry.n_levels}",
                 f"{a.n_runs} {a.n_factors} {a.n_levels}")
            )
            continue
        fresh = metrics_snapshot(a)
        for key, value in fresh.items():
            stored = entry.metrics.get(key)
            if stored != value:
                mismatches.append((name, key, str(stored), value))
    return CatalogReport(checked=checked, mismatches=mismatches, corrupt=corrupt)
