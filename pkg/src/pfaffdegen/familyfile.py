"""Reading and validating family descriptor files (JSON, schema version 1)."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .pfaffian import (
    GENERAL,
    FamilyDescriptor,
    FamilyError,
    WeightedProjectiveAmbient,
    WeightedSkewMatrix,
    DegreeTableError,
)

SCHEMA_VERSION = 1
SHIPPED = ("x5", "x7", "x10", "x13", "x25")
REQUIRED = ("schema_version", "name", "coordinates", "ambient_weights", "blocks", "cutting_degrees")


class FamilyFileError(ValueError):
    pass


def as_int(x, where: str) -> int:
    """Integers arrive either as JSON numbers or as decimal strings."""
    if isinstance(x, bool):
        raise FamilyFileError(f"{where}: expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x, 10)
        except ValueError:
            pass
    raise FamilyFileError(f"{where}: expected an integer, got {x!r}")


def _int_list(xs, where):
    if not isinstance(xs, list):
        raise FamilyFileError(f"{where}: expected a list")
    return tuple(as_int(x, f"{where}[{i}]") for i, x in enumerate(xs))


def _int_rows(xss, where):
    if not isinstance(xss, list):
        raise FamilyFileError(f"{where}: expected a list of lists")
    return tuple(_int_list(r, f"{where}[{i}]") for i, r in enumerate(xss))


def _block(b, where) -> WeightedSkewMatrix:
    if not isinstance(b, dict) or "degrees" not in b or "entries" not in b:
        raise FamilyFileError(f"{where}: block needs 'degrees' and 'entries'")
    degrees = _int_rows(b["degrees"], f"{where}.degrees")
    entries = b["entries"]
    shape = [4, 3, 2, 1]
    if [len(r) for r in degrees] != shape or not isinstance(entries, list) or [len(r) for r in entries] != shape:
        raise FamilyFileError(f"{where}: degrees and entries must be upper-triangular rows of lengths 4,3,2,1")
    if any(d < 0 for r in degrees for d in r):
        raise FamilyFileError(f"{where}: negative degree")
    general = [tuple(_int_list(p, f"{where}.general")) for p in b.get("general", [])]
    corners = [tuple(_int_list(p, f"{where}.corners")) for p in b.get("corners", [[1, 2], [4, 5]])]
    try:
        return WeightedSkewMatrix.from_rows(degrees, entries, general, corners)
    except (FamilyError, DegreeTableError) as e:
        raise FamilyFileError(f"{where}: {e}") from None


def parse_family(doc: dict, source: str = "<family>") -> FamilyDescriptor:
    if not isinstance(doc, dict):
        raise FamilyFileError(f"{source}: top level must be an object")
    missing = [k for k in REQUIRED if k not in doc]
    if missing:
        raise FamilyFileError(f"{source}: missing keys {', '.join(missing)}")
    if as_int(doc["schema_version"], "schema_version") != SCHEMA_VERSION:
        raise FamilyFileError(f"{source}: unsupported schema_version {doc['schema_version']!r}")
    name = doc["name"]
    blocks = tuple(_block(b, f"{source}: blocks[{i}]") for i, b in enumerate(doc["blocks"]))
    if len(blocks) not in (1, 2):
        raise FamilyFileError(f"{source}: expected one or two blocks")
    try:
        ambient = WeightedProjectiveAmbient(tuple(doc["coordinates"]), _int_list(doc["ambient_weights"], "ambient_weights"))
    except FamilyError as e:
        raise FamilyFileError(f"{source}: {e}") from None

    rays = _int_rows(doc["rays"], "rays") if doc.get("rays") is not None else None
    partition = None
    if doc.get("J_partition") is not None:
        partition = tuple(tuple(j - 1 for j in _int_list(g, "J_partition")) for g in doc["J_partition"])
    specs = _int_rows(doc.get("specialization_relations", []), "specialization_relations")
    if rays is not None and len({len(r) for r in rays}) > 1:
        raise FamilyFileError(f"{source}: rays have different lengths")

    expected = dict(doc.get("expected", {}))
    if "hilbert_basis" in expected:
        expected["hilbert_basis"] = _int_rows(expected["hilbert_basis"], "expected.hilbert_basis")
    for key in ("picard_rank", "class_group_rank", "operator_order"):
        if key in expected:
            expected[key] = as_int(expected[key], f"expected.{key}")
    try:
        return FamilyDescriptor(
            name=name,
            blocks=blocks,
            ambient=ambient,
            cutting_degrees=_int_list(doc["cutting_degrees"], "cutting_degrees"),
            rays=rays,
            j_partition=partition,
            specialization_relations=specs,
            expected=expected,
            derived=bool(doc.get("derived", False)),
        )
    except FamilyError as e:
        raise FamilyFileError(f"{source}: {e}") from None


def load_family(path) -> FamilyDescriptor:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise FamilyFileError(f"{path}: {e}") from None
    return parse_family(doc, str(path))


def shipped_data_dir() -> Path:
    return Path(str(resources.files("pfaffdegen") / "data"))


def shipped_family(key: str) -> FamilyDescriptor:
    return load_family(shipped_data_dir() / f"{key.lower()}.json")


def family_paths(directory) -> list[Path]:
    return sorted(Path(directory).glob("*.json"))


def has_general_entries(f: FamilyDescriptor) -> bool:
    return any(b.kind(p) == GENERAL for b in f.blocks for p in b.degrees)
