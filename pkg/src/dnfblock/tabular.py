"""Canonical in-memory model for heterogeneous tabular datasets.

A Dataset is a named schema plus records. Cells are raw strings with set
semantics: members are separated by the reserved ";" delimiter and the
literal "null" (any case) denotes the empty set. Cells are stored exactly
as loaded; trimming happens only when a cell is expanded to its value set.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ArgumentError, ParseError, ValidationError

FieldId = str

VALUE_DELIMITER = ";"
NULL_MARKER = "null"


def is_null(cell: str) -> bool:
    """True when the cell is the reserved empty-set marker."""
    return cell.strip().lower() == NULL_MARKER


def split_value_set(cell: str) -> set[str]:
    """Expand one raw cell into its value set.

    Splits on ";", trims each member, drops empty members. "null"
    (case-insensitive) yields the empty set. There is no escape
    mechanism: a literal ";" cannot occur inside a member.
    """
    if is_null(cell):
        return set()
    members = set()
    for part in cell.split(VALUE_DELIMITER):
        part = part.strip()
        if part:
            members.add(part)
    return members


@dataclass(frozen=True)
class Schema:
    """Ordered field names for one dataset."""

    dataset_name: str
    fields: tuple[FieldId, ...]

    def __post_init__(self) -> None:
        if not self.fields:
            raise ValidationError(f"schema {self.dataset_name!r} has no fields")
        seen = set()
        for f in self.fields:
            if not f:
                raise ValidationError(f"schema {self.dataset_name!r} has an empty field name")
            if f in seen:
                raise ValidationError(f"schema {self.dataset_name!r} repeats field {f!r}")
            seen.add(f)

    def index_of(self, field_id: FieldId) -> int:
        try:
            return self.fields.index(field_id)
        except ValueError:
            raise ArgumentError(
                f"field {field_id!r} not in schema {self.dataset_name!r}"
            ) from None


@dataclass(frozen=True)
class Record:
    """One row: a stable id plus one raw string per schema field."""

    record_id: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    records: tuple[Record, ...]

    def __post_init__(self) -> None:
        violations = validate(self)
        if violations:
            raise ValidationError("; ".join(violations))

    @property
    def name(self) -> str:
        return self.schema.dataset_name

    def record_by_id(self, record_id: str) -> Record:
        by_id = _id_index(self)
        try:
            return by_id[record_id]
        except KeyError:
            raise ArgumentError(
                f"record id {record_id!r} not in dataset {self.name!r}"
            ) from None

    def has_record(self, record_id: str) -> bool:
        return record_id in _id_index(self)


# Dataset is frozen, so the id index is cached per instance id on the side.
_ID_INDEX_CACHE: dict[int, tuple[Dataset, dict[str, Record]]] = {}


def _id_index(dataset: Dataset) -> dict[str, Record]:
    cached = _ID_INDEX_CACHE.get(id(dataset))
    if cached is not None and cached[0] is dataset:
        return cached[1]
    index = {rec.record_id: rec for rec in dataset.records}
    _ID_INDEX_CACHE[id(dataset)] = (dataset, index)
    return index


def field_value_set(record: Record, field_id: FieldId, schema: Schema) -> set[str]:
    """Value set of one field of one record (see split_value_set)."""
    return split_value_set(record.values[schema.index_of(field_id)])


def validate(dataset: Dataset) -> list[str]:
    """Structural invariant check; returns human-readable violations."""
    violations = []
    width = len(dataset.schema.fields)
    seen: set[str] = set()
    for rec in dataset.records:
        if rec.record_id in seen:
            violations.append(f"duplicate record id {rec.record_id!r}")
        seen.add(rec.record_id)
        if len(rec.values) != width:
            violations.append(
                f"record {rec.record_id!r} has {len(rec.values)} values, schema has {width} fields"
            )
    return violations


@dataclass(frozen=True)
class CsvConfig:
    """Options for delimited load/save."""

    delimiter: str = ","
    header: bool = True
    id_column: str | None = None
    dataset_name: str | None = None


def load_csv(path: str | Path, config: CsvConfig = CsvConfig()) -> Dataset:
    """Load a delimited file into a Dataset.

    With a header, fields come from the header row; otherwise names are
    generated as f0..fn from the first row's width. record_id is the
    configured id column when set (that column is removed from the
    schema), else the zero-based data-row index as a string.
    """
    path = Path(path)
    if not path.exists():
        raise ArgumentError(f"no such file: {path}")
    name = config.dataset_name if config.dataset_name is not None else path.stem
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=config.delimiter)
        rows = iter(reader)
        id_index: int | None = None
        if config.header:
            try:
                header = next(rows)
            except StopIteration:
                raise ParseError(f"{path}: empty file, expected a header row") from None
            columns = [c.strip() for c in header]
            if config.id_column is not None:
                if config.id_column not in columns:
                    raise ArgumentError(
                        f"{path}: id column {config.id_column!r} not in header {columns}"
                    )
                id_index = columns.index(config.id_column)
                fields = tuple(c for i, c in enumerate(columns) if i != id_index)
            else:
                fields = tuple(columns)
            width = len(columns)
        else:
            if config.id_column is not None:
                raise ArgumentError("id_column requires a header row")
            first = next(rows, None)
            if first is None:
                raise ParseError(f"{path}: empty file and no header to infer fields from")
            width = len(first)
            fields = tuple(f"f{i}" for i in range(width))
            rows = iter([first] + list(rows))
        if not fields:
            raise ParseError(f"{path}: header defines no data fields")
        schema = Schema(dataset_name=name, fields=fields)
        records = []
        for row_ordinal, row in enumerate(rows):
            if len(row) != width:
                raise ParseError(
                    f"{path} line {reader.line_num}: expected {width} fields, got {len(row)}"
                )
            if id_index is None:
                rec_id = str(row_ordinal)
                values = tuple(row)
            else:
                rec_id = row[id_index]
                values = tuple(v for i, v in enumerate(row) if i != id_index)
            records.append(Record(record_id=rec_id, values=values))
    try:
        return Dataset(schema=schema, records=tuple(records))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def save_csv(dataset: Dataset, path: str | Path, config: CsvConfig = CsvConfig()) -> None:
    """Inverse of load_csv for the same config (round-trip exact)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=config.delimiter, lineterminator="\n")
        id_col = config.id_column
        if config.header:
            if id_col is not None:
                writer.writerow([id_col, *dataset.schema.fields])
            else:
                writer.writerow(list(dataset.schema.fields))
        for rec in dataset.records:
            if id_col is not None:
                writer.writerow([rec.record_id, *rec.values])
            else:
                writer.writerow(list(rec.values))


@dataclass(frozen=True)
class Mapping:
    """A pair of field subsets linking two schemas (n:m in general)."""

    left_fields: frozenset[FieldId]
    right_fields: frozenset[FieldId]
    score: float = 0.0

    def __post_init__(self) -> None:
        if not self.left_fields or not self.right_fields:
            raise ValidationError("mapping sides must be non-empty")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"mapping score {self.score} outside [0, 1]")

    @property
    def is_one_to_one(self) -> bool:
        return len(self.left_fields) == 1 and len(self.right_fields) == 1

    def sorted_left(self) -> list[FieldId]:
        return sorted(self.left_fields)

    def sorted_right(self) -> list[FieldId]:
        return sorted(self.right_fields)


def save_mappings(mappings: list[Mapping], path: str | Path) -> None:
    """Write a mapping set as a JSON array of {left, right, score}."""
    payload = [
        {"left": m.sorted_left(), "right": m.sorted_right(), "score": m.score}
        for m in mappings
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_mappings(path: str | Path) -> list[Mapping]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise ArgumentError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} line {exc.lineno}: {exc.msg}") from None
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a JSON array of mappings")
    mappings = []
    for i, entry in enumerate(payload):
        if not isinstance(entry, dict) or "left" not in entry or "right" not in entry:
            raise ParseError(f"{path}: mapping {i} must be an object with left/right arrays")
        left = entry["left"]
        right = entry["right"]
        if not isinstance(left, list) or not isinstance(right, list):
            raise ParseError(f"{path}: mapping {i} left/right must be arrays")
        score = entry.get("score", 0.0)
        if not isinstance(score, (int, float)):
            raise ParseError(f"{path}: mapping {i} score must be a number")
        try:
            mappings.append(
                Mapping(
                    left_fields=frozenset(str(f) for f in left),
                    right_fields=frozenset(str(f) for f in right),
                    score=float(score),
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}: mapping {i}: {exc}") from None
    return mappings


@dataclass(frozen=True)
class GroundTruth:
    """Known duplicate id pairs (left dataset id, right dataset id)."""

    duplicate_pairs: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.duplicate_pairs)


GROUND_TRUTH_HEADER = ("left_id", "right_id")


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Load a two-column ground-truth CSV; the header row is required."""
    path = Path(path)
    if not path.exists():
        raise ArgumentError(f"no such file: {path}")
    pairs = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header left_id,right_id") from None
        if tuple(c.strip() for c in header) != GROUND_TRUTH_HEADER:
            raise ParseError(
                f"{path}: expected header left_id,right_id, got {','.join(header)!r}"
            )
        for row in reader:
            if len(row) != 2:
                raise ParseError(
                    f"{path} line {reader.line_num}: expected 2 fields, got {len(row)}"
                )
            pairs.add((row[0], row[1]))
    return GroundTruth(duplicate_pairs=frozenset(pairs))


def save_ground_truth(truth: GroundTruth, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GROUND_TRUTH_HEADER)
        for left, right in sorted(truth.duplicate_pairs):
            writer.writerow([left, right])


def check_ground_truth(truth: GroundTruth, left: Dataset, right: Dataset) -> list[str]:
    """Violations for ids that do not resolve to a record on their side."""
    violations = []
    for left_id, right_id in sorted(truth.duplicate_pairs):
        if not left.has_record(left_id):
            violations.append(f"left id {left_id!r} not in dataset {left.name!r}")
        if not right.has_record(right_id):
            violations.append(f"right id {right_id!r} not in dataset {right.name!r}")
    return violations
