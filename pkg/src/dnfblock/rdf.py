"""Conversion between RDF triple sets and logical property tables, plus a
parser and serializer for a small N-Triples subset.

The property-table encoding is information-preserving: multi-valued
(subject, property) pairs become ";"-joined cells, absent pairs become
"null". Because ";" and "null" carry meaning in cells, object values that
would collide with them are rejected up front instead of being corrupted
silently on the way back.

Names vs URIs: the parser reduces every URI to its local name (the part
after the last "#" or "/"). Two URIs sharing a local name therefore merge;
this is a documented limitation, not detected. The serializer writes
subjects and properties as <name> and objects as quoted literals, so the
parse(serialize(ts)) == ts round trip holds exactly for name-form triple
sets (names free of "#", "/", "<", ">" and quotes).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ArgumentError, DataError, ParseError, ValidationError
from .tabular import Dataset, Record, Schema, is_null

SUBJECT_FIELD = "subject"


@dataclass(frozen=True, order=True)
class Triple:
    subject: str
    property: str
    object: str

    def __post_init__(self) -> None:
        if not self.subject or not self.property or not self.object:
            raise ValidationError(f"triple components must be non-empty: {self!r}")


TripleSet = frozenset  # frozenset[Triple]


def triple_set(triples) -> frozenset[Triple]:
    """Build a TripleSet from any iterable; duplicates collapse."""
    return frozenset(triples)


def triples_to_property_table(ts: frozenset[Triple], name: str = "property_table") -> Dataset:
    """Forward conversion: triple set to property table.

    Two passes over the sorted triples. Pass one fixes the schema
    (subject column, then properties in first-encounter order) and the
    record order (subjects in first-encounter order). Pass two fills
    cells: the ";"-join of the sorted object values for that
    (subject, property), or "null" when there are none.
    """
    ordered = sorted(ts)
    properties: list[str] = []
    seen_props = set()
    subjects: list[str] = []
    seen_subjects = set()
    for t in ordered:
        if t.property == SUBJECT_FIELD:
            raise DataError(
                f"property named {SUBJECT_FIELD!r} is reserved for the table's subject column"
            )
        if is_null(t.object):
            raise DataError(
                f"object {t.object!r} of ({t.subject}, {t.property}) collides with the null marker"
            )
        if ";" in t.object:
            raise DataError(
                f"object {t.object!r} of ({t.subject}, {t.property}) contains the reserved ';' delimiter"
            )
        if t.property not in seen_props:
            seen_props.add(t.property)
            properties.append(t.property)
        if t.subject not in seen_subjects:
            seen_subjects.add(t.subject)
            subjects.append(t.subject)
    cells: dict[tuple[str, str], list[str]] = {}
    for t in ordered:
        cells.setdefault((t.subject, t.property), []).append(t.object)
    schema = Schema(dataset_name=name, fields=(SUBJECT_FIELD, *properties))
    records = []
    for subj in subjects:
        row = [subj]
        for prop in properties:
            objs = cells.get((subj, prop))
            row.append(";".join(sorted(objs)) if objs else "null")
        records.append(Record(record_id=subj, values=tuple(row)))
    return Dataset(schema=schema, records=tuple(records))


def property_table_to_triples(pt: Dataset) -> frozenset[Triple]:
    """Inverse conversion: property table back to the triple set.

    For every record and every non-subject column whose cell is not
    "null", each ";"-separated token becomes one triple. Empty tokens
    are skipped so a stray delimiter cannot produce an invalid triple.
    """
    if not pt.schema.fields or pt.schema.fields[0] != SUBJECT_FIELD:
        raise ValidationError(
            f"property table's first field must be {SUBJECT_FIELD!r}, got {pt.schema.fields[:1]}"
        )
    properties = pt.schema.fields[1:]
    out = set()
    for rec in pt.records:
        subj = rec.values[0]
        for prop, cell in zip(properties, rec.values[1:]):
            if is_null(cell):
                continue
            for token in cell.split(";"):
                if token:
                    out.add(Triple(subject=subj, property=prop, object=token))
    return frozenset(out)


_URI_RE = r"<([^<>]*)>"
_LITERAL_RE = r'"((?:[^"\\]|\\.)*)"'
_LINE_RE = re.compile(
    rf"^\s*{_URI_RE}\s+{_URI_RE}\s+(?:{_URI_RE}|{_LITERAL_RE})\s*\.\s*$"
)

_UNESCAPE = {"\\\\": "\\", '\\"': '"', "\\n": "\n", "\\r": "\r", "\\t": "\t"}
_ESCAPE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _local_name(uri: str, path: Path, line_num: int) -> str:
    cut = max(uri.rfind("#"), uri.rfind("/"))
    name = uri[cut + 1 :]
    if not name:
        raise ParseError(f"{path} line {line_num}: URI <{uri}> has an empty local name")
    return name


def _unescape_literal(raw: str, path: Path, line_num: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\":
            pair = raw[i : i + 2]
            if pair not in _UNESCAPE:
                raise ParseError(f"{path} line {line_num}: unsupported escape {pair!r}")
            out.append(_UNESCAPE[pair])
            i += 2
        else:
            out.append(raw[i])
            i += 1
    return "".join(out)


def parse_ntriples(path: str | Path) -> frozenset[Triple]:
    """Parse the supported N-Triples subset.

    One `<s> <p> (<o>|"literal") .` statement per line; blank lines and
    full-line `#` comments are skipped. URIs reduce to local names,
    literals unescape the \\\\ \\" \\n \\r \\t subset, duplicate
    statements collapse.
    """
    path = Path(path)
    if not path.exists():
        raise ArgumentError(f"no such file: {path}")
    triples = set()
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            m = _LINE_RE.match(line)
            if m is None:
                raise ParseError(f"{path} line {line_num}: not a supported N-Triples statement")
            subj_uri, prop_uri, obj_uri, obj_lit = m.groups()
            subject = _local_name(subj_uri, path, line_num)
            prop = _local_name(prop_uri, path, line_num)
            if obj_uri is not None:
                obj = _local_name(obj_uri, path, line_num)
            else:
                obj = _unescape_literal(obj_lit, path, line_num)
            if not obj:
                raise ParseError(f"{path} line {line_num}: empty object literal")
            triples.add(Triple(subject=subject, property=prop, object=obj))
    return frozenset(triples)


def _escape_literal(value: str) -> str:
    return "".join(_ESCAPE.get(ch, ch) for ch in value)


def _check_name_form(value: str, role: str) -> None:
    bad = set('<>#/"') | {"\n", "\r", "\t"}
    if any(ch in bad for ch in value):
        raise DataError(
            f"{role} {value!r} is not in name form (contains one of < > # / \" or control whitespace); "
            f"it would not survive the parse round trip"
        )


def serialize_ntriples(ts: frozenset[Triple], path: str | Path) -> None:
    """Write a triple set as sorted N-Triples lines.

    Subjects and properties are written as <name> and must be in name
    form; objects are always written as quoted literals, so any object
    text round trips. parse_ntriples(serialize_ntriples(ts)) == ts.
    """
    lines = []
    for t in sorted(ts):
        _check_name_form(t.subject, "subject")
        _check_name_form(t.property, "property")
        lines.append(f'<{t.subject}> <{t.property}> "{_escape_literal(t.object)}" .\n')
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
