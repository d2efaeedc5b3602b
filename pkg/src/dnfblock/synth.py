"""Synthetic person-pair generator for benchmarks and tests.

Generates two datasets over a shared population: the first n_dups
records of each side describe the same people (the right-side copies
optionally noised), the rest are fillers. Ids encode the person index,
so the ground truth is exact by construction. Either side can be
emitted as triples instead of a table, and the right side can split the
name field to exercise n:m mappings.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from pathlib import Path

from .errors import ArgumentError
from .rdf import Triple, TripleSet, serialize_ntriples, triple_set
from .tabular import (
    CsvConfig,
    Dataset,
    GroundTruth,
    Mapping,
    Record,
    Schema,
    save_csv,
    save_ground_truth,
    save_mappings,
    split_value_set,
)

# Generated CSVs carry their record ids in an explicit "id" column;
# load them back with the same config.
GENERATED_CSV_CONFIG = CsvConfig(id_column="id")

_FIRST_NAMES = (
    "james", "mary", "robert", "patricia", "john", "jennifer", "michael",
    "linda", "david", "elizabeth", "william", "barbara", "richard", "susan",
    "joseph", "jessica", "thomas", "sarah", "charles", "karen", "christopher",
    "lisa", "daniel", "nancy", "matthew", "betty", "anthony", "margaret",
    "mark", "sandra", "donald", "ashley", "steven", "kimberly", "paul",
    "emily", "andrew", "donna", "joshua", "michelle", "kenneth", "carol",
    "kevin", "amanda", "brian", "dorothy", "george", "melissa", "timothy",
    "deborah", "ronald", "stephanie", "edward", "rebecca", "jason", "sharon",
    "jeffrey", "laura", "ryan", "cynthia",
)

_LAST_NAMES = (
    "smith", "johnson", "williams", "brown", "jones", "garcia", "miller",
    "davis", "rodriguez", "martinez", "hernandez", "lopez", "gonzalez",
    "wilson", "anderson", "thomas", "taylor", "moore", "jackson", "martin",
    "lee", "perez", "thompson", "white", "harris", "sanchez", "clark",
    "ramirez", "lewis", "robinson", "walker", "young", "allen", "king",
    "wright", "scott", "torres", "nguyen", "hill", "flores", "green",
    "adams", "nelson", "baker", "hall", "rivera", "campbell", "mitchell",
    "carter", "roberts", "gomez", "phillips", "evans", "turner", "diaz",
    "parker", "cruz", "edwards", "collins", "reyes",
)

_STREETS = (
    "oak", "maple", "cedar", "pine", "elm", "walnut", "chestnut", "birch",
    "spruce", "willow", "main", "park", "lake", "hill", "river", "sunset",
    "highland", "forest", "meadow", "spring", "valley", "ridge", "grove",
    "garden", "orchard", "prospect", "franklin", "washington", "jefferson",
    "lincoln", "madison", "monroe", "jackson", "harrison", "cleveland",
    "church", "school", "center", "market", "bridge",
)

_SUFFIXES = ("street", "avenue", "road", "drive", "lane")

_ABBREVIATIONS = {
    "street": "st",
    "avenue": "ave",
    "road": "rd",
    "drive": "dr",
    "lane": "ln",
}

_ZIPS = tuple(f"{z:05d}" for z in (
    2134, 2139, 10001, 10025, 11201, 19104, 20001, 21201, 27514, 30303,
    33101, 37203, 43210, 44106, 48104, 53703, 55414, 60601, 60637, 63130,
    73069, 75201, 78712, 80302, 84112, 85281, 90024, 94110, 97201, 98105,
))

_STYLES = ("tabular", "rdf")

_FILLER_NULL_RATE = 0.02


@dataclass(frozen=True)
class GenSpec:
    n_left: int
    n_right: int
    n_dups: int
    noise: float = 0.1
    seed: int = 0
    left_style: str = "tabular"
    right_style: str = "tabular"
    field_split: bool = False

    def __post_init__(self) -> None:
        if self.n_left < 1 or self.n_right < 1:
            raise ArgumentError("both sides need at least one record")
        if self.n_dups < 0:
            raise ArgumentError(f"n_dups must be non-negative, got {self.n_dups}")
        if self.n_dups > min(self.n_left, self.n_right):
            raise ArgumentError(
                f"n_dups={self.n_dups} exceeds the smaller side "
                f"min({self.n_left}, {self.n_right})"
            )
        if not 0.0 <= self.noise <= 1.0:
            raise ArgumentError(f"noise must be in [0, 1], got {self.noise}")
        for style in (self.left_style, self.right_style):
            if style not in _STYLES:
                raise ArgumentError(f"style must be one of {_STYLES}, got {style!r}")


@dataclass(frozen=True)
class _Person:
    first: str
    last: str
    address: str
    zip_code: str
    phone: str

    def key(self) -> tuple[str, str, str]:
        return (self.first, self.last, self.phone)


@dataclass(frozen=True)
class GeneratedData:
    left: Dataset
    right: Dataset
    left_triples: TripleSet | None
    right_triples: TripleSet | None
    truth: GroundTruth
    mappings: list[Mapping]


def _sample_person(rng: random.Random) -> _Person:
    number = rng.randrange(1, 1000)
    street = rng.choice(_STREETS)
    suffix = rng.choice(_SUFFIXES)
    return _Person(
        first=rng.choice(_FIRST_NAMES),
        last=rng.choice(_LAST_NAMES),
        address=f"{number} {street} {suffix}",
        zip_code=rng.choice(_ZIPS),
        phone=f"555-{rng.randrange(10000):04d}",
    )


def _noise_value(rng: random.Random, value: str) -> str:
    """One perturbation: a character substitution, a token swap, or an
    address-style abbreviation."""
    tokens = value.split()
    ops = ["char"]
    if len(tokens) >= 2:
        ops.append("swap")
    if any(t in _ABBREVIATIONS for t in tokens):
        ops.append("abbrev")
    op = rng.choice(ops)
    if op == "swap":
        i, j = rng.sample(range(len(tokens)), 2)
        tokens[i], tokens[j] = tokens[j], tokens[i]
        return " ".join(tokens)
    if op == "abbrev":
        out = [(_ABBREVIATIONS[t] if t in _ABBREVIATIONS else t) for t in tokens]
        return " ".join(out)
    pos = rng.randrange(len(value))
    ch = rng.choice(string.ascii_lowercase)
    return value[:pos] + ch + value[pos + 1 :]


def _left_fields(style: str) -> tuple[str, ...]:
    if style == "rdf":
        return ("hasName", "hasAddress", "hasZip", "hasPhone")
    return ("Name", "Address", "Zip", "Phone")


def _right_fields(style: str, field_split: bool) -> tuple[str, ...]:
    if field_split:
        if style == "rdf":
            return ("hasFirstName", "hasLastName", "hasAddress", "hasZip", "hasPhone")
        return ("FirstName", "LastName", "Address", "Zip", "Phone")
    return _left_fields(style)


def _left_values(person: _Person) -> tuple[str, ...]:
    return (f"{person.first} {person.last}", person.address, person.zip_code, person.phone)


def _right_values(person: _Person, field_split: bool) -> tuple[str, ...]:
    if field_split:
        return (person.first, person.last, person.address, person.zip_code, person.phone)
    return _left_values(person)


def _maybe_noise(rng: random.Random, values: tuple[str, ...], noise: float) -> tuple[str, ...]:
    return tuple(
        _noise_value(rng, v) if v and rng.random() < noise else v for v in values
    )


def _dataset_to_triples(dataset: Dataset) -> TripleSet:
    triples = set()
    for rec in dataset.records:
        for i, field_name in enumerate(dataset.schema.fields):
            for member in sorted(split_value_set(rec.values[i])):
                triples.add(Triple(rec.record_id, field_name, member))
    return triple_set(triples)


def generate(spec: GenSpec) -> GeneratedData:
    """Deterministic generation for one spec; same spec, same output."""
    rng = random.Random(spec.seed)
    dup_people: list[_Person] = []
    seen_keys: set[tuple[str, str, str]] = set()
    while len(dup_people) < spec.n_dups:
        person = _sample_person(rng)
        if person.key() in seen_keys:
            continue
        seen_keys.add(person.key())
        dup_people.append(person)

    def filler() -> _Person:
        while True:
            person = _sample_person(rng)
            if person.key() not in seen_keys:
                return person

    left_records = []
    for i in range(spec.n_left):
        if i < spec.n_dups:
            person = dup_people[i]
            values = _left_values(person)
        else:
            person = filler()
            values = _left_values(person)
            if rng.random() < _FILLER_NULL_RATE:
                values = values[:3] + ("null",)
        left_records.append(Record(record_id=f"L{i}", values=values))

    right_records = []
    for i in range(spec.n_right):
        if i < spec.n_dups:
            values = _right_values(dup_people[i], spec.field_split)
            values = _maybe_noise(rng, values, spec.noise)
        else:
            values = _right_values(filler(), spec.field_split)
            if rng.random() < _FILLER_NULL_RATE:
                values = values[:-1] + ("null",)
        right_records.append(Record(record_id=f"R{i}", values=values))

    left = Dataset(
        schema=Schema(dataset_name="synth_left", fields=_left_fields(spec.left_style)),
        records=tuple(left_records),
    )
    right = Dataset(
        schema=Schema(
            dataset_name="synth_right",
            fields=_right_fields(spec.right_style, spec.field_split),
        ),
        records=tuple(right_records),
    )
    truth = GroundTruth(
        duplicate_pairs=frozenset((f"L{i}", f"R{i}") for i in range(spec.n_dups))
    )
    mappings = _truth_mappings(left.schema, right.schema, spec.field_split)
    return GeneratedData(
        left=left,
        right=right,
        left_triples=_dataset_to_triples(left) if spec.left_style == "rdf" else None,
        right_triples=_dataset_to_triples(right) if spec.right_style == "rdf" else None,
        truth=truth,
        mappings=mappings,
    )


def _truth_mappings(schema1: Schema, schema2: Schema, field_split: bool) -> list[Mapping]:
    """The intended field correspondences, including the n:m name
    mapping when the right side splits names."""
    left_fields = schema1.fields
    right_fields = schema2.fields
    mappings = []
    if field_split:
        mappings.append(
            Mapping(
                left_fields=frozenset({left_fields[0]}),
                right_fields=frozenset({right_fields[0], right_fields[1]}),
                score=1.0,
            )
        )
        rest = zip(left_fields[1:], right_fields[2:])
    else:
        rest = zip(left_fields, right_fields)
    for lf, rf in rest:
        mappings.append(
            Mapping(left_fields=frozenset({lf}), right_fields=frozenset({rf}), score=1.0)
        )
    return mappings


def write_generated(data: GeneratedData, out_dir: str | Path) -> dict[str, Path]:
    """Write one generated pair to disk; triples sides become .nt files,
    tabular sides .csv. Returns the paths keyed by artifact name."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    if data.left_triples is not None:
        paths["left"] = out / "left.nt"
        serialize_ntriples(data.left_triples, paths["left"])
    else:
        paths["left"] = out / "left.csv"
        save_csv(data.left, paths["left"], GENERATED_CSV_CONFIG)
    if data.right_triples is not None:
        paths["right"] = out / "right.nt"
        serialize_ntriples(data.right_triples, paths["right"])
    else:
        paths["right"] = out / "right.csv"
        save_csv(data.right, paths["right"], GENERATED_CSV_CONFIG)
    paths["truth"] = out / "truth.csv"
    save_ground_truth(data.truth, paths["truth"])
    paths["mappings"] = out / "mappings.json"
    save_mappings(data.mappings, paths["mappings"])
    return paths
