"""The feature space for blocking: indexing functions, blocking
predicates, conjunction terms, and positive DNF blocking schemes.

An indexing function maps one string value to a set of blocking key
values (BKVs). Its general blocking predicate (GBP) holds for a value
pair iff the two BKV sets intersect, so every predicate here stays a
set-intersection test rather than an arbitrary boolean function; the
off-by-one integer predicate, for example, is realized by emitting
n-1, n, n+1 as keys.

All functions are case-insensitive: input is lowercased before any
processing. Multi-valued cells index every member and take the union.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Literal

from . import phonetic
from .errors import ArgumentError, CapacityError, DataError, ParseError, ValidationError
from .tabular import FieldId, Mapping, Record, Schema, field_value_set

# Namespace separator for block identifiers; must not occur in data.
NAMESPACE_SEPARATOR = "│"

# Tokens are maximal runs not containing whitespace or , ; /  —
# other punctuation stays inside the token ("w.", "jr.").
_TOKEN_SPLIT = re.compile(r"[\s,;/]+")


def tokenize(value: str) -> list[str]:
    return [t for t in _TOKEN_SPLIT.split(value) if t]


def _integer_tokens(value: str) -> list[int]:
    out = []
    for tok in tokenize(value):
        body = tok[1:] if tok[:1] in "+-" else tok
        if body.isdigit():
            out.append(int(tok))
    return out


def _index_exact(value: str) -> frozenset[str]:
    return frozenset((value,)) if value else frozenset()


def _index_tokens(value: str) -> frozenset[str]:
    return frozenset(tokenize(value))


def _index_integers(value: str) -> frozenset[str]:
    return frozenset(str(n) for n in _integer_tokens(value))


def _index_integers_off_by_one(value: str) -> frozenset[str]:
    keys = set()
    for n in _integer_tokens(value):
        keys.update((str(n - 1), str(n), str(n + 1)))
    return frozenset(keys)


def _make_prefix(n: int):
    def _index_prefix(value: str) -> frozenset[str]:
        # shorter tokens emit the whole token
        return frozenset(tok[:n] for tok in tokenize(value))

    return _index_prefix


def _make_ngrams(n: int):
    def _index_ngrams(value: str) -> frozenset[str]:
        toks = tokenize(value)
        if len(toks) < n:
            return frozenset()
        return frozenset(" ".join(toks[i : i + n]) for i in range(len(toks) - n + 1))

    return _index_ngrams


def _make_phonetic(encode):
    def _index_phonetic(value: str) -> frozenset[str]:
        keys = set()
        for tok in tokenize(value):
            if not any(ch.isalpha() for ch in tok):
                continue
            code = encode(tok)
            if code:
                keys.add(code)
        return frozenset(keys)

    return _index_phonetic


def _index_double_metaphone(value: str) -> frozenset[str]:
    keys = set()
    for tok in tokenize(value):
        if not any(ch.isalpha() for ch in tok):
            continue
        primary, alternate = phonetic.double_metaphone(tok)
        for code in (primary, alternate):
            if code:
                keys.add(code)
    return frozenset(keys)


INDEXING_FUNCTIONS = {
    "ExactValue": _index_exact,
    "Tokens": _index_tokens,
    "IntegerTokens": _index_integers,
    "IntegerTokensOffByOne": _index_integers_off_by_one,
    "TokenPrefix3": _make_prefix(3),
    "TokenPrefix5": _make_prefix(5),
    "TokenPrefix7": _make_prefix(7),
    "TokenNGrams2": _make_ngrams(2),
    "TokenNGrams4": _make_ngrams(4),
    "TokenNGrams6": _make_ngrams(6),
    "Soundex": _make_phonetic(phonetic.soundex),
    "RefinedSoundex": _make_phonetic(phonetic.refined_soundex),
    "Metaphone": _make_phonetic(phonetic.metaphone),
    "DoubleMetaphone": _index_double_metaphone,
    "NYSIIS": _make_phonetic(phonetic.nysiis),
    "Caverphone1": _make_phonetic(phonetic.caverphone1),
    "Caverphone2": _make_phonetic(phonetic.caverphone2),
    "ColognePhonetic": _make_phonetic(phonetic.cologne_phonetic),
    "MatchRating": _make_phonetic(phonetic.match_rating),
}

CATALOGUE = tuple(INDEXING_FUNCTIONS)


@lru_cache(maxsize=1 << 18)
def index(fn: str, value: str) -> frozenset[str]:
    """BKV set of one indexing function for one value.

    The result is a frozenset and may be cached: never mutate it.
    """
    try:
        impl = INDEXING_FUNCTIONS[fn]
    except KeyError:
        raise ArgumentError(f"unknown indexing function {fn!r}") from None
    return impl(value.lower())


@dataclass(frozen=True)
class GeneralBlockingPredicate:
    indexing_function: str

    def __post_init__(self) -> None:
        if self.indexing_function not in INDEXING_FUNCTIONS:
            raise ArgumentError(f"unknown indexing function {self.indexing_function!r}")


def gbp_eval(gbp: GeneralBlockingPredicate, v1: str, v2: str) -> bool:
    """True iff the two values share at least one BKV."""
    return not index(gbp.indexing_function, v1).isdisjoint(
        index(gbp.indexing_function, v2)
    )


@dataclass(frozen=True, order=True)
class SimpleExtendedSBP:
    """A GBP applied through a 1:1 field mapping."""

    gbp: str
    left_field: FieldId
    right_field: FieldId

    def __post_init__(self) -> None:
        if self.gbp not in INDEXING_FUNCTIONS:
            raise ArgumentError(f"unknown indexing function {self.gbp!r}")

    def key(self) -> str:
        return f"{self.gbp}({self.left_field},{self.right_field})"


@dataclass(frozen=True)
class ComplexExtendedSBP:
    """A GBP applied through an n:m field mapping; equivalent to the
    disjunction of its |F1| * |F2| induced simple SBPs."""

    gbp: str
    mapping: Mapping

    def __post_init__(self) -> None:
        if self.gbp not in INDEXING_FUNCTIONS:
            raise ArgumentError(f"unknown indexing function {self.gbp!r}")

    def expand(self) -> list[SimpleExtendedSBP]:
        return [
            SimpleExtendedSBP(gbp=self.gbp, left_field=lf, right_field=rf)
            for lf in self.mapping.sorted_left()
            for rf in self.mapping.sorted_right()
        ]


def _side_bkvs(fn: str, record: Record, field: FieldId, schema: Schema) -> frozenset[str]:
    members = field_value_set(record, field, schema)
    if not members:
        return frozenset()
    out: set[str] = set()
    for member in members:
        out.update(index(fn, member))
    return frozenset(out)


def simple_sbp_eval(
    sbp: SimpleExtendedSBP,
    r1: Record,
    r2: Record,
    schema1: Schema,
    schema2: Schema,
) -> bool:
    """True iff the unions of member BKVs on the two sides intersect.
    An empty value set on either side is never covered."""
    left = _side_bkvs(sbp.gbp, r1, sbp.left_field, schema1)
    if not left:
        return False
    right = _side_bkvs(sbp.gbp, r2, sbp.right_field, schema2)
    return not left.isdisjoint(right)


def complex_sbp_eval(
    csbp: ComplexExtendedSBP,
    r1: Record,
    r2: Record,
    schema1: Schema,
    schema2: Schema,
) -> bool:
    return any(
        simple_sbp_eval(sbp, r1, r2, schema1, schema2) for sbp in csbp.expand()
    )


@dataclass(frozen=True)
class Term:
    """A conjunction of simple atoms (a size-1 term is just an SBP)."""

    atoms: frozenset[SimpleExtendedSBP]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValidationError("term must have at least one atom")

    def canonical_atoms(self) -> tuple[SimpleExtendedSBP, ...]:
        return tuple(sorted(self.atoms))

    def key(self) -> str:
        return " AND ".join(a.key() for a in self.canonical_atoms())

    def __len__(self) -> int:
        return len(self.atoms)


def term_eval(term: Term, r1: Record, r2: Record, schema1: Schema, schema2: Schema) -> bool:
    return all(simple_sbp_eval(a, r1, r2, schema1, schema2) for a in term.canonical_atoms())


@dataclass(frozen=True)
class BlockingScheme:
    """A positive k-DNF formula over simple atoms. Negation has no
    representation here, so positivity is structural."""

    terms: tuple[Term, ...]
    k: int

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValidationError("scheme must have at least one term")
        if self.k < 1:
            raise ValidationError(f"k must be positive, got {self.k}")
        for term in self.terms:
            if len(term) > self.k:
                raise ValidationError(
                    f"term {term.key()!r} has {len(term)} atoms, exceeding k={self.k}"
                )
        keys = [t.key() for t in self.terms]
        if len(set(keys)) != len(keys):
            raise ValidationError("scheme contains duplicate terms")

    def canonical_terms(self) -> tuple[Term, ...]:
        return tuple(sorted(self.terms, key=lambda t: t.key()))


def scheme_eval(
    scheme: BlockingScheme, r1: Record, r2: Record, schema1: Schema, schema2: Schema
) -> bool:
    """Disjunction over terms, conjunction over atoms within a term."""
    return any(term_eval(t, r1, r2, schema1, schema2) for t in scheme.terms)


ComplexTerm = tuple[ComplexExtendedSBP, ...]


def normalize_to_simple_dnf(
    complex_terms: list[ComplexTerm], term_cap: int = 200_000
) -> BlockingScheme:
    """Expand complex atoms and distribute conjunction over disjunction,
    yielding an equivalent positive DNF over simple atoms only.

    Expansion is counted before materialization: a disjunction of
    conjunctions whose product would exceed term_cap raises rather than
    truncating, because a truncated scheme is not equivalent.
    """
    if not complex_terms:
        raise ValidationError("cannot normalize an empty scheme")
    total = 0
    for cterm in complex_terms:
        if not cterm:
            raise ValidationError("complex term must have at least one atom")
        count = 1
        for atom in cterm:
            count *= len(atom.mapping.left_fields) * len(atom.mapping.right_fields)
        total += count
        if total > term_cap:
            raise CapacityError(
                f"normalization would produce more than {term_cap} terms"
            )
    seen: set[frozenset[SimpleExtendedSBP]] = set()
    out: list[Term] = []
    k = 0
    for cterm in complex_terms:
        disjunct_lists = [atom.expand() for atom in cterm]
        for combo in itertools.product(*disjunct_lists):
            atoms = frozenset(combo)
            if atoms in seen:
                continue
            seen.add(atoms)
            out.append(Term(atoms=atoms))
            k = max(k, len(atoms))
    return BlockingScheme(terms=tuple(out), k=k)


Side = Literal["left", "right"]


def bkv_set(
    term: Term,
    record: Record,
    side: Side,
    schema: Schema,
    term_id: str = "t0",
) -> set[str]:
    """Namespaced blocking key values of one record under one term.

    A single-atom term yields one key per BKV; a j-atom conjunction
    yields the cross product of the atoms' BKV sets in canonical atom
    order, components joined by the namespace separator. The term id
    prefix keeps blocks of different terms from colliding.
    """
    if side not in ("left", "right"):
        raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")
    per_atom: list[frozenset[str]] = []
    for atom in term.canonical_atoms():
        field = atom.left_field if side == "left" else atom.right_field
        bkvs = _side_bkvs(atom.gbp, record, field, schema)
        if not bkvs:
            return set()  # conjunction unsatisfiable through this record
        for bkv in bkvs:
            if NAMESPACE_SEPARATOR in bkv:
                raise DataError(
                    f"record {record.record_id!r} field {field!r} produced a key "
                    f"containing the reserved separator {NAMESPACE_SEPARATOR!r}"
                )
        per_atom.append(bkvs)
    return {
        NAMESPACE_SEPARATOR.join((term_id, *combo))
        for combo in itertools.product(*per_atom)
    }


def scheme_term_ids(scheme: BlockingScheme) -> list[tuple[str, Term]]:
    """Stable term ids t0, t1, ... assigned over canonical term order."""
    return [(f"t{i}", term) for i, term in enumerate(scheme.canonical_terms())]


def save_scheme(scheme: BlockingScheme, path: str | Path) -> None:
    """Serialize as {k, terms:[{atoms:[{gbp,left,right}]}]}."""
    payload = {
        "k": scheme.k,
        "terms": [
            {
                "atoms": [
                    {"gbp": a.gbp, "left": a.left_field, "right": a.right_field}
                    for a in term.canonical_atoms()
                ]
            }
            for term in scheme.canonical_terms()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_scheme(path: str | Path) -> BlockingScheme:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise ArgumentError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} line {exc.lineno}: {exc.msg}") from None
    if not isinstance(payload, dict) or "k" not in payload or "terms" not in payload:
        raise ParseError(f"{path}: expected an object with 'k' and 'terms'")
    if not isinstance(payload["k"], int):
        raise ParseError(f"{path}: 'k' must be an integer")
    if not isinstance(payload["terms"], list):
        raise ParseError(f"{path}: 'terms' must be an array")
    terms = []
    for i, entry in enumerate(payload["terms"]):
        if not isinstance(entry, dict) or not isinstance(entry.get("atoms"), list):
            raise ParseError(f"{path}: term {i} must be an object with an 'atoms' array")
        atoms = []
        for j, a in enumerate(entry["atoms"]):
            if not isinstance(a, dict) or not {"gbp", "left", "right"} <= a.keys():
                raise ParseError(
                    f"{path}: term {i} atom {j} must have gbp/left/right"
                )
            try:
                atoms.append(
                    SimpleExtendedSBP(
                        gbp=str(a["gbp"]),
                        left_field=str(a["left"]),
                        right_field=str(a["right"]),
                    )
                )
            except ArgumentError as exc:
                raise ValidationError(f"{path}: term {i} atom {j}: {exc}") from None
        try:
            terms.append(Term(atoms=frozenset(atoms)))
        except ValidationError as exc:
            raise ValidationError(f"{path}: term {i}: {exc}") from None
    try:
        return BlockingScheme(terms=tuple(terms), k=payload["k"])
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None
