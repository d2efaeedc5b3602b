"""Blocking-scheme learner.

Turns a mapping set plus probable duplicates D and probable negatives N
into a positive k-DNF blocking scheme: enumerate candidate blocking
keys (every indexing function crossed with every 1:1 field pair induced
by the mappings, conjunctions up to k atoms grown only where they still
cover something in D), score each key by coverage difference, prune
below kappa, then cover the coverable part of D greedily.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArgumentError,
    CapacityError,
    LearnerFailureError,
    ValidationError,
)
from .matcher import permute_negatives
from .predicates import CATALOGUE, BlockingScheme, SimpleExtendedSBP, Term, index
from .tabular import Dataset, FieldId, Mapping, Record, field_value_set


@dataclass(frozen=True)
class LearnerConfig:
    kappa: float = 0.9
    k: int = 1
    term_cap: int = 200_000

    def __post_init__(self) -> None:
        if not -1.0 <= self.kappa <= 1.0:
            raise ValidationError(f"kappa must be in [-1, 1], got {self.kappa}")
        if self.k < 1:
            raise ValidationError(f"k must be at least 1, got {self.k}")
        if self.term_cap < 1:
            raise ValidationError(f"term_cap must be positive, got {self.term_cap}")


@dataclass(frozen=True)
class ScoredKey:
    """A surviving blocking key with its score and duplicate coverage."""

    term: Term
    score: float
    dup_cover: frozenset[int]


def mapping_field_pairs(mappings: list[Mapping]) -> list[tuple[FieldId, FieldId]]:
    """Unique 1:1 field pairs induced by a mapping set; an n:m mapping
    contributes its full |F1| * |F2| expansion. First-encounter order."""
    if not mappings:
        raise ValidationError("mapping set must be non-empty")
    seen: set[tuple[FieldId, FieldId]] = set()
    out: list[tuple[FieldId, FieldId]] = []
    for m in mappings:
        for lf in m.sorted_left():
            for rf in m.sorted_right():
                if (lf, rf) not in seen:
                    seen.add((lf, rf))
                    out.append((lf, rf))
    return out


def candidate_atoms(field_pairs: list[tuple[FieldId, FieldId]]) -> list[SimpleExtendedSBP]:
    """The candidate pool H: the full indexing-function catalogue crossed
    with every field pair."""
    return [
        SimpleExtendedSBP(gbp=fn, left_field=lf, right_field=rf)
        for lf, rf in field_pairs
        for fn in CATALOGUE
    ]


class CoverageIndex:
    """Coverage of the D and N pair lists, cached per atom.

    Pairs are tracked by position (repeats in the input lists keep
    separate positions), so coverage sets are frozensets of indices and
    a conjunction's coverage is the exact intersection of its atoms'.
    """

    def __init__(
        self,
        r1: Dataset,
        r2: Dataset,
        dup_pairs: list[tuple[str, str]],
        neg_pairs: list[tuple[str, str]],
    ) -> None:
        self.schema1 = r1.schema
        self.schema2 = r2.schema
        self.dup_records = self._resolve(r1, r2, dup_pairs, "duplicate")
        self.neg_records = self._resolve(r1, r2, neg_pairs, "negative")
        self._atom_dup: dict[SimpleExtendedSBP, frozenset[int]] = {}
        self._atom_neg: dict[SimpleExtendedSBP, frozenset[int]] = {}
        self._left_bkvs: dict[tuple[str, str, FieldId], frozenset[str]] = {}
        self._right_bkvs: dict[tuple[str, str, FieldId], frozenset[str]] = {}

    @staticmethod
    def _resolve(r1, r2, pairs, kind) -> list[tuple[Record, Record]]:
        try:
            return [(r1.record_by_id(lid), r2.record_by_id(rid)) for lid, rid in pairs]
        except ArgumentError as exc:
            raise ValidationError(f"{kind} pair list: {exc}") from None

    def _side(self, cache, fn: str, record: Record, field: FieldId, schema) -> frozenset[str]:
        key = (fn, record.record_id, field)
        bkvs = cache.get(key)
        if bkvs is None:
            out: set[str] = set()
            for member in field_value_set(record, field, schema):
                out.update(index(fn, member))
            bkvs = frozenset(out)
            cache[key] = bkvs
        return bkvs

    def _covers(self, atom: SimpleExtendedSBP, lrec: Record, rrec: Record) -> bool:
        left = self._side(self._left_bkvs, atom.gbp, lrec, atom.left_field, self.schema1)
        if not left:
            return False
        right = self._side(self._right_bkvs, atom.gbp, rrec, atom.right_field, self.schema2)
        return not left.isdisjoint(right)

    def atom_dup_cover(self, atom: SimpleExtendedSBP) -> frozenset[int]:
        cover = self._atom_dup.get(atom)
        if cover is None:
            cover = frozenset(
                i for i, (lrec, rrec) in enumerate(self.dup_records)
                if self._covers(atom, lrec, rrec)
            )
            self._atom_dup[atom] = cover
        return cover

    def atom_neg_cover(self, atom: SimpleExtendedSBP) -> frozenset[int]:
        cover = self._atom_neg.get(atom)
        if cover is None:
            cover = frozenset(
                i for i, (lrec, rrec) in enumerate(self.neg_records)
                if self._covers(atom, lrec, rrec)
            )
            self._atom_neg[atom] = cover
        return cover

    def term_dup_cover(self, term: Term) -> frozenset[int]:
        atoms = term.canonical_atoms()
        cover = self.atom_dup_cover(atoms[0])
        for atom in atoms[1:]:
            if not cover:
                break
            cover = cover & self.atom_dup_cover(atom)
        return cover

    def term_neg_cover(self, term: Term) -> frozenset[int]:
        atoms = term.canonical_atoms()
        cover = self.atom_neg_cover(atoms[0])
        for atom in atoms[1:]:
            if not cover:
                break
            cover = cover & self.atom_neg_cover(atom)
        return cover


def build_search_space(
    atoms: list[SimpleExtendedSBP],
    coverage: CoverageIndex,
    config: LearnerConfig,
) -> list[Term]:
    """Candidate terms H_c: single atoms that cover at least one D pair,
    then conjunctions grown one atom at a time, keeping a conjunction
    only while it still covers some D pair. Capped at term_cap."""
    terms: dict[str, Term] = {}

    def _add(term: Term) -> bool:
        key = term.key()
        if key in terms:
            return False
        terms[key] = term
        if len(terms) > config.term_cap:
            raise CapacityError(
                f"search space exceeds term_cap={config.term_cap}; "
                f"reduce k or the mapping set, or raise the cap"
            )
        return True

    useful = [a for a in atoms if coverage.atom_dup_cover(a)]
    current: list[Term] = []
    for atom in useful:
        term = Term(frozenset({atom}))
        if _add(term):
            current.append(term)
    for _ in range(2, config.k + 1):
        grown: list[Term] = []
        for base in current:
            base_cover = coverage.term_dup_cover(base)
            for atom in useful:
                if atom in base.atoms:
                    continue
                if base_cover.isdisjoint(coverage.atom_dup_cover(atom)):
                    continue
                term = Term(base.atoms | {atom})
                if _add(term):
                    grown.append(term)
        current = grown
    return list(terms.values())


def score_and_prune(
    terms: list[Term],
    coverage: CoverageIndex,
    config: LearnerConfig,
) -> list[ScoredKey]:
    """Score = D-coverage fraction minus N-coverage fraction; keys
    scoring below kappa are dropped (a score equal to kappa survives).
    Result is sorted by score descending, canonical key ascending."""
    n_dup = len(coverage.dup_records)
    n_neg = len(coverage.neg_records)
    survivors: list[ScoredKey] = []
    for term in terms:
        dup_cover = coverage.term_dup_cover(term)
        neg_cover = coverage.term_neg_cover(term)
        score = len(dup_cover) / n_dup - len(neg_cover) / n_neg
        if score < config.kappa:
            continue
        survivors.append(ScoredKey(term=term, score=score, dup_cover=dup_cover))
    survivors.sort(key=lambda s: (-s.score, s.term.key()))
    return survivors


def chvatal_cover(survivors: list[ScoredKey]) -> list[ScoredKey]:
    """Greedy cover of the coverable duplicates: repeatedly take the key
    maximizing score * newly-covered count (ties broken by canonical
    key) until every coverable pair is covered."""
    if not survivors:
        raise ArgumentError("cannot cover with an empty survivor list")
    remaining: set[int] = set()
    for s in survivors:
        remaining.update(s.dup_cover)
    pool = list(survivors)
    chosen: list[ScoredKey] = []
    while remaining:
        best = None
        best_gain = 0.0
        for s in pool:
            new = len(s.dup_cover & remaining)
            if new == 0:
                continue
            gain = s.score * new
            if (
                best is None
                or gain > best_gain
                or (gain == best_gain and s.term.key() < best.term.key())
            ):
                best = s
                best_gain = gain
        # remaining is always a subset of the union of pool covers
        chosen.append(best)
        pool.remove(best)
        remaining -= best.dup_cover
    return chosen


def learn_scheme(
    r1: Dataset,
    r2: Dataset,
    mappings: list[Mapping],
    dup_pairs: list[tuple[str, str]],
    config: LearnerConfig | None = None,
    seed: int = 0,
    neg_pairs: list[tuple[str, str]] | None = None,
) -> tuple[BlockingScheme, dict]:
    """End-to-end learning step. Returns the scheme and a report of the
    intermediate sizes (candidate pool, search space, survivors,
    coverable universe, chosen keys with scores).

    When no negative pairs are supplied they are derived from the
    duplicates by a seeded derangement, same size as D."""
    if config is None:
        config = LearnerConfig()
    if len(dup_pairs) < 2:
        raise ValidationError(
            f"need at least 2 duplicate pairs to learn, got {len(dup_pairs)}"
        )
    if neg_pairs is None:
        neg_pairs = permute_negatives(dup_pairs, seed)
    if not neg_pairs:
        raise ValidationError("negative pair list must be non-empty")
    coverage = CoverageIndex(r1, r2, dup_pairs, neg_pairs)
    field_pairs = mapping_field_pairs(mappings)
    atoms = candidate_atoms(field_pairs)
    terms = build_search_space(atoms, coverage, config)
    survivors = score_and_prune(terms, coverage, config)
    if not survivors:
        raise LearnerFailureError(
            f"no blocking key scored at least kappa={config.kappa} "
            f"(searched {len(terms)} candidate keys over {len(atoms)} atoms); "
            f"lower kappa, raise k, or provide better mappings"
        )
    chosen = chvatal_cover(survivors)
    scheme = BlockingScheme(terms=tuple(s.term for s in chosen), k=config.k)
    universe: set[int] = set()
    for s in survivors:
        universe.update(s.dup_cover)
    report = {
        "kappa": config.kappa,
        "k": config.k,
        "dup_count": len(dup_pairs),
        "neg_count": len(neg_pairs),
        "field_pair_count": len(field_pairs),
        "candidate_pool_size": len(atoms),
        "search_space_size": len(terms),
        "survivor_count": len(survivors),
        "universe_size": len(universe),
        "chosen": [
            {
                "key": s.term.key(),
                "score": s.score,
                "dup_cover_size": len(s.dup_cover),
            }
            for s in chosen
        ],
    }
    return scheme, report
