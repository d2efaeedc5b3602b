"""Unsupervised matcher front end.

Produces everything the learner needs without labeled data: a ranked
list of probable duplicate record pairs (TF-IDF cosine over whole-record
token bags, pruned exactly by an inverted index, since pairs sharing no
token have cosine 0 under any weighting), a field-to-field similarity
matrix (Soft TF-IDF with a Jaro-Winkler secondary, one matrix per
duplicate pair, element-wise mean), a 1:1 mapping set via an optimal
assignment on that matrix, and permutation-generated negative pairs.

TF-IDF uses the smoothed form idf = ln((1 + n_docs)/(1 + df)) + 1 with
L2-normalized document vectors: the raw ln(n/df) form zeroes out tokens
occurring in every document, which would make two identical records in a
two-record corpus score 0 instead of 1.
"""

from __future__ import annotations

import csv
import math
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ArgumentError, ParseError
from .predicates import tokenize
from .tabular import Dataset, GroundTruth, Mapping, Record, Schema, is_null, split_value_set

# ---------------------------------------------------------------------------
# Jaro-Winkler secondary similarity
# ---------------------------------------------------------------------------


def jaro_similarity(s1: str, s2: str) -> float:
    if s1 == s2:
        return 1.0
    len1, len2 = len(s1), len(s2)
    if len1 == 0 or len2 == 0:
        return 0.0
    window = max(max(len1, len2) // 2 - 1, 0)
    match1 = [False] * len1
    match2 = [False] * len2
    matches = 0
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(len2, i + window + 1)
        for j in range(lo, hi):
            if not match2[j] and s2[j] == ch:
                match1[i] = match2[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    seq2 = [s2[j] for j in range(len2) if match2[j]]
    half_transpositions = 0
    mi = 0
    for i in range(len1):
        if match1[i]:
            if s1[i] != seq2[mi]:
                half_transpositions += 1
            mi += 1
    t = half_transpositions // 2
    m = float(matches)
    return (m / len1 + m / len2 + (m - t) / m) / 3.0


def jaro_winkler(s1: str, s2: str) -> float:
    """Jaro with the Winkler prefix boost (scaling 0.1, prefix up to 4,
    applied only above the classic 0.7 threshold)."""
    jaro = jaro_similarity(s1, s2)
    if jaro <= 0.7:
        return jaro
    prefix = 0
    for a, b in zip(s1[:4], s2[:4]):
        if a != b:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


# ---------------------------------------------------------------------------
# TF-IDF weighting
# ---------------------------------------------------------------------------


class TokenWeights:
    """Smoothed TF-IDF weights over a fixed document corpus."""

    def __init__(self, documents) -> None:
        self.n_docs = 0
        self.df: Counter[str] = Counter()
        for doc in documents:
            self.n_docs += 1
            self.df.update(set(doc))

    @classmethod
    def from_counts(cls, df: Counter, n_docs: int) -> "TokenWeights":
        out = cls(())
        out.df = df
        out.n_docs = n_docs
        return out

    def merged(self, other: "TokenWeights") -> "TokenWeights":
        return TokenWeights.from_counts(self.df + other.df, self.n_docs + other.n_docs)

    def idf(self, token: str) -> float:
        return math.log((1.0 + self.n_docs) / (1.0 + self.df[token])) + 1.0

    def vector(self, tokens) -> dict[str, float]:
        """L2-normalized tf-idf vector of one token bag."""
        counts = Counter(tokens)
        if not counts:
            return {}
        weights = {tok: counts[tok] * self.idf(tok) for tok in sorted(counts)}
        norm = math.sqrt(sum(w * w for w in weights.values()))
        return {tok: w / norm for tok, w in weights.items()}


def _dot(v1: dict[str, float], v2: dict[str, float]) -> float:
    if len(v2) < len(v1):
        v1, v2 = v2, v1
    return sum(w * v2[tok] for tok, w in sorted(v1.items()) if tok in v2)


def record_token_bag(record: Record, schema: Schema) -> list[str]:
    """All tokens of a record: every value-set member of every field,
    lowercased and tokenized; member order is sorted for determinism."""
    bag: list[str] = []
    for cell in record.values:
        for member in sorted(split_value_set(cell)):
            bag.extend(tokenize(member.lower()))
    return bag


# ---------------------------------------------------------------------------
# Duplicates generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DuplicateCandidate:
    left_id: str
    right_id: str
    cosine: float


def generate_duplicates(r1: Dataset, r2: Dataset, limit: int) -> list[DuplicateCandidate]:
    """Top `limit` cross-dataset pairs by whole-record TF-IDF cosine.

    IDF is computed over the union corpus of both datasets' records.
    Only pairs sharing at least one token are scored; the pruning is
    exact because token-disjoint pairs have cosine 0.
    """
    if limit <= 0:
        raise ArgumentError(f"limit must be positive, got {limit}")
    if not r1.records or not r2.records:
        raise ArgumentError("duplicates generation needs non-empty datasets on both sides")
    bags1 = {rec.record_id: record_token_bag(rec, r1.schema) for rec in r1.records}
    bags2 = {rec.record_id: record_token_bag(rec, r2.schema) for rec in r2.records}
    weights = TokenWeights(list(bags1.values()) + list(bags2.values()))
    vecs1 = {rid: weights.vector(bag) for rid, bag in bags1.items()}
    vecs2 = {rid: weights.vector(bag) for rid, bag in bags2.items()}
    inverted: dict[str, list[str]] = {}
    for rec in r2.records:
        for tok in vecs2[rec.record_id]:
            inverted.setdefault(tok, []).append(rec.record_id)
    scored: list[tuple[float, str, str]] = []
    for rec in r1.records:
        lid = rec.record_id
        v1 = vecs1[lid]
        partners: set[str] = set()
        for tok in v1:
            partners.update(inverted.get(tok, ()))
        for rid in partners:
            cos = _dot(v1, vecs2[rid])
            scored.append((min(max(cos, 0.0), 1.0), lid, rid))
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    return [
        DuplicateCandidate(left_id=lid, right_id=rid, cosine=cos)
        for cos, lid, rid in scored[:limit]
    ]


# ---------------------------------------------------------------------------
# Soft TF-IDF and the similarity matrix
# ---------------------------------------------------------------------------


def soft_tfidf(s1: str, s2: str, theta: float, weights: TokenWeights | None = None) -> float:
    """Soft TF-IDF similarity of two strings in [0, 1].

    Tokens of s1 whose best Jaro-Winkler partner in s2 reaches theta
    contribute the product of the two normalized TF-IDF weights and
    that similarity. Without an explicit corpus the two strings form
    their own two-document corpus (so identical strings score 1).
    """
    if not 0.0 <= theta <= 1.0:
        raise ArgumentError(f"theta must be in [0, 1], got {theta}")
    toks1 = tokenize(s1.lower())
    toks2 = tokenize(s2.lower())
    if not toks1 or not toks2:
        return 0.0
    if weights is None:
        weights = TokenWeights([toks1, toks2])
    v1 = weights.vector(toks1)
    v2 = weights.vector(toks2)
    others = sorted(v2)
    total = 0.0
    for w in sorted(v1):
        best = None
        best_sim = -1.0
        for v in others:
            sim = jaro_winkler(w, v)
            if sim > best_sim:
                best_sim = sim
                best = v
        if best_sim >= theta:
            total += v1[w] * v2[best] * best_sim
    return min(max(total, 0.0), 1.0)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Field-to-field similarity; rows are left fields, cols right fields."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def entry(self, row_field: str, col_field: str) -> float:
        return self.values[self.rows.index(row_field)][self.cols.index(col_field)]


def _cell_text(record: Record, idx: int) -> str:
    cell = record.values[idx]
    return "" if is_null(cell) else cell


def build_similarity_matrix(
    duplicates: list[DuplicateCandidate],
    r1: Dataset,
    r2: Dataset,
    theta: float,
) -> SimilarityMatrix:
    """One Soft TF-IDF matrix per duplicate pair, element-wise mean.

    The weight corpus of entry (f1, f2) is the union of the two full
    columns, one document per cell.
    """
    if not duplicates:
        raise ArgumentError("similarity matrix needs at least one duplicate pair")
    pairs = [
        (r1.record_by_id(d.left_id), r2.record_by_id(d.right_id)) for d in duplicates
    ]
    col_weights1 = []
    for i in range(len(r1.schema.fields)):
        col_weights1.append(TokenWeights(
            tokenize(_cell_text(rec, i).lower()) for rec in r1.records))
    col_weights2 = []
    for j in range(len(r2.schema.fields)):
        col_weights2.append(TokenWeights(
            tokenize(_cell_text(rec, j).lower()) for rec in r2.records))
    values = []
    for i in range(len(r1.schema.fields)):
        row = []
        for j in range(len(r2.schema.fields)):
            weights = col_weights1[i].merged(col_weights2[j])
            total = 0.0
            for left_rec, right_rec in pairs:
                total += soft_tfidf(
                    _cell_text(left_rec, i), _cell_text(right_rec, j), theta, weights
                )
            row.append(total / len(pairs))
        values.append(tuple(row))
    return SimilarityMatrix(
        rows=tuple(r1.schema.fields), cols=tuple(r2.schema.fields), values=tuple(values)
    )


def hungarian_assignment(matrix: SimilarityMatrix) -> list[Mapping]:
    """Maximum-total-similarity 1:1 assignment; exactly
    min(|rows|, |cols|) mappings, score = the matrix entry."""
    if not matrix.rows or not matrix.cols:
        raise ArgumentError("similarity matrix must have non-degenerate dimensions")
    arr = np.asarray(matrix.values, dtype=float)
    row_idx, col_idx = linear_sum_assignment(arr, maximize=True)
    mappings = []
    for i, j in zip(row_idx.tolist(), col_idx.tolist()):
        score = min(max(float(arr[i, j]), 0.0), 1.0)
        mappings.append(
            Mapping(
                left_fields=frozenset({matrix.rows[i]}),
                right_fields=frozenset({matrix.cols[j]}),
                score=score,
            )
        )
    return mappings


# ---------------------------------------------------------------------------
# Negatives and the exhaustive fall-back
# ---------------------------------------------------------------------------

_PERMUTE_ATTEMPTS = 10_000


def permute_negatives(d: list[tuple[str, str]], seed: int) -> list[tuple[str, str]]:
    """Non-duplicate pairs obtained by deranging the duplicate pairs.

    Output pair i keeps the left id of d[i] and takes the right id of a
    different pair (a uniformly sampled derangement of positions), with
    the extra requirement that no output pair occurs in d itself.
    Deterministic given the seed; infeasible inputs fail fast.
    """
    if len(d) < 2:
        raise ArgumentError(f"need at least 2 duplicate pairs to permute, got {len(d)}")
    existing = set(d)
    rng = random.Random(seed)
    indices = list(range(len(d)))
    for _ in range(_PERMUTE_ATTEMPTS):
        rng.shuffle(indices)
        if any(pi == i for i, pi in enumerate(indices)):
            continue
        negatives = [(d[i][0], d[pi][1]) for i, pi in enumerate(indices)]
        if any(pair in existing for pair in negatives):
            continue
        return negatives
    raise ArgumentError(
        f"no valid negative permutation found in {_PERMUTE_ATTEMPTS} attempts; "
        f"the duplicate pairs repeat too heavily for a derangement to avoid them"
    )


def exhaustive_mappings(a1: Schema, a2: Schema) -> list[Mapping]:
    """All 1:1 field mappings, score 0 (the fall-back when no matcher runs)."""
    return [
        Mapping(left_fields=frozenset({f}), right_fields=frozenset({g}), score=0.0)
        for f in a1.fields
        for g in a2.fields
    ]


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------


def precision_recall_at_k(
    ranked: list[DuplicateCandidate], truth: GroundTruth, k: int
) -> tuple[float, float]:
    """Precision@k and Recall@k of the ranked duplicate list."""
    if not truth.duplicate_pairs:
        raise ArgumentError("recall is undefined against an empty ground truth")
    if not 1 <= k <= len(ranked):
        raise ArgumentError(f"k must be in [1, {len(ranked)}], got {k}")
    hits = sum(
        1 for c in ranked[:k] if (c.left_id, c.right_id) in truth.duplicate_pairs
    )
    return hits / k, hits / len(truth.duplicate_pairs)


def mapping_precision_recall(
    q: list[Mapping], q_truth: list[Mapping]
) -> tuple[float, float]:
    """Fraction of produced mappings exactly matching a truth mapping,
    and fraction of truth mappings so matched; recall divides by the
    truth size even when |q| is smaller."""
    if not q or not q_truth:
        raise ArgumentError("mapping precision/recall needs non-empty mapping sets")
    truth_keys = {(m.left_fields, m.right_fields) for m in q_truth}
    matched = sum(1 for m in q if (m.left_fields, m.right_fields) in truth_keys)
    return matched / len(q), matched / len(q_truth)


# ---------------------------------------------------------------------------
# Delimited I/O for matcher artifacts
# ---------------------------------------------------------------------------

DUPLICATES_HEADER = ("left_id", "right_id", "cosine")
PAIRS_HEADER = ("left_id", "right_id")


def save_duplicates(duplicates: list[DuplicateCandidate], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DUPLICATES_HEADER)
        for d in duplicates:
            writer.writerow([d.left_id, d.right_id, repr(d.cosine)])


def load_duplicates(path: str | Path) -> list[DuplicateCandidate]:
    path = Path(path)
    if not path.exists():
        raise ArgumentError(f"no such file: {path}")
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header left_id,right_id,cosine") from None
        if tuple(c.strip() for c in header) != DUPLICATES_HEADER:
            raise ParseError(
                f"{path}: expected header left_id,right_id,cosine, got {','.join(header)!r}"
            )
        for row in reader:
            if len(row) != 3:
                raise ParseError(
                    f"{path} line {reader.line_num}: expected 3 fields, got {len(row)}"
                )
            try:
                cosine = float(row[2])
            except ValueError:
                raise ParseError(
                    f"{path} line {reader.line_num}: cosine {row[2]!r} is not a number"
                ) from None
            out.append(DuplicateCandidate(left_id=row[0], right_id=row[1], cosine=cosine))
    return out


def save_id_pairs(pairs: list[tuple[str, str]], path: str | Path) -> None:
    """Two-column id-pair CSV, order preserved (negatives keep the
    derangement's pair order)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAIRS_HEADER)
        for left, right in pairs:
            writer.writerow([left, right])


def load_id_pairs(path: str | Path) -> list[tuple[str, str]]:
    path = Path(path)
    if not path.exists():
        raise ArgumentError(f"no such file: {path}")
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header left_id,right_id") from None
        if tuple(c.strip() for c in header) != PAIRS_HEADER:
            raise ParseError(
                f"{path}: expected header left_id,right_id, got {','.join(header)!r}"
            )
        for row in reader:
            if len(row) != 2:
                raise ParseError(
                    f"{path} line {reader.line_num}: expected 2 fields, got {len(row)}"
                )
            out.append((row[0], row[1]))
    return out
