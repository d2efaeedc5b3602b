"""Blocking runtime: apply a learned scheme to full datasets.

Each term of the scheme contributes namespaced blocking key values per
record; records sharing a BKV land in the same block, and the candidate
set is the deduplicated union of all block cross products. Evaluation
reports reduction ratio, pairs completeness, pairs quality and their
harmonic blend against a ground truth.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import ArgumentError, DataError
from .matcher import load_id_pairs, save_id_pairs
from .predicates import (
    NAMESPACE_SEPARATOR,
    BlockingScheme,
    Term,
    bkv_set,
    scheme_term_ids,
)
from .tabular import Dataset, GroundTruth


@dataclass(frozen=True)
class BlockIndex:
    """BKV -> record ids, for one side of one dataset pair."""

    side: str
    record_count: int
    blocks: dict[str, tuple[str, ...]]

    def n_blocks(self) -> int:
        return len(self.blocks)

    def max_block_size(self) -> int:
        return max((len(ids) for ids in self.blocks.values()), default=0)

    def total_entries(self) -> int:
        return sum(len(ids) for ids in self.blocks.values())

    def stats(self) -> dict:
        return {
            "side": self.side,
            "records": self.record_count,
            "blocks": self.n_blocks(),
            "max_block_size": self.max_block_size(),
            "total_entries": self.total_entries(),
        }


def _index_chunk(records, terms: list[tuple[str, Term]], side: str, schema) -> dict[str, list[str]]:
    blocks: dict[str, list[str]] = {}
    for record in records:
        for term_id, term in terms:
            for bkv in sorted(bkv_set(term, record, side, schema, term_id)):
                blocks.setdefault(bkv, []).append(record.record_id)
    return blocks


def build_blocks(
    dataset: Dataset,
    scheme: BlockingScheme,
    side: str,
    threads: int = 1,
) -> BlockIndex:
    """Index one dataset under one side of a scheme.

    With threads > 1 the records are split into contiguous chunks and
    the chunk indexes merged in chunk order, so the result is identical
    to the single-threaded one.
    """
    if side not in ("left", "right"):
        raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")
    if threads < 1:
        raise ArgumentError(f"threads must be at least 1, got {threads}")
    for record in dataset.records:
        for cell in record.values:
            if NAMESPACE_SEPARATOR in cell:
                raise DataError(
                    f"record {record.record_id!r} in dataset {dataset.name!r} "
                    f"contains the reserved namespace separator {NAMESPACE_SEPARATOR!r}"
                )
    terms = scheme_term_ids(scheme)
    records = dataset.records
    if threads == 1 or len(records) < 2 * threads:
        merged = _index_chunk(records, terms, side, dataset.schema)
    else:
        chunk_size = (len(records) + threads - 1) // threads
        chunks = [records[i : i + chunk_size] for i in range(0, len(records), chunk_size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(
                pool.map(lambda c: _index_chunk(c, terms, side, dataset.schema), chunks)
            )
        merged = {}
        for partial in partials:
            for bkv, ids in partial.items():
                merged.setdefault(bkv, []).extend(ids)
    return BlockIndex(
        side=side,
        record_count=len(records),
        blocks={bkv: tuple(ids) for bkv, ids in merged.items()},
    )


def candidate_set(left_index: BlockIndex, right_index: BlockIndex) -> set[tuple[str, str]]:
    """Deduplicated union of the cross products of co-keyed blocks."""
    if left_index.side != "left" or right_index.side != "right":
        raise ArgumentError(
            f"expected a left and a right index, got {left_index.side!r} "
            f"and {right_index.side!r}"
        )
    pairs: set[tuple[str, str]] = set()
    for bkv, left_ids in left_index.blocks.items():
        right_ids = right_index.blocks.get(bkv)
        if not right_ids:
            continue
        for lid in left_ids:
            for rid in right_ids:
                pairs.add((lid, rid))
    return pairs


@dataclass(frozen=True)
class EvalReport:
    comparisons: int
    true_matches: int
    candidates: int
    found_matches: int
    rr: float
    pc: float
    pq: float
    fscore: float

    def to_dict(self) -> dict:
        return {
            "comparisons": self.comparisons,
            "true_matches": self.true_matches,
            "candidates": self.candidates,
            "found_matches": self.found_matches,
            "rr": self.rr,
            "pc": self.pc,
            "pq": self.pq,
            "fscore": self.fscore,
        }


def evaluate(
    gamma: set[tuple[str, str]],
    truth: GroundTruth,
    n_left: int,
    n_right: int,
) -> EvalReport:
    """Candidate-set quality against a ground truth.

    rr = 1 - |candidates| / |all pairs|, pc = found / true matches,
    pq = found / candidates (0 for an empty candidate set), fscore =
    harmonic mean of rr and pc (0 when both vanish).
    """
    comparisons = n_left * n_right
    if comparisons <= 0:
        raise ArgumentError("both datasets must be non-empty to evaluate blocking")
    if not truth.duplicate_pairs:
        raise ArgumentError("evaluation against an empty ground truth is undefined")
    found = len(gamma & truth.duplicate_pairs)
    rr = 1.0 - len(gamma) / comparisons
    pc = found / len(truth.duplicate_pairs)
    pq = found / len(gamma) if gamma else 0.0
    fscore = 2.0 * rr * pc / (rr + pc) if rr + pc > 0 else 0.0
    return EvalReport(
        comparisons=comparisons,
        true_matches=len(truth.duplicate_pairs),
        candidates=len(gamma),
        found_matches=found,
        rr=rr,
        pc=pc,
        pq=pq,
        fscore=fscore,
    )


def save_candidates(gamma: set[tuple[str, str]], path: str | Path) -> None:
    """Candidate pairs as a sorted two-column CSV."""
    save_id_pairs(sorted(gamma), path)


def load_candidates(path: str | Path) -> set[tuple[str, str]]:
    return set(load_id_pairs(path))


def save_eval_report(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
