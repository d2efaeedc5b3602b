"""Command-line front end.

Subcommands: convert, match, learn, block, evaluate, pipeline, generate.
Every run is deterministic given its config and seed; artifacts are
plain CSV/JSON files written under --out. A JSON config file can supply
any long option (dashes as underscores); explicit flags win over it.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .blocking import (
    build_blocks,
    candidate_set,
    evaluate,
    load_candidates,
    save_candidates,
    save_eval_report,
)
from .errors import ArgumentError, DnfBlockError, ParseError
from .learner import LearnerConfig, learn_scheme
from .matcher import (
    build_similarity_matrix,
    exhaustive_mappings,
    generate_duplicates,
    hungarian_assignment,
    load_duplicates,
    load_id_pairs,
    mapping_precision_recall,
    permute_negatives,
    save_duplicates,
    save_id_pairs,
)
from .predicates import load_scheme, save_scheme
from .rdf import parse_ntriples, property_table_to_triples, serialize_ntriples, triples_to_property_table
from .synth import GenSpec, generate, write_generated
from .tabular import (
    CsvConfig,
    Dataset,
    load_csv,
    load_ground_truth,
    load_mappings,
    save_mappings,
)

_DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "out": ".",
    "t": 50,
    "theta": 0.5,
    "n": 50,
    "kappa": 0.9,
    "k": 1,
    "term_cap": 200_000,
}

_PQ_IDENTITY_TOL = 1e-12


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the JSON config file; flags set on the
    command line keep their values."""
    if not getattr(args, "config", None):
        return args
    path = Path(args.config)
    if not path.exists():
        raise ArgumentError(f"no such config file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON config: {exc}") from None
    if not isinstance(loaded, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    for key, value in loaded.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ArgumentError(f"{path}: unknown config key {key!r}")
        if getattr(args, attr) in (None, False):
            setattr(args, attr, value)
    return args


def _apply_defaults(args: argparse.Namespace) -> argparse.Namespace:
    for key, value in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _side_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "ntriples" if Path(path).suffix == ".nt" else "csv"


def _load_side(path: str, fmt: str | None, id_column: str | None, name: str) -> Dataset:
    fmt = _side_format(path, fmt)
    if fmt == "ntriples":
        return triples_to_property_table(parse_ntriples(path), name=name)
    config = CsvConfig(id_column=id_column, dataset_name=name)
    return load_csv(path, config)


def _load_pair(args: argparse.Namespace) -> tuple[Dataset, Dataset]:
    left = _load_side(args.left, args.left_format, args.left_id_column, "left")
    right = _load_side(args.right, args.right_format, args.right_id_column, "right")
    return left, right


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_convert(args: argparse.Namespace) -> int:
    if args.direction == "nt2csv":
        table = triples_to_property_table(parse_ntriples(args.input), name=Path(args.input).stem)
        from .tabular import save_csv

        save_csv(table, args.output)
        print(f"wrote {args.output}: {len(table.records)} rows, {len(table.schema.fields)} columns")
    else:
        table = load_csv(args.input)
        triples = property_table_to_triples(table)
        serialize_ntriples(triples, args.output)
        print(f"wrote {args.output}: {len(triples)} triples")
    return 0


def _run_matcher(args, left: Dataset, right: Dataset) -> tuple[list, list, list, dict]:
    """Shared by cmd_match and cmd_pipeline: returns (mappings,
    duplicates D, negatives N, report)."""
    exhaustive = bool(getattr(args, "exhaustive", False))
    limit = args.n if exhaustive else max(args.t, args.n)
    ranked = generate_duplicates(left, right, limit=limit)
    if exhaustive:
        mappings = exhaustive_mappings(left.schema, right.schema)
        source = "exhaustive"
    else:
        matrix = build_similarity_matrix(ranked[: args.t], left, right, theta=args.theta)
        mappings = hungarian_assignment(matrix)
        source = "matcher"
    duplicates = ranked[: args.n]
    negatives = permute_negatives(
        [(d.left_id, d.right_id) for d in duplicates], seed=args.seed
    )
    report = {
        "mapping_source": source,
        "t": args.t,
        "theta": args.theta,
        "n": args.n,
        "seed": args.seed,
        "generated": len(ranked),
        "duplicates": len(duplicates),
        "negatives": len(negatives),
        "mappings": [
            {"left": m.sorted_left(), "right": m.sorted_right(), "score": m.score}
            for m in mappings
        ],
    }
    return mappings, duplicates, negatives, report


def cmd_match(args: argparse.Namespace) -> int:
    left, right = _load_pair(args)
    out = _out_dir(args)
    mappings, duplicates, negatives, report = _run_matcher(args, left, right)
    if args.truth_mappings:
        truth = load_mappings(args.truth_mappings)
        precision, recall = mapping_precision_recall(mappings, truth)
        report["mapping_precision"] = precision
        report["mapping_recall"] = recall
    save_mappings(mappings, out / "mappings.json")
    save_duplicates(duplicates, out / "duplicates.csv")
    save_id_pairs(negatives, out / "negatives.csv")
    _write_json(report, out / "match_report.json")
    print(
        f"match: {len(mappings)} mappings ({report['mapping_source']}), "
        f"{len(duplicates)} duplicates, {len(negatives)} negatives -> {out}"
    )
    return 0


def cmd_learn(args: argparse.Namespace) -> int:
    left, right = _load_pair(args)
    out = _out_dir(args)
    duplicates = [(d.left_id, d.right_id) for d in load_duplicates(args.duplicates)]
    negatives = load_id_pairs(args.negatives) if args.negatives else None
    mappings = load_mappings(args.mappings)
    config = LearnerConfig(kappa=args.kappa, k=args.k, term_cap=args.term_cap)
    scheme, report = learn_scheme(
        left, right, mappings, duplicates, config, seed=args.seed, neg_pairs=negatives
    )
    save_scheme(scheme, out / "scheme.json")
    _write_json(report, out / "learn_report.json")
    print(
        f"learn: scheme with {len(scheme.terms)} terms at k={scheme.k} "
        f"({report['survivor_count']} survivors of {report['search_space_size']}) -> {out}"
    )
    return 0


def cmd_block(args: argparse.Namespace) -> int:
    left, right = _load_pair(args)
    out = _out_dir(args)
    scheme = load_scheme(args.scheme)
    left_index = build_blocks(left, scheme, "left", threads=args.threads)
    right_index = build_blocks(right, scheme, "right", threads=args.threads)
    gamma = candidate_set(left_index, right_index)
    save_candidates(gamma, out / "gamma.csv")
    stats = {
        "left": left_index.stats(),
        "right": right_index.stats(),
        "candidates": len(gamma),
    }
    _write_json(stats, out / "block_stats.json")
    print(
        f"block: {len(gamma)} candidate pairs from "
        f"{left_index.n_blocks()}/{right_index.n_blocks()} blocks -> {out}"
    )
    return 0


def _eval_payload(gamma, truth, n_left: int, n_right: int) -> dict:
    report = evaluate(gamma, truth, n_left, n_right)
    payload = report.to_dict()
    if report.rr < 1.0:
        c = report.true_matches / report.comparisons
        error = abs(report.pq - c * report.pc / (1.0 - report.rr))
        payload["pq_identity_error"] = error
        payload["pq_identity_ok"] = error < _PQ_IDENTITY_TOL
    return payload


def cmd_evaluate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    gamma = load_candidates(args.gamma)
    truth = load_ground_truth(args.truth)
    payload = _eval_payload(gamma, truth, args.n_left, args.n_right)
    _write_json(payload, out / "eval_report.json")
    if not args.no_figures:
        from .report import render_figures

        render_figures(out, payload, [])
    print(
        f"evaluate: rr={payload['rr']:.4f} pc={payload['pc']:.4f} "
        f"pq={payload['pq']:.4f} fscore={payload['fscore']:.4f} -> {out}"
    )
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    if args.mappings_file and args.exhaustive:
        raise ArgumentError("choose one mapping source: --mappings-file or --exhaustive")
    out = _out_dir(args)
    timings: list[tuple[str, float]] = []
    artifacts: dict[str, str] = {}

    def timed(stage: str, fn):
        start = time.perf_counter()
        result = fn()
        timings.append((stage, time.perf_counter() - start))
        return result

    combined: dict = {"out": str(out)}

    def load_and_persist() -> tuple[Dataset, Dataset]:
        left, right = _load_pair(args)
        from .tabular import save_csv

        for side, dataset in (("left", left), ("right", right)):
            if _side_format(getattr(args, side), getattr(args, f"{side}_format")) == "ntriples":
                target = out / f"converted_{side}.csv"
                save_csv(dataset, target)
                artifacts[f"converted_{side}"] = str(target)
        return left, right

    left, right = timed("convert", load_and_persist)

    if args.mappings_file:
        def match_stage():
            mappings = load_mappings(args.mappings_file)
            ranked = generate_duplicates(left, right, limit=args.n)
            duplicates = ranked[: args.n]
            negatives = permute_negatives(
                [(d.left_id, d.right_id) for d in duplicates], seed=args.seed
            )
            report = {
                "mapping_source": "user-file",
                "n": args.n,
                "seed": args.seed,
                "duplicates": len(duplicates),
                "negatives": len(negatives),
                "mappings": [
                    {"left": m.sorted_left(), "right": m.sorted_right(), "score": m.score}
                    for m in mappings
                ],
            }
            return mappings, duplicates, negatives, report
    else:
        def match_stage():
            return _run_matcher(args, left, right)

    mappings, duplicates, negatives, match_report = timed("match", match_stage)
    save_mappings(mappings, out / "mappings.json")
    save_duplicates(duplicates, out / "duplicates.csv")
    save_id_pairs(negatives, out / "negatives.csv")
    _write_json(match_report, out / "match_report.json")
    artifacts.update(
        mappings=str(out / "mappings.json"),
        duplicates=str(out / "duplicates.csv"),
        negatives=str(out / "negatives.csv"),
    )
    combined["match"] = match_report

    def learn_stage():
        config = LearnerConfig(kappa=args.kappa, k=args.k, term_cap=args.term_cap)
        return learn_scheme(
            left,
            right,
            mappings,
            [(d.left_id, d.right_id) for d in duplicates],
            config,
            seed=args.seed,
            neg_pairs=negatives,
        )

    scheme, learn_report = timed("learn", learn_stage)
    save_scheme(scheme, out / "scheme.json")
    _write_json(learn_report, out / "learn_report.json")
    artifacts["scheme"] = str(out / "scheme.json")
    combined["learn"] = learn_report

    def block_stage():
        left_index = build_blocks(left, scheme, "left", threads=args.threads)
        right_index = build_blocks(right, scheme, "right", threads=args.threads)
        return left_index, right_index, candidate_set(left_index, right_index)

    left_index, right_index, gamma = timed("block", block_stage)
    save_candidates(gamma, out / "gamma.csv")
    block_stats = {
        "left": left_index.stats(),
        "right": right_index.stats(),
        "candidates": len(gamma),
    }
    _write_json(block_stats, out / "block_stats.json")
    artifacts["gamma"] = str(out / "gamma.csv")
    combined["blocks"] = block_stats

    eval_payload = None
    if args.truth:
        def evaluate_stage():
            truth = load_ground_truth(args.truth)
            return _eval_payload(gamma, truth, len(left.records), len(right.records))

        eval_payload = timed("evaluate", evaluate_stage)
        save_eval_path = out / "eval_report.json"
        _write_json(eval_payload, save_eval_path)
        artifacts["evaluation"] = str(save_eval_path)
    # explicit null when no truth was supplied, so the key is always there
    combined["evaluation"] = eval_payload

    from .report import save_timings_csv

    save_timings_csv(timings, out / "timings.csv")
    artifacts["timings"] = str(out / "timings.csv")
    if not args.no_figures:
        from .report import render_figures

        for fig_path in render_figures(out, eval_payload, timings):
            artifacts[fig_path.stem] = str(fig_path)
    combined["timings"] = {stage: seconds for stage, seconds in timings}
    combined["artifacts"] = artifacts
    _write_json(combined, out / "report.json")
    summary = f"pipeline: {len(scheme.terms)} terms, {len(gamma)} candidates"
    if eval_payload is not None:
        summary += f", rr={eval_payload['rr']:.4f} pc={eval_payload['pc']:.4f}"
    print(summary + f" -> {out}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    spec = GenSpec(
        n_left=args.n_left,
        n_right=args.n_right,
        n_dups=args.n_dups,
        noise=args.noise,
        seed=args.seed,
        left_style=args.left_style,
        right_style=args.right_style,
        field_split=args.field_split,
    )
    data = generate(spec)
    paths = write_generated(data, out)
    listing = ", ".join(f"{k}={v.name}" for k, v in sorted(paths.items()))
    print(f"generate: {len(data.truth)} true pairs, {listing} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; explicit flags override it")
    shared.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    shared.add_argument("--out", default=None, help="output directory (default .)")
    shared.add_argument("--threads", type=int, default=None, help="worker threads for blocking")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--left", required=True, help="left dataset path (.csv or .nt)")
    pair.add_argument("--right", required=True, help="right dataset path (.csv or .nt)")
    pair.add_argument("--left-format", choices=("csv", "ntriples"), default=None)
    pair.add_argument("--right-format", choices=("csv", "ntriples"), default=None)
    pair.add_argument("--left-id-column", default=None, help="CSV column holding record ids")
    pair.add_argument("--right-id-column", default=None)

    matcher = argparse.ArgumentParser(add_help=False)
    matcher.add_argument("-t", type=int, default=None, help="duplicates used for the similarity matrix (default 50)")
    matcher.add_argument("--theta", type=float, default=None, help="Jaro-Winkler closeness threshold (default 0.5)")
    matcher.add_argument("-n", type=int, default=None, help="duplicates kept for learning (default 50)")
    matcher.add_argument("--exhaustive", action="store_true", help="skip the matcher; use all 1:1 field mappings")

    learner = argparse.ArgumentParser(add_help=False)
    learner.add_argument("--kappa", type=float, default=None, help="score threshold in [-1, 1] (default 0.9)")
    learner.add_argument("-k", type=int, default=None, help="max atoms per conjunction (default 1)")
    learner.add_argument("--term-cap", type=int, default=None, help="search space cap (default 200000)")

    parser = argparse.ArgumentParser(
        prog="dnfblock",
        description="Learn and apply DNF blocking schemes over heterogeneous dataset pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", parents=[shared], help="convert between N-Triples and property-table CSV")
    p.add_argument("--direction", choices=("nt2csv", "csv2nt"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("match", parents=[shared, pair, matcher], help="find duplicates, mappings and negatives")
    p.add_argument("--truth-mappings", default=None, help="mapping JSON to score the produced mappings against")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("learn", parents=[shared, pair, learner], help="learn a blocking scheme")
    p.add_argument("--duplicates", required=True, help="duplicates CSV (left_id,right_id,cosine)")
    p.add_argument("--negatives", default=None, help="negatives CSV; derived from the duplicates by a seeded derangement when omitted")
    p.add_argument("--mappings", required=True, help="mapping JSON")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("block", parents=[shared, pair], help="apply a scheme and emit candidate pairs")
    p.add_argument("--scheme", required=True, help="scheme JSON")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("evaluate", parents=[shared], help="score a candidate set against ground truth")
    p.add_argument("--gamma", required=True, help="candidate pairs CSV")
    p.add_argument("--truth", required=True, help="ground truth CSV")
    p.add_argument("--n-left", type=int, required=True, help="left dataset size")
    p.add_argument("--n-right", type=int, required=True, help="right dataset size")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "pipeline",
        parents=[shared, pair, matcher, learner],
        help="convert -> match -> learn -> block -> evaluate in one run",
    )
    p.add_argument("--mappings-file", default=None, help="user mapping JSON (skips the matcher)")
    p.add_argument("--truth", default=None, help="ground truth CSV enabling the evaluate stage")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("generate", parents=[shared], help="generate a synthetic dataset pair")
    p.add_argument("--n-left", type=int, required=True)
    p.add_argument("--n-right", type=int, required=True)
    p.add_argument("--n-dups", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--left-style", choices=("tabular", "rdf"), default="tabular")
    p.add_argument("--right-style", choices=("tabular", "rdf"), default="tabular")
    p.add_argument("--field-split", action="store_true")
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge_config(args)
        args = _apply_defaults(args)
        return args.func(args)
    except DnfBlockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
