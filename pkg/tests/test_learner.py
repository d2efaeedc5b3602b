import random

import pytest

from dnfblock.errors import (
    ArgumentError,
    CapacityError,
    LearnerFailureError,
    ValidationError,
)
from dnfblock.learner import (
    CoverageIndex,
    LearnerConfig,
    ScoredKey,
    build_search_space,
    candidate_atoms,
    chvatal_cover,
    learn_scheme,
    mapping_field_pairs,
    score_and_prune,
)
from dnfblock.predicates import (
    CATALOGUE,
    SimpleExtendedSBP,
    Term,
    scheme_eval,
    simple_sbp_eval,
)
from dnfblock.tabular import Dataset, Mapping, Record, Schema

FIELDS = ("F", "G")
SCHEMA_1 = Schema(dataset_name="left", fields=FIELDS)
SCHEMA_2 = Schema(dataset_name="right", fields=FIELDS)


def dataset(name, rows):
    return Dataset(
        schema=Schema(dataset_name=name, fields=FIELDS),
        records=tuple(Record(record_id=r, values=tuple(v)) for r, v in rows),
    )


def one_to_one(left, right):
    return Mapping(left_fields=frozenset({left}), right_fields=frozenset({right}))


def paired_data(n, share_f=(), share_g=()):
    """n aligned pairs (Li, Ri); pair i shares an F token iff i in
    share_f, a G token iff i in share_g, and nothing else."""
    left_rows, right_rows = [], []
    for i in range(n):
        lf = f"fa{i} fshare{i}" if i in share_f else f"fa{i}"
        rf = f"fshare{i} fb{i}" if i in share_f else f"fb{i}"
        lg = f"ga{i} gshare{i}" if i in share_g else f"ga{i}"
        rg = f"gshare{i} gb{i}" if i in share_g else f"gb{i}"
        left_rows.append((f"L{i}", (lf, lg)))
        right_rows.append((f"R{i}", (rf, rg)))
    return dataset("left", left_rows), dataset("right", right_rows)


TOKENS_FF = SimpleExtendedSBP(gbp="Tokens", left_field="F", right_field="F")
TOKENS_GG = SimpleExtendedSBP(gbp="Tokens", left_field="G", right_field="G")


# ---------------------------------------------------------------------------
# candidate pool
# ---------------------------------------------------------------------------


def test_mapping_field_pairs_expands_and_dedupes():
    m1 = Mapping(left_fields=frozenset({"b", "a"}), right_fields=frozenset({"x"}))
    m2 = one_to_one("a", "x")  # already covered by m1
    m3 = one_to_one("c", "y")
    assert mapping_field_pairs([m1, m2, m3]) == [("a", "x"), ("b", "x"), ("c", "y")]


def test_mapping_field_pairs_requires_mappings():
    with pytest.raises(ValidationError):
        mapping_field_pairs([])


def test_candidate_pool_size():
    # 8 field pairs against the full catalogue
    pairs = [(f"l{i}", f"r{i}") for i in range(8)]
    pool = candidate_atoms(pairs)
    assert len(pool) == 152
    assert len(set(pool)) == 152
    assert len(CATALOGUE) * len(pairs) == 152


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------


def test_atom_cover_matches_pairwise_eval():
    rng = random.Random(31001)
    values = ["mickey beats", "joan", "77019", "apt 5", "null", "fa fb", "x;y"]
    for _ in range(30):
        n = rng.randrange(2, 8)
        left = dataset(
            "left",
            [(f"L{i}", (rng.choice(values), rng.choice(values))) for i in range(n)],
        )
        right = dataset(
            "right",
            [(f"R{i}", (rng.choice(values), rng.choice(values))) for i in range(n)],
        )
        dups = [(f"L{i}", f"R{i}") for i in range(n)]
        negs = [(f"L{i}", f"R{(i + 1) % n}") for i in range(n)]
        cov = CoverageIndex(left, right, dups, negs)
        for _ in range(10):
            atom = SimpleExtendedSBP(
                gbp=rng.choice(CATALOGUE),
                left_field=rng.choice(FIELDS),
                right_field=rng.choice(FIELDS),
            )
            want_dup = frozenset(
                i
                for i, (lid, rid) in enumerate(dups)
                if simple_sbp_eval(
                    atom,
                    left.record_by_id(lid),
                    right.record_by_id(rid),
                    SCHEMA_1,
                    SCHEMA_2,
                )
            )
            want_neg = frozenset(
                i
                for i, (lid, rid) in enumerate(negs)
                if simple_sbp_eval(
                    atom,
                    left.record_by_id(lid),
                    right.record_by_id(rid),
                    SCHEMA_1,
                    SCHEMA_2,
                )
            )
            assert cov.atom_dup_cover(atom) == want_dup
            assert cov.atom_neg_cover(atom) == want_neg


def test_term_cover_is_exact_intersection():
    rng = random.Random(31002)
    left, right = paired_data(
        10, share_f={1, 3, 5, 7, 9}, share_g={3, 4, 5}
    )
    dups = [(f"L{i}", f"R{i}") for i in range(10)]
    negs = [(f"L{i}", f"R{(i + 3) % 10}") for i in range(10)]
    cov = CoverageIndex(left, right, dups, negs)
    for _ in range(50):
        atoms = frozenset(
            SimpleExtendedSBP(
                gbp=rng.choice(CATALOGUE),
                left_field=rng.choice(FIELDS),
                right_field=rng.choice(FIELDS),
            )
            for _ in range(rng.randrange(2, 4))
        )
        term = Term(atoms=atoms)
        want_dup = frozenset(range(10))
        want_neg = frozenset(range(10))
        for atom in atoms:
            want_dup &= cov.atom_dup_cover(atom)
            want_neg &= cov.atom_neg_cover(atom)
        assert cov.term_dup_cover(term) == want_dup
        assert cov.term_neg_cover(term) == want_neg


def test_unresolved_pair_ids_rejected():
    left, right = paired_data(3, share_f={0, 1, 2})
    with pytest.raises(ValidationError):
        CoverageIndex(left, right, [("L0", "R0"), ("L9", "R1")], [("L0", "R1")])
    with pytest.raises(ValidationError):
        CoverageIndex(left, right, [("L0", "R0")], [("L0", "R9")])


# ---------------------------------------------------------------------------
# search space
# ---------------------------------------------------------------------------


def test_search_space_k1_keeps_only_covering_atoms():
    left, right = paired_data(4, share_f={0, 2})
    dups = [(f"L{i}", f"R{i}") for i in range(4)]
    negs = [(f"L{i}", f"R{(i + 1) % 4}") for i in range(4)]
    cov = CoverageIndex(left, right, dups, negs)
    space = build_search_space([TOKENS_FF, TOKENS_GG], cov, LearnerConfig(k=1))
    keys = {t.key() for t in space}
    assert TOKENS_FF.key() in keys
    # G columns never share a token on a duplicate pair
    assert TOKENS_GG.key() not in keys


def test_search_space_grows_conjunction_where_coverage_remains():
    # F covers {1,3,5}, G covers {3}: the pair is joinable at k=2
    left, right = paired_data(6, share_f={1, 3, 5}, share_g={3})
    dups = [(f"L{i}", f"R{i}") for i in range(6)]
    negs = [(f"L{i}", f"R{(i + 1) % 6}") for i in range(6)]
    cov = CoverageIndex(left, right, dups, negs)
    assert cov.atom_dup_cover(TOKENS_FF) == frozenset({1, 3, 5})
    assert cov.atom_dup_cover(TOKENS_GG) == frozenset({3})
    space = build_search_space([TOKENS_FF, TOKENS_GG], cov, LearnerConfig(k=2))
    by_key = {t.key(): t for t in space}
    conj = Term(atoms=frozenset({TOKENS_FF, TOKENS_GG}))
    assert conj.key() in by_key
    assert cov.term_dup_cover(conj) == frozenset({3})


def test_search_space_skips_disjoint_conjunctions():
    # F covers {0}, G covers {2}: empty intersection, no conjunction
    left, right = paired_data(3, share_f={0}, share_g={2})
    dups = [(f"L{i}", f"R{i}") for i in range(3)]
    negs = [(f"L{i}", f"R{(i + 1) % 3}") for i in range(3)]
    cov = CoverageIndex(left, right, dups, negs)
    space = build_search_space([TOKENS_FF, TOKENS_GG], cov, LearnerConfig(k=2))
    assert all(len(t) == 1 for t in space)


def test_search_space_capacity():
    left, right = paired_data(4, share_f={0, 1, 2, 3}, share_g={0, 1, 2, 3})
    dups = [(f"L{i}", f"R{i}") for i in range(4)]
    negs = [(f"L{i}", f"R{(i + 1) % 4}") for i in range(4)]
    cov = CoverageIndex(left, right, dups, negs)
    atoms = candidate_atoms([("F", "F"), ("G", "G")])
    with pytest.raises(CapacityError):
        build_search_space(atoms, cov, LearnerConfig(k=2, term_cap=3))


# ---------------------------------------------------------------------------
# scoring and pruning
# ---------------------------------------------------------------------------


def scored_fixture():
    """4 of 5 duplicates covered, 1 of 5 negatives: score 0.6."""
    left, right = paired_data(10, share_f={0, 1, 2, 3, 5})
    dups = [(f"L{i}", f"R{i}") for i in range(5)]
    negs = [(f"L{i}", f"R{i}") for i in range(5, 10)]
    cov = CoverageIndex(left, right, dups, negs)
    return cov


def test_score_is_coverage_difference():
    cov = scored_fixture()
    term = Term(atoms=frozenset({TOKENS_FF}))
    survivors = score_and_prune([term], cov, LearnerConfig(kappa=-1.0))
    assert len(survivors) == 1
    assert survivors[0].score == pytest.approx(4 / 5 - 1 / 5)
    assert survivors[0].dup_cover == frozenset({0, 1, 2, 3})


def test_prune_is_strict_below_kappa():
    cov = scored_fixture()
    term = Term(atoms=frozenset({TOKENS_FF}))
    # score == kappa survives, anything below is dropped
    assert score_and_prune([term], cov, LearnerConfig(kappa=0.6))
    assert not score_and_prune([term], cov, LearnerConfig(kappa=0.601))
    assert not score_and_prune([term], cov, LearnerConfig(kappa=0.9))


def test_survivors_sorted_by_score_then_key():
    left, right = paired_data(4, share_f={0, 1, 2, 3}, share_g={0, 1})
    dups = [(f"L{i}", f"R{i}") for i in range(4)]
    negs = [(f"L{i}", f"R{(i + 1) % 4}") for i in range(4)]
    cov = CoverageIndex(left, right, dups, negs)
    terms = [Term(atoms=frozenset({TOKENS_GG})), Term(atoms=frozenset({TOKENS_FF}))]
    survivors = score_and_prune(terms, cov, LearnerConfig(kappa=-1.0))
    assert [s.term.key() for s in survivors] == [TOKENS_FF.key(), TOKENS_GG.key()]
    assert survivors[0].score >= survivors[1].score


# ---------------------------------------------------------------------------
# greedy cover
# ---------------------------------------------------------------------------


def single(gbp, lf="F", rf="F"):
    return Term(atoms=frozenset({SimpleExtendedSBP(gbp=gbp, left_field=lf, right_field=rf)}))


def test_chvatal_golden_trace():
    # gains: a=0.9*3=2.7 picked first; then c=0.9*2=1.8 beats b=0.95*1
    a = ScoredKey(term=single("Tokens"), score=0.9, dup_cover=frozenset({1, 2, 3}))
    b = ScoredKey(term=single("Soundex"), score=0.95, dup_cover=frozenset({3, 4}))
    c = ScoredKey(term=single("ExactValue"), score=0.9, dup_cover=frozenset({4, 5}))
    chosen = chvatal_cover([a, b, c])
    assert [s.term.key() for s in chosen] == [a.term.key(), c.term.key()]


def test_chvatal_ties_break_on_key():
    a = ScoredKey(term=single("Tokens"), score=0.9, dup_cover=frozenset({1}))
    b = ScoredKey(term=single("ExactValue"), score=0.9, dup_cover=frozenset({2}))
    chosen = chvatal_cover([a, b])
    # equal gain 0.9: ExactValue(F,F) sorts before Tokens(F,F)
    assert [s.term.key() for s in chosen] == [b.term.key(), a.term.key()]


def test_chvatal_covers_exactly_the_union():
    rng = random.Random(31003)
    gbps = list(CATALOGUE)
    for _ in range(50):
        n_keys = rng.randrange(1, 8)
        survivors = []
        for i in range(n_keys):
            cover = frozenset(rng.sample(range(12), rng.randrange(1, 6)))
            survivors.append(
                ScoredKey(
                    term=single(gbps[i], lf="F", rf="F")
                    if i < len(gbps)
                    else single(gbps[0], lf="G", rf="G"),
                    score=rng.uniform(0.1, 1.0),
                    dup_cover=cover,
                )
            )
        # keys must be distinct for a well-formed pool
        if len({s.term.key() for s in survivors}) != n_keys:
            continue
        chosen = chvatal_cover(survivors)
        union = set().union(*(s.dup_cover for s in survivors))
        covered = set().union(*(s.dup_cover for s in chosen))
        assert covered == union
        # every pick contributed something new
        seen = set()
        for s in chosen:
            assert s.dup_cover - seen
            seen |= s.dup_cover


def test_chvatal_empty_pool_rejected():
    with pytest.raises(ArgumentError):
        chvatal_cover([])


# ---------------------------------------------------------------------------
# end-to-end learning
# ---------------------------------------------------------------------------


def learnable_data(n=10):
    """Aligned pairs whose F columns share one token per pair."""
    left, right = paired_data(n, share_f=set(range(n)))
    dups = [(f"L{i}", f"R{i}") for i in range(n)]
    return left, right, dups


def test_learn_scheme_end_to_end():
    left, right, dups = learnable_data()
    scheme, report = learn_scheme(
        left, right, [one_to_one("F", "F"), one_to_one("G", "G")], dups, seed=0
    )
    assert scheme.k == 1
    # the learned scheme covers every duplicate pair
    for lid, rid in dups:
        assert scheme_eval(
            scheme,
            left.record_by_id(lid),
            right.record_by_id(rid),
            left.schema,
            right.schema,
        )
    assert report["dup_count"] == 10
    assert report["neg_count"] == 10
    assert report["field_pair_count"] == 2
    assert report["candidate_pool_size"] == 38
    assert report["survivor_count"] >= 1
    assert report["universe_size"] == 10
    assert report["chosen"]
    assert all(c["score"] >= 0.9 for c in report["chosen"])


def test_learn_scheme_deterministic():
    left, right, dups = learnable_data()
    mappings = [one_to_one("F", "F")]
    s1, r1 = learn_scheme(left, right, mappings, dups, seed=5)
    s2, r2 = learn_scheme(left, right, mappings, dups, seed=5)
    assert [t.key() for t in s1.canonical_terms()] == [
        t.key() for t in s2.canonical_terms()
    ]
    assert r1 == r2


def test_learn_scheme_explicit_negatives_after_derivation():
    left, right, dups = learnable_data(6)
    negs = [(f"L{i}", f"R{(i + 2) % 6}") for i in range(6)]
    s1, _ = learn_scheme(left, right, [one_to_one("F", "F")], dups, neg_pairs=negs)
    s2, _ = learn_scheme(left, right, [one_to_one("F", "F")], dups, seed=0)
    assert [t.key() for t in s1.canonical_terms()] == [
        t.key() for t in s2.canonical_terms()
    ]


def test_learn_scheme_needs_two_duplicates():
    left, right, dups = learnable_data(5)
    with pytest.raises(ValidationError):
        learn_scheme(left, right, [one_to_one("F", "F")], dups[:1])


def test_learn_scheme_failure_when_nothing_scores():
    # pairs share nothing, so no key covers any duplicate
    left, right = paired_data(5)
    dups = [(f"L{i}", f"R{i}") for i in range(5)]
    with pytest.raises(LearnerFailureError):
        learn_scheme(left, right, [one_to_one("F", "F")], dups)


def test_learn_scheme_kappa_one_adversarial():
    # F covers only 4 of 5 pairs: nothing reaches a perfect score
    left, right = paired_data(5, share_f={0, 1, 2, 3})
    dups = [(f"L{i}", f"R{i}") for i in range(5)]
    with pytest.raises(LearnerFailureError):
        learn_scheme(
            left, right, [one_to_one("F", "F")], dups,
            config=LearnerConfig(kappa=1.0),
        )


def test_learn_scheme_respects_k():
    left, right, dups = learnable_data(8)
    scheme, report = learn_scheme(
        left,
        right,
        [one_to_one("F", "F"), one_to_one("G", "G")],
        dups,
        config=LearnerConfig(kappa=0.5, k=2),
    )
    assert scheme.k == 2
    assert all(len(t) <= 2 for t in scheme.terms)
    assert report["k"] == 2


def test_learner_config_validation():
    with pytest.raises(ValidationError):
        LearnerConfig(kappa=1.5)
    with pytest.raises(ValidationError):
        LearnerConfig(k=0)
    with pytest.raises(ValidationError):
        LearnerConfig(term_cap=0)
