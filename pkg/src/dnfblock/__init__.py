"""Unsupervised learning of DNF blocking schemes for heterogeneous
dataset pairs (tabular/tabular, RDF/RDF, RDF/tabular)."""

from .blocking import BlockIndex, EvalReport, build_blocks, candidate_set, evaluate
from .errors import (
    ArgumentError,
    CapacityError,
    DataError,
    DnfBlockError,
    LearnerFailureError,
    ParseError,
    ValidationError,
)
from .learner import LearnerConfig, learn_scheme
from .matcher import (
    DuplicateCandidate,
    SimilarityMatrix,
    build_similarity_matrix,
    exhaustive_mappings,
    generate_duplicates,
    hungarian_assignment,
    jaro_winkler,
    permute_negatives,
    soft_tfidf,
)
from .predicates import (
    CATALOGUE,
    BlockingScheme,
    ComplexExtendedSBP,
    GeneralBlockingPredicate,
    SimpleExtendedSBP,
    Term,
    index,
    load_scheme,
    normalize_to_simple_dnf,
    save_scheme,
    scheme_eval,
)
from .rdf import (
    Triple,
    TripleSet,
    parse_ntriples,
    property_table_to_triples,
    serialize_ntriples,
    triple_set,
    triples_to_property_table,
)
from .synth import GenSpec, GeneratedData, generate
from .tabular import (
    CsvConfig,
    Dataset,
    GroundTruth,
    Mapping,
    Record,
    Schema,
    load_csv,
    load_ground_truth,
    load_mappings,
    save_csv,
    save_ground_truth,
    save_mappings,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BlockIndex",
    "BlockingScheme",
    "CATALOGUE",
    "CapacityError",
    "ComplexExtendedSBP",
    "CsvConfig",
    "DataError",
    "Dataset",
    "DnfBlockError",
    "DuplicateCandidate",
    "EvalReport",
    "GenSpec",
    "GeneralBlockingPredicate",
    "GeneratedData",
    "GroundTruth",
    "LearnerConfig",
    "LearnerFailureError",
    "Mapping",
    "ParseError",
    "Record",
    "Schema",
    "SimilarityMatrix",
    "SimpleExtendedSBP",
    "Term",
    "Triple",
    "TripleSet",
    "ValidationError",
    "build_blocks",
    "build_similarity_matrix",
    "candidate_set",
    "evaluate",
    "exhaustive_mappings",
    "generate",
    "generate_duplicates",
    "hungarian_assignment",
    "index",
    "jaro_winkler",
    "learn_scheme",
    "load_csv",
    "load_ground_truth",
    "load_mappings",
    "load_scheme",
    "normalize_to_simple_dnf",
    "parse_ntriples",
    "permute_negatives",
    "property_table_to_triples",
    "save_csv",
    "save_ground_truth",
    "save_mappings",
    "save_scheme",
    "scheme_eval",
    "serialize_ntriples",
    "soft_tfidf",
    "triple_set",
    "triples_to_property_table",
    "__version__",
]
