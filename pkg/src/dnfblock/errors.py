"""Error taxonomy shared by the library and the CLI.

Each class maps to one CLI exit code so scripted callers can branch on
failure kind without parsing stderr text.
"""

from __future__ import annotations


class DnfBlockError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ParseError(DnfBlockError):
    """A delimited file, N-Triples file, or JSON artifact could not be parsed.

    Messages name the offending line or row number whenever one exists.
    """

    exit_code = 2


class ValidationError(DnfBlockError):
    """A dataset or artifact violates a structural invariant (duplicate ids,
    ragged rows, unresolved ids in a ground truth, malformed scheme)."""

    exit_code = 3


class DataError(DnfBlockError):
    """Data contains a reserved marker that would corrupt downstream
    encodings (the block-key namespace separator, the multi-value
    delimiter, or the null marker in a context that must stay lossless)."""

    exit_code = 3


class ArgumentError(DnfBlockError):
    """A parameter is outside its documented range, or a requested
    operation is infeasible for the given inputs."""

    exit_code = 3


class LearnerFailureError(DnfBlockError):
    """The learner could not produce a scheme: every candidate term was
    pruned, or no candidate covers any training duplicate."""

    exit_code = 4


class CapacityError(DnfBlockError):
    """A configured capacity ceiling (for example the normalization term
    cap) would be exceeded; the operation is refused rather than truncated."""

    exit_code = 5
