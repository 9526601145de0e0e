"""Exception types shared across fieldscope modules."""


class FieldscopeError(Exception):
    """Base class for all library errors."""

    category = "error"


class InputError(FieldscopeError):
    """Unreadable, missing, or structurally invalid input."""

    category = "input-not-found"


class MalformedRecord(FieldscopeError):
    """A single input line could not be parsed (fatal only in strict mode)."""

    category = "malformed-record"


class InvalidDistribution(FieldscopeError):
    """Probability vector fails validation (negative mass, sum != 1)."""

    category = "invalid-distribution"


class DegenerateDistribution(FieldscopeError):
    """Normalization denominator is zero (both inputs concentrated on one shared symbol)."""

    category = "degenerate-distribution"


class InsufficientVocabulary(FieldscopeError):
    """Corpus has fewer distinct word types than the requested cutoff."""

    category = "insufficient-vocabulary"

    def __init__(self, available, required):
        self.available = available
        self.required = required
        super().__init__(
            f"vocabulary cutoff {required} exceeds available types {available}"
        )


class DegenerateCitationTerm(FieldscopeError):
    """A directed term of the citation dissimilarity has a zero denominator."""

    category = "degenerate-citation-term"

    def __init__(self, i, j, direction):
        self.i = i
        self.j = j
        self.direction = direction
        super().__init__(
            f"zero denominator in citation term {direction} for pair ({i}, {j})"
        )


class DegenerateSample(FieldscopeError):
    """Rank statistic undefined (all values tied / zero variance)."""

    category = "degenerate-sample"


class MissingEndpoint(FieldscopeError):
    """Time series lacks the value required at an endpoint year."""

    category = "missing-endpoint"


class ShortHistory(FieldscopeError):
    """Pair history shorter than the configured minimum span."""

    category = "short-history"
