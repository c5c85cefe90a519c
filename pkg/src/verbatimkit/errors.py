"""Exception types shared across the toolkit.

Everything raised for bad data derives from :class:`VerbatimError`, so
callers (and the CLI) can distinguish data problems from programming
errors with a single except clause.
"""


class VerbatimError(Exception):
    """Base class for all data-level errors raised by this package."""


class SchemaError(VerbatimError):
    """An annotation document or manifest violates the documented schema."""


class DuplicateIdError(VerbatimError):
    """The same utterance_id appears more than once in a manifest."""


class MissingFileError(VerbatimError):
    """A manifest entry references a transcript file that does not exist."""


class FormatError(VerbatimError):
    """A line-oriented input (CTM, id<TAB>text, digit string) is malformed."""


class RangeError(VerbatimError):
    """A numeric value falls outside the supported range."""


class ArityError(VerbatimError):
    """Filler count does not match the number of hesitation sites."""


class LexiconError(VerbatimError):
    """A filler token is not part of the configured lexicon."""


class DriftError(VerbatimError):
    """A completion changed content other than the hesitation sites."""


class ProviderError(VerbatimError):
    """Transport or protocol failure talking to a completion provider."""


class UnknownUtteranceError(VerbatimError):
    """A hypothesis id has no matching reference."""


class EmptyCorpusError(VerbatimError):
    """Scoring was requested against zero reference words."""


class MissingBaselineError(VerbatimError):
    """A comparison table was requested without its baseline scheme."""


class DomainError(VerbatimError):
    """An argument is outside a function's mathematical domain."""


class ValidationError(VerbatimError):
    """A configuration bundle fails its consistency checks."""
