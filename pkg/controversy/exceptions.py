"""
Exceptions raised by the controversy toolkit.

All of them derive from ValueError, so code that guards toolkit calls with
``except ValueError`` keeps working.
"""


class ControversyError(ValueError):
    """Base class for toolkit errors"""


class CorpusFormatError(ControversyError):
    """A corpus or concept-list record could not be parsed"""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SpanError(CorpusFormatError):
    """A mention span falls outside its text or overlaps another span"""


class MaskError(ControversyError):
    """A sentence does not mention the concept being masked"""


class EmbeddingFormatError(ControversyError):
    """An embedding file line is malformed"""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DimensionMismatchError(ControversyError):
    """Two vectors (or a vector and a model) disagree on dimensionality"""

    def __init__(self, expected, actual, what='vector'):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"dimension mismatch: expected {expected}, got {actual} ({what})"
        )


class NoEmbeddingError(ControversyError):
    """None of a concept's title words are in the embedding table"""


class EmptyClassError(ControversyError):
    """A class (controversial / non-controversial) has no members"""


class UnscorableError(ControversyError):
    """A concept has nothing to score it from"""


class SplitError(ControversyError):
    """An evaluation split cannot be built as requested"""


class ZeroVarianceError(ControversyError):
    """Correlation requested over a constant series"""


class ArtifactFormatError(ControversyError):
    """A toolkit artifact file (contexts, model, report) is malformed"""
