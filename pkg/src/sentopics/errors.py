"""Exception hierarchy shared by all sentopics modules."""


class SentopicsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SentopicsError):
    """Invalid input data, configuration, or mismatched artifacts."""


class CorpusFormatError(ValidationError):
    """Malformed corpus, lexicon, or stopword file; carries a line number."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
        if line is not None:
            prefix += f"{line}: "
        elif path is not None:
            prefix += " "
        super().__init__(prefix + message)


class InvariantError(SentopicsError):
    """Internal consistency violation; indicates a bug, not bad input."""
