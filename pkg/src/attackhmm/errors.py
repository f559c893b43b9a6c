"""Exception types raised across the package."""


class HmmError(Exception):
    """Base class for every error raised by attackhmm."""


# -- model validation -------------------------------------------------------

class ModelError(HmmError, ValueError):
    """The model parameters are not a valid discrete HMM."""


class EmptyModel(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class NegativeEntry(ModelError):
    pass


class NotStochastic(ModelError):
    """A probability row does not sum to one."""

    def __init__(self, matrix, row, total):
        self.matrix = matrix
        self.row = row
        self.total = total
        where = matrix if row is None else f"{matrix} row {row}"
        super().__init__(f"{where} sums to {total!r}, expected 1.0")


# -- decoding ---------------------------------------------------------------

class SymbolOutOfRange(HmmError, ValueError):
    pass


class EmptySequence(HmmError, ValueError):
    pass


class NoViablePath(HmmError):
    """Every state path assigns the observation sequence probability zero."""


class TooLarge(HmmError):
    pass


# -- files and ingestion ----------------------------------------------------

class ParseError(HmmError, ValueError):
    """Input text could not be parsed. ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}" + (f", column {column})" if column else ")")
        super().__init__(message)


class UnknownObservation(HmmError, ValueError):
    pass


class EmptyRuleSet(HmmError, ValueError):
    pass


class CsvMalformed(ParseError):
    pass


class MissingColumn(HmmError, ValueError):
    pass


# -- matching ---------------------------------------------------------------

class EmptyInput(HmmError, ValueError):
    pass


class EmptySignatureSet(HmmError, ValueError):
    pass
