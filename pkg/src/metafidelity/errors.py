"""Exception hierarchy shared by all metafidelity modules."""


class MetafidelityError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MetafidelityError):
    """Malformed or inconsistent user input (dump files, CSVs, configs).

    ``line`` carries a 1-based line number when the error originates from a
    specific line of an NDJSON/CSV file, else None.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        base = super().__str__()
        if self.line is not None:
            return f"line {self.line}: {base}"
        return base


# --- record validation ------------------------------------------------------

class MissingField(InputError):
    pass


class UnknownField(InputError):
    pass


class BothScoreKinds(InputError):
    pass


class NonFinite(InputError):
    pass


class LabelOutOfRange(InputError):
    pass


class NotASimplex(InputError):
    pass


class DuplicateId(InputError):
    pass


# --- pairing ----------------------------------------------------------------

class LabelMismatch(InputError):
    pass


class ClassCountMismatch(InputError):
    pass


class EmptyIntersection(InputError):
    pass


# --- divergence -------------------------------------------------------------

class LengthMismatch(MetafidelityError):
    pass


class NonPositiveTemperature(MetafidelityError):
    pass


# --- metamorphic relations --------------------------------------------------

class EmptyDataset(MetafidelityError):
    pass


class NegativeDelta(MetafidelityError):
    pass


class EmptyConfidenceSubset(MetafidelityError):
    """Teacher never reaches the confidence threshold; MR3 is undefined."""


class ZeroBins(MetafidelityError):
    pass


class OutOfRange(MetafidelityError):
    pass


# --- attack quality ---------------------------------------------------------

class UnsupportedLanguage(MetafidelityError):
    pass


class UnterminatedLiteral(InputError):
    pass


class EmptyInput(MetafidelityError):
    pass


class NoIdentifiers(MetafidelityError):
    pass


class NoSubstitutions(MetafidelityError):
    pass


class MissingEmbeddings(MetafidelityError):
    pass


class ZeroVector(MetafidelityError):
    pass


class EmptyCorrectSet(MetafidelityError):
    pass


# --- statistics -------------------------------------------------------------

class DegenerateMatrix(MetafidelityError):
    pass


class TooFewRows(MetafidelityError):
    pass


class AllZeroDifferences(MetafidelityError):
    pass


# --- cli --------------------------------------------------------------------

class UnknownKind(MetafidelityError):
    pass
