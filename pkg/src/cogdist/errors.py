"""Exception hierarchy.

Two families: :class:`InputError` for anything wrong with the data handed in
(files, profiles, catalogs) and :class:`ComputationError` for failures while
a method is being evaluated. The CLI maps them to exit codes 2 and 4.
"""


class CogDistError(Exception):
    """Base class for all package errors."""


class InputError(CogDistError):
    pass


class ComputationError(CogDistError):
    pass


# model
class EmptyProfile(InputError):
    pass


class UnknownCategory(InputError):
    def __init__(self, category: str):
        super().__init__(category)
        self.category = category


class AllCountsDropped(InputError):
    pass


class EmptyList(InputError):
    pass


class InvalidCatalog(InputError):
    pass


class InvalidMatrix(InputError):
    pass


# ingest
class MalformedHeader(InputError):
    pass


class VertexCountMismatch(InputError):
    pass


class DanglingLinkEndpoint(InputError):
    pass


class UnparsableLine(InputError):
    def __init__(self, line_no: int, text: str = ""):
        super().__init__(f"line {line_no}: {text!r}" if text else f"line {line_no}")
        self.line_no = line_no


class DuplicateLabel(InputError):
    pass


class ConflictingLinkWeights(InputError):
    pass


class WeightOutOfRange(InputError):
    pass


class BadHeader(InputError):
    pass


class NegativeCount(InputError):
    pass


class InconsistentKind(InputError):
    pass


class UnparsableRow(InputError):
    def __init__(self, line_no: int, text: str = ""):
        super().__init__(f"line {line_no}: {text!r}" if text else f"line {line_no}")
        self.line_no = line_no


class DuplicatePair(InputError):
    pass


# computation
class CatalogMismatch(ComputationError):
    pass


class ZeroTotal(ComputationError):
    pass


class LengthMismatch(ComputationError):
    pass


class NonPositiveWeight(ComputationError):
    pass


class EmptyInput(ComputationError):
    pass


class DegenerateNorm(ComputationError):
    pass


class NonFinite(ComputationError):
    pass


class MissingPair(ComputationError):
    pass


class UnknownGroup(ComputationError):
    pass


class UnknownAssessor(ComputationError):
    pass


class ZeroVariance(ComputationError):
    pass


class PairSetMismatch(ComputationError):
    pass


class TooFewPairs(ComputationError):
    pass


class InvalidProfile(InputError):
    pass
