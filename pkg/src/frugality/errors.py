"""Exception hierarchy shared by all modules."""


class FrugalityError(Exception):
    """Base class for every error raised by this package."""


class CapExceeded(FrugalityError):
    """An enumeration or search exceeded its configured budget."""


class NoFeasibleSet(FrugalityError):
    pass


class EmptyFamily(NoFeasibleSet):
    """A family given by its members has no members."""


class MonopolyDetected(FrugalityError):
    """Some agent belongs to every feasible set."""


class NotAVertexCover(FrugalityError):
    pass


class NotAMatroid(FrugalityError):
    pass


class NotAWinner(FrugalityError):
    pass


class NotMonotone(FrugalityError):
    pass


class ThresholdSearchFailed(FrugalityError):
    """Threshold search did not close its bracket within the depth budget."""


class DimensionMismatch(FrugalityError):
    pass


class UnboundedFlow(FrugalityError):
    pass


class InfeasibleBase(FrugalityError):
    pass


class AuditFailed(FrugalityError):
    pass


class UnknownInstance(FrugalityError):
    pass


class UnsatisfiableParams(FrugalityError):
    pass


class InstanceFormatError(FrugalityError):
    """Malformed instance document; carries an optional line/column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class TransferCheckFailed(FrugalityError):
    """A cost-vector transform did not reproduce the expected ratio transfer."""


class BoundChainViolated(FrugalityError):
    pass
