"""Exception hierarchy shared across the package.

Two broad families matter to callers: :class:`ValidationError` for inputs
that are malformed or violate a model invariant (CLI exit code 2), and
:class:`ComputationError` for failures on structurally valid inputs
(CLI exit code 3).
"""


class BloomlabError(Exception):
    """Base class for all package errors."""


class ValidationError(BloomlabError):
    """Input is malformed or violates a declared invariant."""


class ComputationError(BloomlabError):
    """A computation failed on structurally valid inputs."""


# --- network construction ---------------------------------------------------

class CycleDetected(ValidationError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle + [self.cycle[0]]))


class UnknownParent(ValidationError):
    pass


class CptShapeMismatch(ValidationError):
    pass


class RowNotNormalized(ValidationError):
    def __init__(self, node, row, total):
        self.node = node
        self.row = row
        super().__init__(f"CPT row {row} of node {node!r} sums to {total!r}, expected 1")


class DuplicateState(ValidationError):
    pass


class DuplicateNode(ValidationError):
    pass


# --- queries ----------------------------------------------------------------

class UnknownNode(ValidationError):
    pass


class UnknownState(ValidationError):
    pass


class OverlappingSets(ValidationError):
    pass


class StateSpaceTooLarge(ComputationError):
    pass


class InconsistentEvidence(ComputationError):
    """Evidence combination has zero mass under the full joint."""


class ZeroProbabilityEvidence(ComputationError):
    """Evidence combination is impossible under the model."""


# --- OOBN composition ---------------------------------------------------------

class DuplicateInstanceName(ValidationError):
    pass


class UnboundInput(ValidationError):
    def __init__(self, instance, placeholder):
        self.instance = instance
        self.placeholder = placeholder
        super().__init__(f"input {placeholder!r} of instance {instance!r} is unbound")


class StateMismatch(ValidationError):
    pass


class CycleAcrossInstances(ValidationError):
    pass


# --- dynamic networks ---------------------------------------------------------

class MissingInitialCpt(ValidationError):
    pass


class LabelCountMismatch(ValidationError):
    pass


# --- management ---------------------------------------------------------------

class MissingEmissionEntry(ValidationError):
    pass


class UnassignedSource(ValidationError):
    pass


class ThresholdOrderError(ValidationError):
    pass


class UnknownScenario(ValidationError):
    pass


class UnknownCategory(ValidationError):
    pass


class UnknownSource(ValidationError):
    pass


class EvidenceConflict(UserWarning):
    """Load-derived evidence overridden by scenario evidence (warning, not error)."""


# --- model files ----------------------------------------------------------------

class ParseError(ValidationError):
    """Document text is not syntactically valid; carries line/column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(ValidationError):
    """Document is well-formed but violates the schema; carries a field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class VersionError(ValidationError):
    pass


# --- probit regression -----------------------------------------------------------

class InsufficientRows(ValidationError):
    pass


class UnknownColumn(ValidationError):
    pass


class ZeroVarianceColumn(ValidationError):
    pass


class NumericalFailure(ComputationError):
    """Sampler produced a non-finite quantity; aborts with diagnostics."""


class DimensionMismatch(ValidationError):
    pass
