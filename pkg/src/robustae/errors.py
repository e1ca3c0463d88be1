"""Exception hierarchy shared across the package."""


class RobustAEError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(RobustAEError, ValueError):
    """Operands have incompatible shapes."""


class ParameterError(RobustAEError, ValueError):
    """A parameter is outside its valid range."""


class InputError(RobustAEError, ValueError):
    """Input data is unusable (too short, degenerate, wrong layout)."""


class ContractError(RobustAEError, ValueError):
    """A structural precondition (e.g. Hankel property) is violated."""


class NumericalError(RobustAEError, RuntimeError):
    """A computation produced non-finite values or failed to converge."""


class EvaluationError(RobustAEError, ValueError):
    """Metric cannot be computed (e.g. single-class labels)."""


class ConfigError(RobustAEError, ValueError):
    """A configuration file or object is invalid."""


class ParseError(RobustAEError, ValueError):
    """A data file could not be parsed."""


class FormatError(RobustAEError, ValueError):
    """A data file parses but violates the documented format."""


class IntegrityError(RobustAEError, ValueError):
    """Stored data fails its checksum."""


class UpgradeError(RobustAEError, ValueError):
    """Stored data written by an unsupported format version."""
