from typing import Iterable


class RsmaOutageException(Exception):
    """Base exception for rsma-outage"""


class ConfigurationError(RsmaOutageException):
    """Raised when a scenario or system configuration is invalid"""


class SchemaValidationError(ConfigurationError):
    """Raised when a scenario file does not match the scenario schema"""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"Scenario field '{field_path}': {message}")


class ValidationError(RsmaOutageException):
    """Raised when input validation fails"""


class InvalidParameterError(ValidationError):
    """Raised when an invalid parameter is provided"""

    def __init__(self, parameter_name, message):
        self.parameter_name = parameter_name
        super().__init__(f"Invalid parameter '{parameter_name}': {message}")


class AnalyticDispatchError(RsmaOutageException):
    """Raised when a closed-form case dispatch reaches an impossible guard combination"""


class InvariantViolationError(RsmaOutageException):
    """Raised when a guarded power-split or rate identity does not hold"""


class ExperimentNotFoundError(RsmaOutageException):
    """Raised when an unknown experiment is requested"""

    def __init__(self, name: str, available: Iterable[str]):
        self.name = name
        self.available = list(available)
        super().__init__(
            f"Experiment '{name}' not found. Available: {', '.join(self.available)}"
        )
