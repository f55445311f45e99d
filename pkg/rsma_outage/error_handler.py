import logging
from typing import Any, Callable, Dict, Optional

from .exceptions import (
    ConfigurationError,
    ExperimentNotFoundError,
    RsmaOutageException,
    SchemaValidationError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_UNKNOWN_EXPERIMENT = 3


class ErrorHandler:
    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.error_callbacks: Dict[str, Callable] = {}

    def register_error_callback(self, error_type: str, callback: Callable):
        self.error_callbacks[error_type] = callback

    def handle_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> int:
        """Log the error and return the CLI exit status; unknown errors are re-raised."""
        error_type = type(error).__name__
        self.logger.error(f"Error occurred: {error_type} - {str(error)}")

        if context:
            self.logger.error(f"Context: {context}")

        if error_type in self.error_callbacks:
            self.error_callbacks[error_type](error, context)

        if isinstance(error, SchemaValidationError):
            self.logger.error(f"Offending scenario field: {error.field_path}")
            return EXIT_CONFIGURATION
        if isinstance(error, ConfigurationError):
            self.logger.error("Check the scenario file and the environment.")
            return EXIT_CONFIGURATION
        if isinstance(error, ValidationError):
            self.logger.error("Check the command-line overrides and scenario values.")
            return EXIT_CONFIGURATION
        if isinstance(error, ExperimentNotFoundError):
            self.logger.error(f"Run 'rsma-outage list' to see the {len(error.available)} available experiments.")
            return EXIT_UNKNOWN_EXPERIMENT
        if isinstance(error, RsmaOutageException):
            self.logger.error("The run stopped on an internal consistency check.")
            return EXIT_VALIDATION_FAILED

        self.logger.exception("An unexpected error occurred.")
        raise error
