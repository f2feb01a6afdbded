"""
Engine errors, their JSON log records and the mapping to failed reports
"""

import functools
import json
import logging
import traceback
import uuid
from datetime import datetime

logger = logging.getLogger(__name__)


class EngineError(Exception):
    """Base engine error class"""

    def __init__(self, message, exit_code=1, error_code=None, details=None):
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code or f"ERROR_{exit_code}"
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(EngineError):
    """Raised when a structure fails its axioms"""

    def __init__(self, message=None, findings=None):
        message = message or "Validation failed"
        details = {"findings": list(findings)} if findings else {}
        super().__init__(message, exit_code=1, error_code="VALIDATION_ERROR", details=details)


class ParseError(EngineError):
    """Error in a project file, with line and section diagnostics"""

    def __init__(self, message=None, line=None, section=None):
        message = message or "Could not parse project file"
        details = {}
        if line is not None:
            details["line"] = line
        if section:
            details["section"] = section
        super().__init__(message, exit_code=2, error_code="PARSE_ERROR", details=details)
        self.line = line
        self.section = section

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.section:
            where.append(f"in {self.section}")
        if where:
            return f"{self.message} ({', '.join(where)})"
        return self.message


class ConfigurationError(EngineError):
    """Error for configuration-related issues"""

    def __init__(self, message=None):
        message = message or "Invalid engine configuration"
        super().__init__(message, exit_code=2, error_code="CONFIG_ERROR")


class DimensionMismatchError(EngineError):
    """Matrix and vector shapes do not agree"""

    def __init__(self, message=None, expected=None, actual=None):
        message = message or "Dimension mismatch"
        details = {"expected": expected, "actual": actual} if expected is not None else {}
        super().__init__(message, exit_code=1, error_code="DIMENSION_MISMATCH", details=details)


class CompositionError(EngineError):
    """Arrows, functors, natural transformations or faces do not compose"""

    def __init__(self, message=None):
        message = message or "Not composable"
        super().__init__(message, exit_code=1, error_code="COMPOSITION_ERROR")


class ContextMismatchError(EngineError):
    """Cochains live over different functor pairs"""

    def __init__(self, message=None):
        message = message or "Cochain contexts do not match"
        super().__init__(message, exit_code=1, error_code="CONTEXT_MISMATCH")


class DegreeCapError(EngineError):
    """A cochain degree above the configured maximum was requested"""

    def __init__(self, degree, max_degree):
        super().__init__(
            f"Hochschild degree {degree} exceeds the configured maximum {max_degree}",
            exit_code=1,
            error_code="DEGREE_CAP",
            details={"degree": degree, "max_degree": max_degree},
        )


class WindowError(EngineError):
    """The assembled degree window is too small for the requested computation"""

    def __init__(self, message=None, window=None, degree=None):
        message = message or "Degree window too small"
        details = {"window": list(window) if window else None, "degree": degree}
        super().__init__(message, exit_code=1, error_code="WINDOW_ERROR", details=details)


class DeformationError(EngineError):
    """A deformation is invalid for the requested operation"""

    def __init__(self, message=None, findings=None):
        message = message or "Deformation error"
        details = {"findings": list(findings)} if findings else {}
        super().__init__(message, exit_code=1, error_code="DEFORMATION_ERROR", details=details)


class ErrorLogger:
    """
    Error logging utility
    """

    @staticmethod
    def log_error(error, context=None, config=None):
        """
        Log error with context information

        Args:
            error (Exception): The error to log
            context (dict): Additional context information
            config (dict): Active engine config; defaults when None
        """
        from pasting_deformations.config.engine_settings import is_logging_enabled

        if not is_logging_enabled("errors", config):
            return
        try:
            error_data = {
                "timestamp": datetime.now().isoformat(),
                "error_type": type(error).__name__,
                "error_message": str(error),
            }

            if isinstance(error, EngineError):
                error_data["error_code"] = error.error_code
                error_data["details"] = error.details

            if context:
                error_data["context"] = context

            if error.__traceback__ is not None:
                error_data["stack_trace"] = traceback.format_exception(
                    type(error), error, error.__traceback__
                )

            logger.error(json.dumps(error_data, indent=2, default=str))

        except Exception as logging_error:
            logger.error("Error logging failed: %s", logging_error)
            logger.error("Original error: %s", error)


class ErrorReportFormatter:
    """
    Turns errors into failed reports
    """

    @staticmethod
    def format_validation_error(command, findings, general_message=None):
        from pasting_deformations.engine.utils import create_report

        return create_report(
            command,
            success=False,
            message=general_message or "Validation failed",
            findings=findings,
            exit_code=1,
            errors={"error_type": "validation_error", "error_count": len(findings)},
        )

    @staticmethod
    def format_parse_error(command, error):
        from pasting_deformations.engine.utils import create_report

        return create_report(
            command,
            success=False,
            message=str(error),
            exit_code=2,
            errors={"error_type": "parse_error", **error.details},
        )

    @staticmethod
    def format_internal_error(command, error_message, error_id):
        from pasting_deformations.engine.utils import create_report

        return create_report(
            command,
            success=False,
            message=f"Internal error: {error_message} (Error ID: {error_id})",
            exit_code=1,
            errors={"error_type": "internal_error", "error_id": error_id},
        )


def handle_engine_error(func):
    """
    Decorator mapping engine errors to failed reports

    The wrapped function receives the command echo as its first argument and
    returns a Report; on failure a Report with the matching exit code is
    returned instead of raising. A function that has loaded its engine config
    attaches it to the exception as `engine_config`, so the project's logging
    switches apply to the error log.
    """

    @functools.wraps(func)
    def wrapper(command, *args, **kwargs):
        try:
            return func(command, *args, **kwargs)

        except ValidationError as e:
            ErrorLogger.log_error(e, {"function": func.__name__}, _config_of(e))
            return ErrorReportFormatter.format_validation_error(
                command, e.details.get("findings", []), e.message
            )

        except (ParseError, ConfigurationError) as e:
            ErrorLogger.log_error(e, {"function": func.__name__}, _config_of(e))
            return ErrorReportFormatter.format_parse_error(command, e)

        except EngineError as e:
            ErrorLogger.log_error(e, {"function": func.__name__}, _config_of(e))
            from pasting_deformations.engine.utils import create_report

            return create_report(
                command,
                success=False,
                message=e.message,
                findings=e.details.get("findings", []),
                exit_code=e.exit_code,
                errors={"error_type": e.error_code.lower(), "details": e.details},
            )

        except Exception as e:
            error_id = str(uuid.uuid4())
            ErrorLogger.log_error(e, {"function": func.__name__, "error_id": error_id}, _config_of(e))
            return ErrorReportFormatter.format_internal_error(command, str(e), error_id)

    return wrapper


def _config_of(error):
    return getattr(error, "engine_config", None)
