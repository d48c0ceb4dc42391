# src/core/exceptions.py
"""
Custom exception classes for the fracbubble toolkit.
Provides specific error types so the CLI can map failures to exit codes.
"""
import functools
import math


class FracBubbleException(Exception):
    """Base exception class for the toolkit"""

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        self.message = message
        self.error_code = error_code or "FRACBUBBLE_ERROR"
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self):
        """Convert exception to dictionary"""
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "error_code": self.error_code,
            "details": self.details
        }


# Domain Exceptions
class DomainException(FracBubbleException):
    """Argument outside a mathematical domain"""

    def __init__(self, message: str, quantity: str = None, value=None):
        self.quantity = quantity
        self.value = value
        details = {}
        if quantity:
            details["quantity"] = quantity
        if value is not None:
            details["value"] = value
        super().__init__(message, "DOMAIN_ERROR", details)


class AdmissibilityException(DomainException):
    """Fractional order outside the admissible window"""

    def __init__(self, N: int, s: float, window: tuple):
        message = f"s={s} is outside the admissible window ({window[0]:.12g}, {window[1]:.12g}) for N={N}"
        super().__init__(message, "s", s)
        self.error_code = "ADMISSIBILITY_ERROR"
        self.window = window
        self.details["N"] = N
        self.details["window"] = list(window)


class RegimeException(DomainException):
    """An asymptotic form was requested outside its validity regime"""

    def __init__(self, message: str, form: str = None):
        super().__init__(message, form, None)
        self.error_code = "REGIME_ERROR"


# Numeric Exceptions
class NumericException(FracBubbleException):
    """Base exception for numerical failures"""

    def __init__(self, message: str, operation: str = None):
        self.operation = operation
        details = {}
        if operation:
            details["operation"] = operation
        super().__init__(message, "NUMERIC_ERROR", details)


class AccuracyException(NumericException):
    """Quadrature refinement did not reach the target tolerance"""

    def __init__(self, operation: str, last_estimates: tuple, tolerance: float):
        message = (f"{operation} did not converge to tol={tolerance:g}; "
                   f"last estimates {last_estimates[0]!r}, {last_estimates[1]!r}")
        super().__init__(message, operation)
        self.error_code = "ACCURACY_ERROR"
        self.last_estimates = tuple(last_estimates)
        self.details["last_estimates"] = list(last_estimates)
        self.details["tolerance"] = tolerance


class DivergenceException(NumericException):
    """Radial integral diverges for the requested exponent"""

    def __init__(self, integral: str, exponent: float):
        message = f"{integral} diverges for exponent p={exponent}"
        super().__init__(message, integral)
        self.error_code = "DIVERGENCE_ERROR"
        self.details["exponent"] = exponent


class NormalizationException(NumericException):
    """The bubble identity residual exceeds its threshold"""

    def __init__(self, residual: float, threshold: float):
        message = f"bubble identity residual {residual:.3e} exceeds {threshold:.1e}; c(N,s) is inconsistent"
        super().__init__(message, "bubble_pde_residual")
        self.error_code = "NORMALIZATION_ERROR"
        self.details["residual"] = residual
        self.details["threshold"] = threshold


class SearchFailureException(NumericException):
    """Iterative search did not converge"""

    def __init__(self, message: str, iterations: int = None, last_iterate=None):
        super().__init__(message, "search")
        self.error_code = "SEARCH_FAILURE"
        if iterations is not None:
            self.details["iterations"] = iterations
        if last_iterate is not None:
            self.details["last_iterate"] = [float(v) for v in last_iterate]


class CriticalPointDomainException(SearchFailureException):
    """Critical point iterates left the half space r > 0"""

    def __init__(self, message: str, iterations: int = None, last_iterate=None):
        super().__init__(message, iterations, last_iterate)
        self.error_code = "CRITICAL_POINT_DOMAIN_ERROR"


# Usage Exceptions
class UsageException(FracBubbleException):
    """Invalid use of an operation (empty sample set, missing cutoff, bad mode)"""

    def __init__(self, message: str, argument: str = None):
        details = {"argument": argument} if argument else {}
        super().__init__(message, "USAGE_ERROR", details)


# Configuration Exceptions
class ConfigurationException(FracBubbleException):
    """Exception for configuration errors"""

    def __init__(self, message: str, config_key: str = None):
        self.config_key = config_key
        details = {}
        if config_key:
            details["config_key"] = config_key
        super().__init__(message, "CONFIG_ERROR", details)


class MissingConfigException(ConfigurationException):
    """Exception for missing configuration values"""

    def __init__(self, config_key: str):
        message = f"Missing required configuration: {config_key}"
        super().__init__(message, config_key)
        self.error_code = "MISSING_CONFIG"


class InvalidConfigException(ConfigurationException):
    """Exception for invalid configuration values"""

    def __init__(self, config_key: str, value, expected: str = None):
        message = f"Invalid configuration value for '{config_key}': {value}"
        if expected:
            message += f" (expected: {expected})"
        super().__init__(message, config_key)
        self.error_code = "INVALID_CONFIG"
        self.details["value"] = value
        if expected:
            self.details["expected"] = expected


# Verification Exceptions
class CheckFailedException(FracBubbleException):
    """An acceptance check did not pass"""

    def __init__(self, check_name: str, observed: float, threshold: float):
        message = f"check '{check_name}' failed: observed {observed:.6g}, threshold {threshold:.6g}"
        super().__init__(message, "CHECK_FAILED", {
            "check": check_name,
            "observed": observed,
            "threshold": threshold,
        })
        self.check_name = check_name


# Utility functions for exception handling
def handle_numeric_error(func):
    """Decorator converting raw floating point failures into NumericException"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except FracBubbleException:
            raise
        except (FloatingPointError, ZeroDivisionError, OverflowError) as e:
            raise NumericException(str(e), func.__name__) from e
    return wrapper


def require_finite(value: float, operation: str) -> float:
    """Raise NumericException unless value is finite"""
    if not math.isfinite(value):
        raise NumericException(f"{operation} produced a non-finite value ({value})", operation)
    return value
