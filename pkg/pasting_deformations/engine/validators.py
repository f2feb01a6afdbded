"""
Input validation utilities for command-line and project-file values
"""

import re

from sympy import isprime

COMPLEX_KINDS = ("category", "functor", "pair", "nat", "identity3", "diagram")

IDENTIFIER_PATTERN = r"[^\W\d][\w']*(?:-[\w']+)*"
_IDENTIFIER = re.compile(rf"^{IDENTIFIER_PATTERN}$")


class InputValidator:
    """
    Validation for user-supplied settings
    """

    @staticmethod
    def validate_field_spec(spec):
        """
        Validate a field specification

        Args:
            spec (str): "q" for the rationals or "fp:<p>" for a prime field

        Returns:
            tuple: (is_valid, (kind, p), error_message)
        """
        if not isinstance(spec, str) or not spec:
            return False, None, "Field must be given as 'q' or 'fp:<p>'"

        spec = spec.strip().lower()
        if spec in ("q", "qq"):
            return True, ("q", None), None

        match = re.match(r"^fp:?(\d+)$", spec)
        if not match:
            return False, None, f"Unknown field '{spec}'; use 'q' or 'fp:<p>'"

        p = int(match.group(1))
        if not isprime(p):
            return False, None, f"Field characteristic {p} is not prime"

        return True, ("fp", p), None

    @staticmethod
    def validate_window(window):
        """
        Validate a degree window

        Args:
            window (str): "lo:hi"

        Returns:
            tuple: (is_valid, (lo, hi), error_message)
        """
        if not isinstance(window, str):
            return False, None, "Window must be a string 'lo:hi'"

        match = re.match(r"^\s*(-?\d+)\s*:\s*(-?\d+)\s*$", window)
        if not match:
            return False, None, f"Malformed window '{window}'; expected 'lo:hi'"

        lo, hi = int(match.group(1)), int(match.group(2))
        if lo > hi:
            return False, None, f"Window {lo}:{hi} is empty"

        return True, (lo, hi), None

    @staticmethod
    def validate_degree(value, field_name="degree"):
        """
        Validate a nonnegative degree

        Returns:
            tuple: (is_valid, degree, error_message)
        """
        try:
            degree = int(value)
        except (TypeError, ValueError):
            return False, None, f"{field_name} must be an integer"

        if degree < 0:
            return False, None, f"{field_name} must be nonnegative"

        return True, degree, None

    @staticmethod
    def validate_order(value, max_order=None):
        """
        Validate a deformation order

        Returns:
            tuple: (is_valid, order, error_message)
        """
        is_valid, order, error = InputValidator.validate_degree(value, "order")
        if not is_valid:
            return is_valid, order, error

        if order < 1:
            return False, None, "order must be at least 1"

        if max_order is not None and order > max_order:
            return False, None, f"order {order} exceeds the configured maximum {max_order}"

        return True, order, None

    @staticmethod
    def validate_degrees(text):
        """
        Validate a degree list: "n", "lo:hi" or "a,b,c"

        Returns:
            tuple: (is_valid, list of degrees, error_message)
        """
        if not isinstance(text, str) or not text.strip():
            return False, None, "Degrees are required"

        if ":" in text:
            is_valid, window, error = InputValidator.validate_window(text)
            if not is_valid:
                return False, None, error
            return True, list(range(window[0], window[1] + 1)), None

        try:
            degrees = [int(part) for part in text.split(",")]
        except ValueError:
            return False, None, f"Malformed degree list '{text}'"

        return True, degrees, None

    @staticmethod
    def validate_identifier(name):
        """
        Validate an object, arrow or section id

        Returns:
            tuple: (is_valid, error_message)
        """
        if not isinstance(name, str) or not _IDENTIFIER.match(name):
            return False, f"Invalid identifier '{name}'"

        return True, None

    @staticmethod
    def validate_complex_kind(kind):
        """
        Validate a complex kind

        Returns:
            tuple: (is_valid, error_message)
        """
        if kind not in COMPLEX_KINDS:
            return False, f"Unknown complex kind '{kind}'; expected one of {', '.join(COMPLEX_KINDS)}"

        return True, None
