from typing import List, Optional


class CayleyError(Exception):
    """Base class for every error raised by the counting library."""


class CapacityError(CayleyError):
    """A requested computation exceeds a configured enumeration budget."""

    def __init__(self, operation: str, requested, limit, detail: Optional[str] = None):
        self.operation = operation
        self.requested = requested
        self.limit = limit
        message = f"{operation}: requested {requested} exceeds limit {limit}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class NotPrimitiveError(CayleyError, ValueError):
    pass


class NotInOpenSubsetError(CayleyError, ValueError):
    pass


class InternalInconsistencyError(CayleyError, RuntimeError):
    """A divisibility or coprimality check failed on data that should satisfy it."""


class InvalidTorsorError(CayleyError, ValueError):
    def __init__(self, violations: List[str], equations: Optional[List[str]] = None):
        self.violations = list(violations)
        self.equations = list(equations or [])
        named = [f"{v} ({e})" for v, e in zip(self.violations, self.equations)] or self.violations
        super().__init__(f"invalid torsor coordinates: {', '.join(named)}")


class BoundViolationError(CayleyError):
    """A checked bound or identity failed on a concrete input."""

    def __init__(self, check: str, details: dict):
        self.check = check
        self.details = details
        super().__init__(f"{check} violated: {details}")
