"""Exception types shared across the package."""


class LipstabError(Exception):
    """Base class for all package errors."""


class ValidationError(LipstabError):
    """Structural invariant violated by a system/partition/perturbation."""

    def __init__(self, issues):
        if isinstance(issues, str):
            issues = [issues]
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))


class SchemaError(LipstabError):
    """A document does not conform to the lipstab-v1 schema."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class InfeasibleAnchorError(LipstabError):
    """The anchor point is not feasible for the nominal system."""


class SSCViolatedError(LipstabError):
    """An operation requiring the strong Slater condition was called without it."""


class InfeasibleRegionError(LipstabError):
    """The target feasible region is empty."""


class NonConvergentError(LipstabError):
    """An iterative method hit its cap before reaching tolerance."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class OrderingViolationError(LipstabError):
    """Sampled partition estimates broke the min <= J <= max ordering."""

    def __init__(self, message, offending=None):
        self.offending = offending or []
        super().__init__(message)


class RetryExhaustedError(LipstabError):
    """Random generation failed to meet its acceptance predicate."""


class InternalCheckError(LipstabError):
    """Two routes that must agree produced contradictory results."""
