"""Exception types shared across the package."""


class HalfmassError(Exception):
    """Base class for all package errors."""


class DomainError(HalfmassError):
    """A point lies outside the chart region a field or surface expects."""


class SingularMetricError(HalfmassError):
    """A metric evaluation produced a non-positive-definite matrix."""


class AdmissionError(HalfmassError):
    """A requested metric violates the decay/positivity admission rules."""


class ConfigError(HalfmassError):
    """Malformed run configuration (unknown keys, bad values, bad flags)."""


class DegenerateMassError(HalfmassError):
    """Center of mass requested while the mass is numerically zero."""


class EvaluationError(HalfmassError):
    """A field evaluation failed at a quadrature node."""
