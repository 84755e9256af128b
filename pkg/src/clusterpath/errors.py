"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: ConfigError -> 2,
DomainError -> 3, AnalysisError -> 4. Library code raises plain
ValueError only for programmer mistakes (wrong shapes, bad indices).
"""


class ConfigError(ValueError):
    """Invalid or unparseable experiment configuration."""


class DomainError(ValueError):
    """Physically meaningless request (bad reflectivity, unencodable state)."""


class UnencodableTermError(DomainError):
    """A photonic term falls outside the logical encoding.

    Carries the offending occupation vector so callers can report which
    detection event broke the dual-rail assumption.
    """

    def __init__(self, message, occupation=None):
        super().__init__(message)
        self.occupation = tuple(occupation) if occupation is not None else None


class AnalysisError(ValueError):
    """Estimation or fitting step cannot produce a result."""
