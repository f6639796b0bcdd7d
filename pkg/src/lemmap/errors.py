"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid boundary description or discretization request."""


class SolverError(RuntimeError):
    """A linear or nonlinear solve failed or did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SpecError(ValueError):
    """Malformed problem specification (JSON schema, file contents)."""
