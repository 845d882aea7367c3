"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the physically meaningful domain."""


class InputError(ValueError):
    """Malformed user input (grids, sweep specs, conflicting options)."""


class NuclideFormatError(ValueError):
    """A nuclide file failed schema validation or parsing."""


class UnknownNuclideError(ValueError):
    """Requested nuclide is not in the database."""

    def __init__(self, name: str, suggestions: list[str]):
        self.name = name
        self.suggestions = suggestions
        hint = ", ".join(suggestions) if suggestions else "none available"
        super().__init__(f"unknown nuclide {name!r}; known: {hint}")


class StepSizeError(ValueError):
    """Integrator step does not resolve the fastest system timescale."""


class ConvergenceError(RuntimeError):
    """A fixed-point iteration failed to converge."""
