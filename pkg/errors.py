from typing import Any, Dict, Optional


class CavityPhaseError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(CavityPhaseError, ValueError):
    """A numeric input lies outside the domain of the formula."""


class PreconditionError(CavityPhaseError, ValueError):
    """Cutoffs, windows or grids do not satisfy a routine's precondition."""


class UnsupportedInputError(CavityPhaseError, ValueError):
    """The input is valid physics but the requested route cannot handle it."""


class ConfigError(CavityPhaseError, ValueError):
    """Bad configuration file or command-line combination."""


class NumericalError(CavityPhaseError, ArithmeticError):
    """Series did not converge or precision was exhausted."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{key}={value}" for key, value in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class ReportError(CavityPhaseError, OSError):
    """Writing an output file failed."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path
