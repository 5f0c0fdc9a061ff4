"""Exception hierarchy shared by the simulator and the CLI."""


class MMSimError(Exception):
    """Base error. ``exit_code`` is the CLI status used when it escapes."""

    exit_code: int = 1

    def add_context(self, text: str) -> None:
        """Attach a context line, printed by the CLI after the message."""
        if hasattr(self, "add_note"):
            self.add_note(text)
        else:
            self.__notes__ = [*getattr(self, "__notes__", []), text]


class ConfigError(MMSimError):
    """Malformed or invalid configuration, override or sweep spec."""

    exit_code = 2


class InstabilityError(MMSimError):
    """Drift matrix has an eigenvalue with nonnegative real part."""

    exit_code = 3

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin


class OutputError(MMSimError):
    """Output path could not be written."""

    exit_code = 4


class PresetError(ConfigError):
    """Unknown figure preset."""


class ParameterError(MMSimError):
    """A physics function received an argument outside its domain."""


class MeanFieldError(MMSimError):
    """The stationary amplitude system cannot be solved."""


class ConvergenceError(MeanFieldError):
    """Self-consistent loop exhausted its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class EigenSolverError(MMSimError):
    """Eigenvalue computation failed; message carries the matrix dump."""


class UnphysicalStateError(MMSimError):
    """Covariance violates the uncertainty relation."""


class SymplecticInconsistencyError(MMSimError):
    """Closed-form and spectral symplectic eigenvalues disagree."""
