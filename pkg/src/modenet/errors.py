"""Exception hierarchy shared by all modenet modules."""


class ModenetError(Exception):
    """Base class for every error raised by modenet."""


class InvalidParameterError(ModenetError, ValueError):
    """A physical parameter is outside its allowed range."""


class NotFoundError(ModenetError, KeyError):
    """A mode or port label does not exist in the network."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class DesignInfeasibleError(ModenetError, ValueError):
    """No design satisfies the requested constraints.

    ``bound`` names the violated constraint so the CLI can report it.
    """

    def __init__(self, message: str, bound: str = ""):
        super().__init__(message)
        self.bound = bound


class NoFiniteSolutionError(ModenetError, ValueError):
    """The nulling condition has no finite solution (e.g. zero detuning)."""


class DegenerateDenominatorError(ModenetError, ZeroDivisionError):
    """Forward transmission vanishes, so a transmission ratio is undefined."""


class OracleFailure(ModenetError, RuntimeError):
    """The time-domain integration did not reach a steady state."""


class CertificationFailure(ModenetError, AssertionError):
    """A numeric null certificate failed.

    Attributes
    ----------
    element : str
        Name of the offending scattering element, e.g. ``"S_a1_a2"``.
    magnitude : float
        Its magnitude (suppressed elements) or |S|^2 (circulating elements).
    """

    def __init__(self, element: str, magnitude: float, message: str = ""):
        super().__init__(message or f"{element} failed certification (value {magnitude:.3e})")
        self.element = element
        self.magnitude = magnitude


class ConfigError(ModenetError, ValueError):
    """A configuration document is malformed or contains unknown keys."""
