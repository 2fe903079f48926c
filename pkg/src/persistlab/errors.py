"""Exception types raised across the package."""


class PersistLabError(ValueError):
    """Base class for all package errors."""


class ConfigError(PersistLabError):
    """A scenario configuration fails validation.

    ``line`` is set when the problem can be traced to a config-file line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ScenarioInconsistency(ConfigError):
    """Declared parameters violate the inequality chain a scenario relies on."""


class DegenerateInstrument(PersistLabError):
    """The instrument takes a single value in the sample."""


class WeakFirstStage(PersistLabError):
    """The first-stage difference is zero or below tolerance."""


class ConstantRegressor(PersistLabError):
    """OLS regressor has zero variance."""


class EmptyComplierSet(PersistLabError):
    """No location is labeled a complier."""


class TernaryInstrument(PersistLabError):
    """Compliance for a three-valued instrument must be asked per adjacent pair."""


class NoOracle(PersistLabError):
    """No closed form is available for this scenario."""


class EmptyProxyCell(PersistLabError):
    """One side of the proxy threshold carries no mass."""
