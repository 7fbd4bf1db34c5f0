"""Exception types shared across the package."""


class ApxError(Exception):
    """Base class for package-specific failures."""


class ConfigError(ApxError):
    """Invalid configuration payload (function, matrix, modulus, or experiment)."""


class NumericError(ApxError):
    """A numerical routine failed to reach its accuracy contract."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge; carries the offending interval."""

    def __init__(self, message, interval=None):
        self.interval = interval
        if interval is not None:
            message = f"{message} (interval [{interval[0]:g}, {interval[1]:g}])"
        super().__init__(message)


class CapacityError(NumericError):
    """A quadrature plan cannot meet its tolerance within resource caps."""


class DegenerateModulusError(ConfigError):
    """Modulus vanishes on positive arguments, so no finite constant exists."""


class GateRefusal(ApxError):
    """A theorem-harness hypothesis failed; names the violated condition."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        self.detail = detail
        msg = f"hypothesis gate refused: condition {condition}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
