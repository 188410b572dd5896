"""Exception types raised by antidual_lab."""


class AntidualError(Exception):
    """Base class for every error raised by this package."""


class NotOrthogonal(AntidualError, ValueError):
    pass


class NotUnit(AntidualError, ValueError):
    pass


class NotReal(AntidualError, ValueError):
    pass


class ChainNotNested(AntidualError, ValueError):
    pass


class ChainNeverContains(AntidualError, RuntimeError):
    pass


class NotBounded(AntidualError, ArithmeticError):
    pass


class BudgetExhausted(AntidualError, RuntimeError):
    """The fresh-index search ran past its cap without reaching the norm target."""


class IncrementalDrift(AntidualError, ArithmeticError):
    """Incremental and from-scratch approximants disagree beyond tolerance."""


class PairingMismatch(AntidualError, ArithmeticError):
    pass
