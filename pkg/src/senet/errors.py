"""Exception hierarchy shared across the package."""


class SENetError(Exception):
    """Base class for all package errors."""


class ConfigError(SENetError, ValueError):
    """Invalid configuration value or unknown configuration key."""


class DataError(SENetError, ValueError):
    """Malformed, insufficient or inconsistent data."""


class NumericalError(SENetError, ArithmeticError):
    """A numerical routine failed (non-finite values, no convergence, divergence)."""


class ConvergenceError(NumericalError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class TrainingDiverged(NumericalError):
    def __init__(self, batch, loss):
        super().__init__(f"training diverged at batch {batch}: loss={loss}")
        self.batch = batch
        self.loss = loss
