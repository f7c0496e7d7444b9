"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operand shapes do not conform to an operation."""


class AliasingError(ValueError):
    """A frequency at or above the grid's Nyquist limit was requested."""


class MalformedStreamError(ValueError):
    """A checkpoint byte stream could not be decoded."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ConfigError(ValueError):
    """A training or CLI configuration violates a constraint."""


class TrainingDiverged(ArithmeticError):
    """Loss or gradients became non-finite during training."""

    def __init__(self, step: int, what: str = "loss"):
        super().__init__(f"training diverged: non-finite {what} at step {step}")
        self.step = step
