# utils/errors.py
from typing import Optional


class QuakeSegError(Exception):
    """Base class for every error raised by the pipeline."""

    exit_code = 1


class ConfigError(QuakeSegError):
    exit_code = 2


class SceneSpecError(ConfigError):
    """Synthetic scene layout does not tile the scene or has invalid spectra."""


class ArgumentError(QuakeSegError, ValueError):
    exit_code = 2


class DataError(QuakeSegError):
    exit_code = 3


class RasterFormatError(DataError):
    """Malformed QRAS/PGM header."""


class RasterTruncationError(DataError):
    """Payload length does not match the header-declared dimensions."""


class RasterWriteError(DataError):
    pass


class StratificationError(DataError):
    pass


class PublishError(DataError):
    """Staged outputs could not be moved into the output directory."""


class DegenerateInputError(QuakeSegError, ValueError):
    exit_code = 3


class DegenerateRegionError(DegenerateInputError):
    """Region has no valid co-occurrence pair."""


class OutOfDomainError(DegenerateInputError):
    """Pixel too close to the border for the requested neighborhood."""


class NumericalError(QuakeSegError):
    exit_code = 4


class DivergenceError(NumericalError):
    def __init__(self, epoch: int, loss: float, what: str = "training"):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"{what} diverged at epoch {epoch} (loss={loss})")


class StageError(QuakeSegError):
    """Raised by the pipeline when a stage fails; keeps the original cause."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")

    @property
    def exit_code(self) -> int:  # type: ignore[override]
        return exit_code_for(self.cause)


def exit_code_for(exc: Optional[BaseException]) -> int:
    if isinstance(exc, QuakeSegError):
        return exc.exit_code
    return 1
