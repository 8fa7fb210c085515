from typing import Any, Optional, Sequence


class Error(Exception):
    """Base class for all exceptions raised by gfsdro."""


class InvalidArgumentError(Error):
    """Raised when an argument violates an operation's precondition."""


class DimensionMismatchError(InvalidArgumentError):
    """Raised when array shapes do not agree."""

    def __init__(self, what: str, expected: Any, got: Any):
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {got}.")


class InvalidConfigError(Error):
    """Raised when a hyperparameter combination is not admissible."""


class DegenerateWeightsError(Error):
    """Raised when every particle weight is zero (all log-weights are -inf)."""

    def __init__(self):
        super().__init__("Cannot normalize weights: every log-weight is -inf.")


class DivergedSamplerError(Error):
    """Raised when a sampler produces a non-finite coordinate."""

    def __init__(self, method: str, iteration: Optional[int] = None):
        self.method = method
        self.iteration = iteration
        where = "" if iteration is None else f" at inner iteration {iteration}"
        super().__init__(f"Sampler '{method}' diverged{where}: non-finite values.")


class OptimizerFailureError(Error):
    """Raised when an inner minimisation misses its tolerance."""

    def __init__(self, iterations: int, grad_norm: float, tolerance: float):
        self.iterations = iterations
        self.grad_norm = grad_norm
        super().__init__(
            f"Inner minimisation did not converge in {iterations} iterations "
            f"(|grad| = {grad_norm:.3e} > {tolerance:.1e})."
        )


class RejectionStallError(Error):
    """Raised when rejection sampling exceeds its trial cap."""

    def __init__(self, trials: int):
        self.trials = trials
        super().__init__(f"Rejection sampler accepted nothing after {trials} trials.")


class GenerationError(Error):
    """Raised when a dataset generator cannot produce the requested sample."""


class FeatureParseError(Error):
    """Raised when a feature file is malformed."""

    def __init__(self, path: Any, line: int, reason: str):
        self.line = line
        super().__init__(f"{path}:{line}: {reason}")


class SpecValidationError(Error):
    """Raised when an experiment spec fails validation."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("Invalid experiment spec:\n  " + "\n  ".join(self.errors))


class DatasetMismatchError(InvalidArgumentError):
    """Raised when compared experiments do not share dataset and seed."""

    def __init__(self, first: str, other: str):
        super().__init__(
            f"Specs '{first}' and '{other}' do not share the same dataset and seed."
        )


class DivergedTrainingError(Error):
    """Raised when the outer iterate theta becomes non-finite."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"Outer loop diverged at step {step}: theta is non-finite.")
