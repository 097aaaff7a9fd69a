"""Exception hierarchy shared by every module.

Errors fall into two families, which the CLI maps onto exit codes:
``ValidationError`` (bad input, exit 1) and ``NumericError`` (a solver
could not meet its contract, exit 2). Each error records the module that
raised it so messages stay attributable.
"""


class LabError(Exception):
    module = "dissipation_lab"

    def __init__(self, message, module=None):
        if module is not None:
            self.module = module
        super().__init__(message)

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class ValidationError(LabError, ValueError):
    pass


class NumericError(LabError, ArithmeticError):
    pass


# model
class NonPositiveParameter(ValidationError):
    module = "model"


class UnderdampedViolation(ValidationError):
    module = "model"


# dynamics
class ZeroCharge(ValidationError):
    module = "dynamics"


class StepUnderflow(NumericError):
    module = "dynamics"


# su11
class NonPositiveCasimir(ValidationError):
    module = "su11"


class NegativeIndex(ValidationError):
    module = "su11"


# langevin
class IncompatibleGrids(ValidationError):
    module = "langevin"


# quantum
class UnnormalizedInput(ValidationError):
    module = "quantum"


class InsufficientSamples(ValidationError):
    module = "quantum"


class CFLViolation(NumericError):
    module = "quantum"


class GridTooCoarse(NumericError):
    module = "quantum"


# ncplane
class DimensionTooSmall(ValidationError):
    module = "ncplane"


class ZeroDamping(ValidationError):
    module = "ncplane"


class OpenPath(ValidationError):
    module = "ncplane"


class TruncationTailTooLarge(ValidationError):
    module = "ncplane"


# spectral
class NonConvergentTail(NumericError):
    module = "spectral"


# doubling
class NonPositiveDeformation(ValidationError):
    module = "doubling"


# cli
class ConfigError(ValidationError):
    module = "cli"
