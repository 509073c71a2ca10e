"""Exception hierarchy shared by all modules.

Each leaf class carries the process exit code the CLI uses for it.
"""


class TVCSError(Exception):
    exit_code = 1


class ParseError(TVCSError):
    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionError(TVCSError, ValueError):
    exit_code = 4


class ScheduleError(DimensionError):
    """Schedule does not fit the network (index out of range, wrong horizon)."""


class ControllabilityError(TVCSError):
    exit_code = 5


class UncontrollableError(ControllabilityError):
    def __init__(self, horizon, lambda_min, condition):
        super().__init__(
            f"uncontrollable at horizon K={horizon}: lambda_min={lambda_min:.3e}, "
            f"condition number={condition:.3e}"
        )
        self.horizon = horizon
        self.lambda_min = lambda_min
        self.condition = condition


class DegenerateBaselineError(ControllabilityError):
    """The time-invariant optimum is zero, so the relative advantage is undefined."""


class BudgetError(TVCSError):
    exit_code = 6
