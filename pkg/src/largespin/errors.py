"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An operation was called outside its stated preconditions."""


class ResourceLimitError(RuntimeError):
    """A requested matrix dimension exceeds the configured budget."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""


def check_dimension(dim, budget, what="operator"):
    if dim > budget:
        raise ResourceLimitError(
            f"{what} dimension {dim} exceeds the budget of {budget}"
        )
