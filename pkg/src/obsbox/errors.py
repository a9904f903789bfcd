"""Error taxonomy shared across the package.

Three failure classes: bad configuration (caller gave an unusable setup),
contract violations (caller broke a documented precondition), and domain
errors (inputs outside the mathematical domain of an operation). The CLI
maps each class to a distinct exit status.
"""


class ConfigurationError(ValueError):
    """A config document or construction argument is malformed."""


class ContractViolation(ValueError):
    """A documented operation precondition was broken by the caller."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the operation."""
