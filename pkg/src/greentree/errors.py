"""Exception hierarchy shared across the library and the CLI.

The CLI maps these onto its exit-code contract: scenario problems exit
with 2, mathematical infeasibility with 3, anything unexpected with 4.
"""


class GreentreeError(Exception):
    """Base class for all library errors."""


class ScenarioError(GreentreeError):
    """The input document is malformed or violates the scenario schema."""


class InfeasibleError(GreentreeError):
    """A mathematical precondition fails (empty section space, divergent
    integral, unsupported genus, non-convex input to a convex-only
    transform, ...)."""
