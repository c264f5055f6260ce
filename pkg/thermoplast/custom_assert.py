"""Checks of the invariants which hold after every accepted time step.

A stale stress cache, or a plastic strain drifting off the deviatoric
subspace, is the first sign of numerical trouble in the coupled step.
Depending on `assert_style` in the runtime configuration a violation is
logged on the thermoplast logger and the run goes on, or it stops the
run with an `AssertionError`.

"""

from typing import (  # noqa
    Any,
    Optional,
)

from .config import (
    AssertStyle,
    get_config,
    get_logger,
)


def Assert(expr, message):  # type: (Any, Optional[str]) -> None
    """Handle the invariant `expr` according to the assert style.

    Args:
        expr: The invariant, interpreted as a boolean.
        message: What was violated, and where.

    Raises:
        AssertionError: If the invariant fails and the assert style
            is `raise`.

    """
    if expr:
        return
    message = message or 'Failed invariant'
    if get_config().assert_style is AssertStyle.RAISE:
        raise AssertionError(message)
    get_logger().error('Invariant violated: %s', message)


def assert_bound(name, value, bound, step, upper=True):
    # type: (str, float, float, int, bool) -> bool
    """Check a scalar against a bound, reporting both on failure.

    Args:
        name: What the value measures.
        value: The measured value.
        bound: The bound it must respect.
        step: The time step it was measured at.
        upper: If true, the value may not exceed the bound.  Otherwise
            it may not fall below it.

    Returns:
        Whether the bound holds.

    """
    holds = value <= bound if upper else value >= bound
    Assert(holds, '{} = {:.3e} {} {:.3e} at step {}'.format(
        name, value, '>' if upper else '<', bound, step,
    ))
    return holds
