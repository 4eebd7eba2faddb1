"""Prime-orbit exponential sums, counting functions and ergodic averages."""

__version__ = "0.1.0"

from . import regvar  # noqa: F401
