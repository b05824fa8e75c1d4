"""Cut-out Cantor sets from gap sequences: dimensions, gauges, equivalences."""
from .errors import *  # noqa: F401,F403
from .sequences import GapSequence, make_sequence, validate  # noqa: F401
from .gauges import (  # noqa: F401
    DimensionFunction, associated_function, compare, doubling_report, make_function,
)

__version__ = "0.1.0"
