"""Second-order model reduction for structural systems."""

from ._core import *  # noqa: F401,F403
from ._core import SomorError, __doc__  # noqa: F401

__version__ = "0.1.0"
