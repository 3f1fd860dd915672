"""Prompt-embedding time-series classification benchmark (C++ core)."""

from ._lamper import *  # noqa: F401,F403
from ._lamper import __doc__  # noqa: F401

__version__ = "0.1.0"
