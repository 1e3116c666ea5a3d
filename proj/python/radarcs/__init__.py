"""Adaptive block-based compressed sensing for FMCW scanning radar."""

from radarcs._core import *  # noqa: F401,F403
from radarcs._core import __doc__  # noqa: F401
