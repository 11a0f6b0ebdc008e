"""Traveling waves for a 2-D lattice SIR model.

Thin python surface over the C++ core: dispersion relation and critical
speed, upper/lower solution envelopes, the truncated-profile fixed point,
the Lyapunov functional trace, and direct lattice simulation.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc or __doc__
