"""Hand demonstrations to dynamic movement primitives.

Thin re-export of the compiled core module.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
