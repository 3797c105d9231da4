"""Height-ordered enumerators for the arithmetic point sets, each with an
independent brute-force oracle."""

from .common import *  # noqa: F401,F403
from .rationals import *  # noqa: F401,F403
from .quadratic import *  # noqa: F401,F403
from .formheight import *  # noqa: F401,F403
from .heis import *  # noqa: F401,F403
from .chains import *  # noqa: F401,F403
