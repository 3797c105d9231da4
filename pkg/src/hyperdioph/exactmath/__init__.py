from .quadratic import *  # noqa: F401,F403
from .forms import *  # noqa: F401,F403
from .imagquad import *  # noqa: F401,F403
from .zeta import *  # noqa: F401,F403
from . import quadratic, forms, imagquad, zeta  # noqa: F401
