"""Exact equivariant K-theory structure constants for Kac-Moody flag varieties."""

from .errors import *  # noqa: F401,F403
from .rootdatum import *  # noqa: F401,F403
from .weyl import *  # noqa: F401,F403
from .ring import *  # noqa: F401,F403
from .engine import *  # noqa: F401,F403
from .parabolic import *  # noqa: F401,F403
from .dualizing import *  # noqa: F401,F403

__version__ = "0.1.0"
