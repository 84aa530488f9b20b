from ._displab import *  # noqa: F401,F403
from ._displab import __version__  # noqa: F401
