from ._tgmcmc import *  # noqa: F401,F403
