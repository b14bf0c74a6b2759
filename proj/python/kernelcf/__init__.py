"""Kernel-CF: collaborative filtering as Nadaraya-Watson kernel regression
over a ForceAtlas2 layout of the user/item similarity graph."""

from ._kernelcf import *  # noqa: F401,F403
from ._kernelcf import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
