"""
flt-verify - exact reproductions of the computations behind asymptotic FLT criteria
"""

from .__version__ import __version__

__all__ = ["__version__"]
