"""Optimal consumption, healthcare, and investment under Gompertz mortality.

Thin wrapper over the compiled _core module. The extension is built by the
CMake project; point PYTHONPATH at the build directory (or install the .so
next to this package) before importing.
"""

from _core import *  # noqa: F401,F403
from _core import __doc__  # noqa: F401
