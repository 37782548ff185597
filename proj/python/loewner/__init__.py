"""Loewner-framework modeling toolkit.

The heavy lifting lives in the _loewner extension module built by CMake;
add the build directory to PYTHONPATH (or install the wheel) so it imports.
"""

try:
    from _loewner import *  # noqa: F401,F403
    from _loewner import __doc__  # noqa: F401
except ImportError as exc:  # pragma: no cover
    raise ImportError(
        "the _loewner extension is not importable; build the project with "
        "cmake and put the directory containing _loewner*.so on PYTHONPATH"
    ) from exc
