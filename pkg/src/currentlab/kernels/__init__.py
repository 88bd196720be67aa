"""Numeric kernels with a compiled core and a pure numpy fallback.

The compiled module is preferred when importable; set CURRENTLAB_PURE=1 in
the environment to force the fallback. Both expose the same functions with
matching pivot decisions, so results agree to roundoff.
"""

import os

from . import pure

if os.environ.get("CURRENTLAB_PURE"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

simplex_solve = _impl.simplex_solve
bspline_eval = _impl.bspline_eval

STATUS_OPTIMAL = pure.STATUS_OPTIMAL
STATUS_STALL = pure.STATUS_STALL
STATUS_UNBOUNDED = pure.STATUS_UNBOUNDED


def get_backend(name):
    """Return the named backend module ("pure" or "compiled"). Raises
    ImportError if the compiled module is requested but not built."""
    if name == "pure":
        return pure
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError("unknown backend %r" % (name,))
