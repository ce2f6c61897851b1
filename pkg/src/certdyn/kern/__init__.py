"""Kernel selection: compiled extension core with pure-python fallback.

The hot inner loops (ball-arithmetic polynomial evaluation over pixel
grids, orbit iteration, raster window queries) have two interchangeable
implementations with bit-identical outputs:

* ``certdyn._ckern``  -- Cython/C, built by setup.py;
* ``certdyn.kern.pykern`` -- numpy / plain python.

Selection happens at import time; set ``CERTDYN_KERNEL=py`` or ``=c`` to
force one (``auto`` prefers the compiled core).
"""

import os


def _select():
    choice = os.environ.get("CERTDYN_KERNEL", "auto")
    if choice not in ("auto", "c", "py"):
        raise ValueError(f"CERTDYN_KERNEL must be auto|c|py, got {choice!r}")
    if choice in ("auto", "c"):
        try:
            from certdyn import _ckern as impl
            return impl, "c"
        except ImportError:
            if choice == "c":
                raise
    from certdyn.kern import pykern as impl
    return impl, "py"


impl, IMPL_NAME = _select()

quad_step = impl.quad_step
linquad_step = impl.linquad_step
poly_eval = impl.poly_eval
orbit_quad = impl.orbit_quad
orbit_linquad_minabs = impl.orbit_linquad_minabs
rect_any = impl.rect_any
rect_all = impl.rect_all

__all__ = [
    "IMPL_NAME", "quad_step", "linquad_step", "poly_eval", "orbit_quad",
    "orbit_linquad_minabs", "rect_any", "rect_all",
]
