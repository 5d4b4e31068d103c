"""Numba acceleration switch.

The hot numeric kernels in :mod:`oosplan.kernels` are compiled with numba
by default.  Setting the environment variable ``OOSPLAN_NUMBA=0`` (or
``false``/``off``) before import selects the pure-Python/numpy fallback,
which computes identical results and is useful for debugging, coverage,
and environments without a working numba install.
"""

import os

USING_NUMBA = os.environ.get("OOSPLAN_NUMBA", "1").strip().lower() not in (
    "0", "false", "off", "no",
)

if USING_NUMBA:
    try:
        from numba import njit
    except ImportError:  # numba missing: degrade silently to the fallback
        USING_NUMBA = False

if not USING_NUMBA:
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap
