"""Default numerical tolerances.

Every value can be overridden through an environment variable named
``NESS_TOL_<NAME>`` (for example ``NESS_TOL_CIRCLE=1e-8``), read once at
import time.  A malformed variable does not break the import; it is
reported by :func:`check_environment` and by any lookup of that tolerance.
"""

import os
from contextlib import contextmanager

from .errors import ModelValidationError

_DEFAULTS = {
    # ||z| - 1| below this counts as "on the unit circle"
    "CIRCLE": 1e-9,
    # roots closer than this are merged into one root with multiplicity
    "MERGE": 1e-7,
    # radius used to count roots merging at a critical point
    "KAPPA": 1e-4,
    # Laurent coefficients below this (relative to the largest) are dropped
    "TRIM": 1e-14,
    # residual of the finite Lyapunov solve, relative to max(1, |Y|_max)
    "LYAPUNOV": 1e-10,
    # target absolute accuracy of periodic quadrature
    "QUADRATURE": 1e-12,
    # criticality / moment residuals below this are treated as zero
    "CRITICAL": 1e-9,
    # relative tolerance of the adaptive integrator
    "ODE_RTOL": 1e-9,
    # singular values below this times sigma_max count as zero
    "RANK": 1e-8,
}


def _read(name, default):
    raw = os.environ.get(f"NESS_TOL_{name}")
    if raw is None:
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ModelValidationError(f"NESS_TOL_{name} is not a number: {raw!r}") from None
    if not value > 0:
        raise ModelValidationError(f"NESS_TOL_{name} must be positive, got {raw!r}")
    return value


TOL = {}
_ENV_ERRORS = {}
for _name, _value in _DEFAULTS.items():
    try:
        TOL[_name] = _read(_name, _value)
    except ModelValidationError as _exc:
        TOL[_name] = _value
        _ENV_ERRORS[_name] = _exc


def check_environment():
    """Raise the first error found in the ``NESS_TOL_*`` variables, if any."""
    for exc in _ENV_ERRORS.values():
        raise exc


def tol(name):
    if name in _ENV_ERRORS:
        raise _ENV_ERRORS[name]
    return TOL[name]


def names():
    return tuple(_DEFAULTS)


@contextmanager
def overridden(**values):
    """Temporarily replace tolerances, e.g. ``with overridden(CIRCLE=1e-8): ...``."""
    for name, value in values.items():
        if name not in TOL:
            raise ModelValidationError(f"unknown tolerance {name!r}; known: {', '.join(TOL)}")
        if not float(value) > 0:
            raise ModelValidationError(f"tolerance {name} must be positive, got {value!r}")
    saved = dict(TOL)
    TOL.update({k: float(v) for k, v in values.items()})
    try:
        yield TOL
    finally:
        TOL.clear()
        TOL.update(saved)
