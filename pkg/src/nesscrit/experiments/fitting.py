"""Power-law fits of the inverse correlation length and damping gap."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import FitWindowError

DEFAULT_WINDOW = (1e-4, 1e-2)
MIN_POINTS = 6


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares line through ``log(ordinate)`` vs ``log|p - p_c|``."""

    quantity: str
    exponent: float
    intercept: float
    stderr: float
    window: tuple
    abscissa: np.ndarray
    ordinate: np.ndarray
    lam: float | None = None

    @property
    def n_points(self) -> int:
        return len(self.abscissa)

    @property
    def z(self) -> float | None:
        """Dynamical exponent ``slope / lambda`` for gap fits."""
        return None if self.lam is None else self.exponent / self.lam

    def to_json(self) -> dict:
        out = {
            "quantity": self.quantity,
            "exponent": self.exponent,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "window": list(self.window),
            "points": self.n_points,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
            out["z"] = self.z
        return out


def fit_power_law(p, y, p_c: float, window=DEFAULT_WINDOW, quantity: str = "y", lam: float | None = None) -> ExponentFit:
    """Fit ``y ~ A |p - p_c|^k`` over ``window[0] <= |p - p_c| <= window[1]``."""
    lo, hi = window
    if not 0 < lo < hi:
        raise FitWindowError(f"fit window must satisfy 0 < lo < hi, got {window}")
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    x = np.abs(p - p_c)
    rel = 1e-9  # keep points sitting on the window edges
    mask = (x >= lo * (1 - rel)) & (x <= hi * (1 + rel)) & np.isfinite(y) & (y > 0)
    if mask.sum() < MIN_POINTS:
        raise FitWindowError(f"only {int(mask.sum())} usable points in window {window}; need {MIN_POINTS}")
    lx, ly = np.log(x[mask]), np.log(y[mask])
    res = stats.linregress(lx, ly)
    stderr = float(res.stderr) if math.isfinite(res.stderr) else 0.0
    return ExponentFit(quantity, float(res.slope), float(res.intercept), stderr, (lo, hi),
                       x[mask], y[mask], lam)


def fit_static_exponent(result, p_c: float, window=DEFAULT_WINDOW) -> ExponentFit:
    """``lambda`` from ``xi^{-1} ~ |p - p_c|^lambda``."""
    return fit_power_law(result.p, result.xi_inv, p_c, window, "xi_inv")


def fit_dynamical_exponent(result, p_c: float, lam: float, window=DEFAULT_WINDOW) -> ExponentFit:
    """``kappa_c * lambda`` from ``Delta ~ |p - p_c|^{kappa_c lambda}``; ``z = slope / lambda``."""
    if not lam > 0:
        raise FitWindowError(f"lambda must be positive, got {lam}")
    return fit_power_law(result.p, result.gap, p_c, window, "gap", lam)
