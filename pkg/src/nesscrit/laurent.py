"""Laurent polynomials in ``z`` and polynomial helpers for clustered roots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tolerances import tol


@dataclass(frozen=True)
class LaurentPolynomial:
    """``sum_k coeffs[k] z^(kmin + k)``."""

    coeffs: np.ndarray
    kmin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=complex)))
        object.__setattr__(self, "kmin", int(self.kmin))

    @classmethod
    def from_dict(cls, mapping) -> "LaurentPolynomial":
        mapping = {int(k): complex(v) for k, v in dict(mapping).items()}
        if not mapping:
            return cls(np.zeros(1), 0)
        lo, hi = min(mapping), max(mapping)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in mapping.items():
            c[k - lo] += v
        return cls(c, lo)

    @classmethod
    def monomial(cls, k: int, value: complex = 1.0) -> "LaurentPolynomial":
        return cls(np.array([value]), k)

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.coeffs) - 1

    def to_dict(self) -> dict:
        return {self.kmin + i: complex(c) for i, c in enumerate(self.coeffs) if c != 0}

    def coefficient(self, k: int) -> complex:
        i = k - self.kmin
        return complex(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0j

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def trimmed(self, rel: float | None = None) -> "LaurentPolynomial":
        """Drop coefficients below ``rel`` times the largest one, then strip zero ends."""
        rel = tol("TRIM") if rel is None else rel
        c = self.coeffs.copy()
        big = np.abs(c).max(initial=0.0)
        if big == 0:
            return LaurentPolynomial(np.zeros(1), 0)
        c[np.abs(c) < rel * big] = 0
        nz = np.flatnonzero(c)
        return LaurentPolynomial(c[nz[0] : nz[-1] + 1], self.kmin + nz[0])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        # Horner on the positive-power part, then shift
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc * z ** self.kmin

    def on_circle(self, phi):
        phi = np.asarray(phi, dtype=float)
        k = self.kmin + np.arange(len(self.coeffs))
        return np.exp(1j * phi[..., None] * k) @ self.coeffs

    def derivative_on_circle(self, phi, order: int = 1):
        """``d^order/dphi^order`` of ``self(e^{i phi})``."""
        phi = np.asarray(phi, dtype=float)
        k = self.kmin + np.arange(len(self.coeffs))
        return np.exp(1j * phi[..., None] * k) @ (self.coeffs * (1j * k) ** order)

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial(np.array([other]), 0)
        lo = min(self.kmin, other.kmin)
        hi = max(self.kmax, other.kmax)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.kmin - lo : self.kmin - lo + len(self.coeffs)] += self.coeffs
        c[other.kmin - lo : other.kmin - lo + len(other.coeffs)] += other.coeffs
        return LaurentPolynomial(c, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(-self.coeffs, self.kmin)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            return LaurentPolynomial(np.convolve(self.coeffs, other.coeffs), self.kmin + other.kmin)
        return LaurentPolynomial(self.coeffs * other, self.kmin)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = LaurentPolynomial(np.array([1.0]), 0)
        for _ in range(int(n)):
            out = out * self
        return out

    def cleared(self) -> tuple[np.ndarray, int]:
        """Ordinary polynomial coefficients (lowest power first) and the shift ``kmin``."""
        t = self.trimmed()
        return t.coeffs.copy(), t.kmin


# ---------------------------------------------------------------------------
# polynomial helpers; coefficient arrays are lowest power first


def taylor_coefficients(coeffs: np.ndarray, a: complex, order: int) -> np.ndarray:
    """First ``order`` Taylor coefficients ``P^(j)(a)/j!`` via repeated synthetic division."""
    c = np.array(coeffs[::-1], dtype=complex)  # highest first
    out = []
    for _ in range(order):
        if len(c) == 0:
            out.append(0j)
            continue
        acc = np.empty_like(c)
        acc[0] = c[0]
        for i in range(1, len(c)):
            acc[i] = acc[i - 1] * a + c[i]
        out.append(acc[-1])
        c = acc[:-1]
    return np.array(out, dtype=complex)


def poly_eval(coeffs: np.ndarray, z):
    return np.polynomial.polynomial.polyval(z, coeffs)


def _scale(coeffs: np.ndarray, a: complex) -> float:
    deg = len(coeffs) - 1
    return float(np.abs(coeffs).sum() * max(1.0, abs(a)) ** deg)


def _single_linkage(points: np.ndarray, radius: float) -> list:
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) < radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _is_multiple_root(coeffs, center, k, rel) -> bool:
    t = taylor_coefficients(coeffs, center, k)
    return bool(np.abs(t).max() <= rel * _scale(coeffs, center))


def _refine_multiple(coeffs, center, k, iters: int = 8):
    """Newton on the (k-1)-th derivative, whose root at a k-fold zero is simple."""
    if k == 1:
        target = np.asarray(coeffs, dtype=complex)
    else:
        target = np.polynomial.polynomial.polyder(coeffs, k - 1)
    dtarget = np.polynomial.polynomial.polyder(target)
    z = center
    best = abs(poly_eval(target, z))
    for _ in range(iters):
        dz = poly_eval(dtarget, z)
        if dz == 0:
            break
        z_new = z - poly_eval(target, z) / dz
        val = abs(poly_eval(target, z_new))
        if not np.isfinite(val) or val >= best or abs(z_new - center) > 1e-2 * max(1.0, abs(center)):
            break
        z, best = z_new, val
    return complex(z)


def cluster_roots(coeffs: np.ndarray, roots=None, merge: float | None = None, search: float = 0.1,
                  rel: float = 1e-12) -> list:
    """Roots of a polynomial as ``[(center, multiplicity)]``.

    Companion-matrix roots of a ``k``-fold zero scatter by about ``eps^(1/k)``.
    Candidate groups found by single linkage within ``search`` are accepted
    as one root when the first ``k`` Taylor coefficients vanish at their
    centroid; otherwise they are split with a ten times smaller radius,
    down to ``merge`` where grouping is unconditional.  Centers are polished
    with Newton steps on the appropriate derivative.
    """
    merge = tol("MERGE") if merge is None else merge
    coeffs = np.asarray(coeffs, dtype=complex)
    if roots is None:
        if len(coeffs) <= 1:
            return []
        roots = np.roots(coeffs[::-1])
    roots = np.asarray(roots, dtype=complex)
    out = []

    def split(idx, radius):
        pts = roots[idx]
        if len(idx) == 1:
            out.append((complex(pts[0]), 1))
            return
        center = complex(pts.mean())
        if radius <= merge * 1.001 or _is_multiple_root(coeffs, center, len(idx), rel):
            out.append((center, len(idx)))
            return
        for sub in _single_linkage(pts, radius / 10):
            split([idx[i] for i in sub], radius / 10)

    for group in _single_linkage(roots, search):
        split(group, search)
    polished = [(_refine_multiple(coeffs, c, k), k) for c, k in out]
    return sorted(polished, key=lambda ck: (abs(ck[0]), math.atan2(ck[0].imag, ck[0].real)))
