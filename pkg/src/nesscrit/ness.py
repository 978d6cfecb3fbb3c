"""Steady-state correlations: finite Lyapunov solves, time evolution, symbol space.

Correlation conventions
-----------------------
``Gamma_jk = (i/2) <[w_j, w_k]>`` is real antisymmetric and the two-point
function is ``<w_j w_k> = delta_jk - i Gamma_jk``.  The occupation of site
``j`` is ``<c_j^dag c_j> = (1 - Gamma_{2j, 2j+1}) / 2`` (vacuum: ``Gamma_{2j,2j+1} = 1``).

The correlation symbol ``gamma(phi)`` is the symbol of ``-i Gamma``, i.e.

    <w_(0,alpha) w_(d,beta)> = (1/2pi) int_0^{2pi} e^{i phi d} gamma_{alpha beta}(phi) dphi,   d != 0,

which makes ``gamma`` Hermitian with eigenvalues in ``[-1, 1]`` and
``gamma(-phi) = -gamma(phi)^T``.  Profiles report ``<w w> = 1`` at ``d = 0``
for equal species.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateSteadyStateError,
    IntegrationError,
    ModelValidationError,
    NumericalError,
    QuadratureToleranceError,
)
from .model import DampingMatrices, LatticeModel, build_symbol_matrices, reservoir_symbol
from .tolerances import tol

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrelationMatrix:
    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
            raise ModelValidationError(f"correlation matrix must be 2L x 2L, got shape {g.shape}")
        if np.iscomplexobj(g):
            if np.abs(g.imag).max(initial=0.0) > 1e-9 * max(1.0, np.abs(g).max()):
                raise ModelValidationError("correlation matrix must be real")
            g = g.real
        g = 0.5 * (g - g.T)
        object.__setattr__(self, "gamma", g)

    @property
    def L(self) -> int:
        return self.gamma.shape[0] // 2

    def two_point(self) -> np.ndarray:
        """``<w_j w_k>``."""
        return np.eye(2 * self.L) - 1j * self.gamma

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of ``i Gamma`` (real, in ``[-1, 1]`` for a physical state)."""
        return np.linalg.eigvalsh(1j * self.gamma)

    @classmethod
    def vacuum(cls, L: int) -> "CorrelationMatrix":
        return cls(np.kron(np.eye(L), np.array([[0.0, 1.0], [-1.0, 0.0]])))

    @classmethod
    def filled(cls, L: int) -> "CorrelationMatrix":
        return cls(np.kron(np.eye(L), np.array([[0.0, -1.0], [1.0, 0.0]])))

    @classmethod
    def mixed(cls, L: int) -> "CorrelationMatrix":
        return cls(np.zeros((2 * L, 2 * L)))


@dataclass(frozen=True)
class SymbolMatrix:
    """Correlation symbol ``gamma(phi)``.

    ``evaluate`` maps an array of momenta to ``(..., 2, 2)`` matrices.
    ``fraction`` optionally holds closed forms per entry, keyed ``(alpha, beta)``.
    ``degenerate`` marks models whose even sector is undamped; the returned
    symbol is then the Hamiltonian-lifted one (odd block copied onto the even block).
    """

    evaluate: Callable
    fraction: dict = field(default_factory=dict)
    degenerate: bool = False

    def __call__(self, phi):
        return self.evaluate(np.asarray(phi, dtype=float))


@dataclass(frozen=True)
class CorrelationProfile:
    distances: np.ndarray
    values: np.ndarray
    entry: tuple = (0, 0)
    achieved_error: float = 0.0
    method: str = ""

    def rows(self):
        for d, v in zip(self.distances, self.values):
            yield int(d), float(v.real), float(v.imag)


# ---------------------------------------------------------------------------
# finite chains


def _check_solvable(X: np.ndarray, rel: float = 1e-11):
    mu = np.linalg.eigvals(X)
    scale = max(1.0, np.abs(mu).max(initial=0.0))
    sums = np.abs(mu[:, None] + mu[None, :])
    a, b = np.unravel_index(np.argmin(sums), sums.shape)
    if sums[a, b] < rel * scale:
        return (complex(mu[a]), complex(mu[b]))
    return None


def is_block_circulant(A: np.ndarray, atol: float = 1e-13) -> bool:
    n = A.shape[0]
    if n < 4:
        return True
    shifted = np.roll(np.roll(A, 2, axis=0), 2, axis=1)
    return bool(np.abs(shifted - A).max() <= atol * max(1.0, np.abs(A).max()))


def _solve_circulant(dm: DampingMatrices) -> np.ndarray:
    L = dm.L
    first_x = dm.X[0:2, :].reshape(2, L, 2).transpose(1, 0, 2)
    first_y = dm.Y[0:2, :].reshape(2, L, 2).transpose(1, 0, 2)
    xk = np.fft.fft(first_x, axis=0)
    yk = np.fft.fft(first_y, axis=0)
    xk_minus = xk[(-np.arange(L)) % L]
    G = _sylvester_2x2(np.swapaxes(xk_minus, -1, -2), xk, yk)
    first = np.fft.ifft(G, axis=0)  # first[d] = Gamma_{(0,.),(d,.)}
    gamma = np.empty((2 * L, 2 * L), dtype=complex)
    for j in range(L):
        idx = (np.arange(L) - j) % L
        gamma[2 * j : 2 * j + 2, :] = first[idx].transpose(1, 0, 2).reshape(2, 2 * L)
    return gamma.real


def _solve_degenerate_zero(dm: DampingMatrices) -> np.ndarray:
    X = dm.X
    if np.abs(X - X.T).max() > 1e-12 * max(1.0, np.abs(X).max()):
        raise DegenerateSteadyStateError("degenerate='zero' needs a symmetric X (no Hamiltonian)")
    mu, V = np.linalg.eigh(X)
    Yt = V.T @ dm.Y @ V
    denom = mu[:, None] + mu[None, :]
    scale = max(1.0, np.abs(mu).max())
    dark = np.abs(denom) < 1e-11 * scale
    if np.abs(Yt[dark]).max(initial=0.0) > 1e-10 * max(1.0, np.abs(dm.Y).max()):
        raise DegenerateSteadyStateError("steady-state equation is inconsistent on the undamped subspace")
    G = np.where(dark, 0.0, Yt / np.where(dark, 1.0, denom))
    return V @ G @ V.T


def lyapunov_residual(dm: DampingMatrices, gamma: np.ndarray) -> float:
    return float(np.abs(dm.X.T @ gamma + gamma @ dm.X - dm.Y).max())


def solve_lyapunov_finite(dm: DampingMatrices, method: str = "auto", degenerate: str = "raise") -> CorrelationMatrix:
    """Steady state ``X^T Gamma + Gamma X = Y`` of a finite chain.

    ``method``: ``"dense"`` (Bartels-Stewart), ``"circulant"`` (per-momentum
    2x2 solves, needs block-circulant X and Y) or ``"auto"`` (circulant for
    translation-invariant chains with L > 64, dense otherwise).
    ``degenerate``: ``"raise"`` or ``"zero"``; the latter sets correlations on
    the undamped subspace to zero instead of failing.
    """
    X, Y = dm.X, dm.Y
    pair = _check_solvable(X)
    if pair is not None and degenerate == "raise":
        raise DegenerateSteadyStateError(
            f"Sylvester operator is singular: eigenvalues {pair[0]:.3e} and {pair[1]:.3e} of X sum to zero",
            pair=pair,
        )
    if pair is not None:
        gamma = _solve_degenerate_zero(dm)
    else:
        if method == "auto":
            method = "circulant" if dm.L > 64 and is_block_circulant(X) and is_block_circulant(Y) else "dense"
        if method == "circulant":
            if not (is_block_circulant(X) and is_block_circulant(Y)):
                raise ModelValidationError("circulant method needs a translation-invariant periodic chain")
            gamma = _solve_circulant(dm)
        elif method == "dense":
            gamma = spla.solve_sylvester(X.T, X, Y)
        else:
            raise ValueError(f"unknown method {method!r}")
    gamma = 0.5 * (gamma - gamma.T)
    res = lyapunov_residual(dm, gamma)
    if pair is None and res > tol("LYAPUNOV") * max(1.0, np.abs(Y).max()):
        raise NumericalError(f"Lyapunov residual {res:.3e} above tolerance")
    return CorrelationMatrix(gamma)


def evolve_finite(dm: DampingMatrices, gamma0: CorrelationMatrix, t: float, dt: float | None = None,
                  method: str = "rk", rtol: float | None = None) -> CorrelationMatrix:
    """Integrate ``dGamma/dt = X^T Gamma + Gamma X - Y`` from ``gamma0`` up to time ``t``.

    ``method="rk"`` uses adaptive DOP853 stepping (``dt`` is the first step);
    ``method="expm"`` uses the exact propagator around the steady state.
    """
    if dt is not None and not dt > 0:
        raise ValueError("dt must be positive")
    if t == 0:
        return gamma0
    X, Y = dm.X, dm.Y
    if method == "expm":
        ss = solve_lyapunov_finite(dm).gamma
        E = spla.expm(X * t)
        return CorrelationMatrix(ss + E.T @ (gamma0.gamma - ss) @ E)
    if method != "rk":
        raise ValueError(f"unknown method {method!r}")
    n = X.shape[0]

    def rhs(_, v):
        G = v.reshape(n, n)
        return (X.T @ G + G @ X - Y).ravel()

    rtol = tol("ODE_RTOL") if rtol is None else rtol
    sol = solve_ivp(rhs, (0.0, t), gamma0.gamma.ravel(), method="DOP853", rtol=rtol,
                    atol=rtol * 1e-3, first_step=dt)
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    return CorrelationMatrix(sol.y[:, -1].reshape(n, n))


# ---------------------------------------------------------------------------
# infinite chains


def _sylvester_2x2(A: np.ndarray, B: np.ndarray, C: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Batched solve of ``A G + G B = C`` for 2x2 blocks; singular points give NaN."""
    eye = np.eye(2)
    T = np.einsum("...ij,kl->...ikjl", A, eye) + np.einsum("ij,...lk->...ikjl", eye, B)
    T = T.reshape(A.shape[:-2] + (4, 4))
    rhs = C.reshape(C.shape[:-2] + (4,))
    sv = np.linalg.svd(T, compute_uv=False)
    singular = sv[..., -1] <= rel * np.maximum(sv[..., 0], 1.0)
    Tsafe = np.where(singular[..., None, None], np.eye(4), T)
    G = np.linalg.solve(Tsafe, rhs[..., None])[..., 0].reshape(C.shape)
    G[singular] = np.nan
    return G


def degenerate_even_sector(model: LatticeModel) -> bool:
    """Odd-only generators without a Hamiltonian leave the even Majoranas undamped."""
    return model.is_odd_only and model.hamiltonian is None


def odd_only_symbol(generators, phi) -> np.ndarray:
    """Scalar ``(r(phi) - r(-phi)) / (r(phi) + r(-phi))`` summed over reservoir families."""
    phi = np.asarray(phi, dtype=float)
    rp = sum(reservoir_symbol(g, phi) for g in generators)
    rm = sum(reservoir_symbol(g, -phi) for g in generators)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (rp - rm) / (rp + rm)


def solve_symbol_pointwise(model: LatticeModel, phi) -> np.ndarray:
    """``gamma(phi)`` from the 2x2 Sylvester equation ``x(-phi)^T G + G x(phi) = y(phi)``.

    ``G`` is the symbol of ``Gamma``; the returned matrix is ``-i G``.
    Singular momenta come back as NaN.  For odd-only generators without a
    Hamiltonian the even sector is undamped; the odd block is solved and the
    Hamiltonian-lifted result ``gamma_11 * identity`` is returned.
    """
    if model.is_finite:
        model = model.infinite()
    phi = np.asarray(phi, dtype=float)
    if degenerate_even_sector(model):
        s = odd_only_symbol(model.generators, phi)
        return s[..., None, None] * np.eye(2)
    x, y = build_symbol_matrices(model, phi)
    xm, _ = build_symbol_matrices(model, -phi)
    G = _sylvester_2x2(np.swapaxes(xm, -1, -2), x, y)
    gamma = -1j * G
    herm = 0.5 * (gamma + np.conj(np.swapaxes(gamma, -1, -2)))
    dev = np.abs(herm - gamma)
    ok = np.isfinite(dev)
    if ok.any() and dev[ok].max() > 1e-8 * max(1.0, np.abs(gamma[ok]).max()):
        raise NumericalError(f"symbol solution violates Hermiticity by {dev[ok].max():.2e}")
    return herm


def model_symbol(model: LatticeModel) -> SymbolMatrix:
    """Correlation symbol of an infinite model (closed form for odd-only reservoirs)."""
    if degenerate_even_sector(model):
        log.info("odd-only reservoirs without Hamiltonian: even sector undamped, using lifted symbol")
        from .criticality import model_symbol_fraction

        frac = model_symbol_fraction(model)
        return SymbolMatrix(lambda phi: solve_symbol_pointwise(model, phi),
                            fraction={(0, 0): frac, (1, 1): frac}, degenerate=True)
    return SymbolMatrix(lambda phi: solve_symbol_pointwise(model, phi))


def _trapezoid(values_fn, n: int, dmax: int, shifted: bool):
    k = np.arange(n)
    phi = 2 * np.pi * (k + (0.5 if shifted else 0.0)) / n
    samples = values_fn(phi)
    if not np.all(np.isfinite(samples)):
        return None
    c = np.fft.ifft(samples)[: dmax + 1]
    if shifted:
        c = c * np.exp(1j * np.pi * np.arange(dmax + 1) / n)
    return c


def correlations_quadrature(symbol, dmax: int, entry=(0, 0), atol: float | None = None,
                            nmin: int = 64, nmax: int = 2**20) -> CorrelationProfile:
    """``<w_(0,alpha) w_(d,beta)>`` for ``d = 0..dmax`` by periodic trapezoid with grid doubling.

    Grids that hit a singular momentum are shifted by half a step.
    """
    atol = tol("QUADRATURE") if atol is None else atol
    a, b = entry
    fn = symbol if callable(symbol) else symbol.evaluate

    def values(phi):
        return fn(phi)[..., a, b]

    n = max(nmin, 4 * (dmax + 1))
    n = 1 << (n - 1).bit_length()
    shifted = False
    prev = _trapezoid(values, n, dmax, shifted)
    if prev is None:
        shifted = True
        prev = _trapezoid(values, n, dmax, shifted)
        if prev is None:
            raise QuadratureToleranceError("symbol is singular on both the regular and shifted grid")
    err = np.inf
    while n < nmax:
        n *= 2
        cur = _trapezoid(values, n, dmax, shifted)
        if cur is None:
            shifted = not shifted
            cur = _trapezoid(values, n, dmax, shifted)
            if cur is None:
                raise QuadratureToleranceError("symbol is singular on the quadrature grid")
        err = float(np.abs(cur - prev).max())
        prev = cur
        if err <= atol:
            break
    vals = prev.copy()
    if a == b:
        vals[0] = 1.0
    profile = CorrelationProfile(np.arange(dmax + 1), vals, tuple(entry), err, "quadrature")
    if err > atol:
        raise QuadratureToleranceError(
            f"quadrature reached {err:.2e} > {atol:.2e} with {n} points", achieved=err, profile=profile
        )
    return profile


def occupation(obj) -> float:
    """Mean ``<c^dag c>`` per site from a :class:`CorrelationMatrix` or :class:`SymbolMatrix`."""
    if isinstance(obj, CorrelationMatrix):
        g = obj.gamma
        return float(np.mean((1.0 - np.diagonal(g, 1)[::2]) / 2))
    if isinstance(obj, SymbolMatrix) or callable(obj):
        prof = correlations_quadrature(obj, 0, entry=(0, 1))
        gamma01 = (1j * prof.values[0]).real
        return float((1.0 - gamma01) / 2)
    raise TypeError(f"cannot compute occupation from {type(obj).__name__}")


def _reduce_product(indices):
    """Order-preserving reduction of ``w_i1 w_i2 ...`` using ``w^2 = 1`` and anticommutation."""
    idx = list(indices)
    sign = 1
    while True:
        pos = None
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if idx[j] == idx[i]:
                    pos = (i, j)
                    break
            if pos:
                break
        if pos is None:
            return sign, idx
        i, j = pos
        # move idx[j] next to idx[i]; each swap past a distinct Majorana flips the sign
        sign *= (-1) ** (j - i - 1)
        del idx[j]
        del idx[i]


def wick_four_point(gamma: CorrelationMatrix, indices) -> complex:
    """``<w_a w_b w_c w_d>`` (0-based indices) of a Gaussian state."""
    G = gamma.two_point()
    sign, idx = _reduce_product(indices)
    if len(idx) == 0:
        return complex(sign)
    if len(idx) == 2:
        return complex(sign * G[idx[0], idx[1]])
    a, b, c, d = idx
    return complex(sign * (G[a, b] * G[c, d] - G[a, c] * G[b, d] + G[a, d] * G[b, c]))


def bulk_profile(gamma: CorrelationMatrix, dmax: int, entry=(0, 0), site: int | None = None) -> CorrelationProfile:
    """``<w_(j,alpha) w_(j+d,beta)>`` read off a finite correlation matrix (default ``j = L//2``)."""
    L = gamma.L
    j = L // 2 if site is None else site
    a, b = entry
    G = gamma.two_point()
    vals = np.array([G[2 * j + a, 2 * ((j + d) % L) + b] for d in range(dmax + 1)])
    return CorrelationProfile(np.arange(dmax + 1), vals, tuple(entry), 0.0, "finite")
