"""Complex-analytic criticality analysis for odd-only reservoir generators.

For generators ``L_j = sum_m s_m a_{j+m}`` the correlation symbol is the
rational function ``gamma_11(z) = n(z)/d(z)`` of ``z = e^{i phi}`` with

    d(z) = sum_{j,l} s_j s_l^* (z^{l-j} + z^{j-l}),
    n(z) = sum_{j,l} s_j s_l^* (z^{l-j} - z^{j-l}),

and ``d(e^{i phi}) = r(phi) + r(-phi) = |p(z)|^2 + |p(1/z)|^2`` on the circle, where
``p(z) = sum_j s_j z^j``.  ``-d`` is also the damping band, so zeros of ``d``
on the unit circle mark both a diverging correlation length and a closing gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriticalityError,
    DegenerateGeneratorError,
    IllConditionedError,
    ModelValidationError,
    NoSolutionError,
    UnsupportedGeneratorError,
)
from .laurent import LaurentPolynomial, cluster_roots, poly_eval, taylor_coefficients
from .model import DampingMatrices, LatticeModel, LindbladGenerator, reservoir_symbol
from .ness import CorrelationProfile
from .tolerances import tol


@dataclass(frozen=True)
class SymbolFraction:
    """``n(z) / d(z)``.

    ``factors`` optionally holds a known factorization of ``d``; root finding
    then works factor by factor, which keeps clustered roots resolvable
    (a k-fold cluster of the expanded product is only accurate to ``eps^(1/k)``).
    """

    numerator: LaurentPolynomial
    denominator: LaurentPolynomial
    factors: tuple = ()

    def __post_init__(self):
        if self.denominator.trimmed().is_zero():
            raise ModelValidationError("symbol denominator is identically zero")
        if self.factors:
            prod = self.factors[0]
            for f in self.factors[1:]:
                prod = prod * f
            diff = (prod - self.denominator).coeffs
            if np.abs(diff).max() > 1e-12 * max(1.0, np.abs(self.denominator.coeffs).max()):
                raise ModelValidationError("denominator factors do not multiply to the denominator")

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)

    def on_circle(self, phi):
        return self.numerator.on_circle(phi) / self.denominator.on_circle(phi)

    def as_symbol(self):
        """Wrap as a 2x2 evaluator returning ``n/d`` times the identity."""
        from .ness import SymbolMatrix

        return SymbolMatrix(lambda phi: self.on_circle(phi)[..., None, None] * np.eye(2),
                            fraction={(0, 0): self, (1, 1): self})

    def to_json(self) -> dict:
        def enc(p):
            return {str(k): [v.real, v.imag] for k, v in p.to_dict().items()}

        return {"numerator": enc(self.numerator), "denominator": enc(self.denominator)}


@dataclass(frozen=True)
class RootSet:
    """Denominator roots with multiplicities; ``classification`` is inside / on-circle / outside."""

    roots: tuple
    classification: tuple
    tau_circle: float

    @property
    def inside(self) -> list:
        return [(z, m) for (z, m), c in zip(self.roots, self.classification) if c == "inside"]

    @property
    def on_circle(self) -> list:
        return [(z, m) for (z, m), c in zip(self.roots, self.classification) if c == "on-circle"]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def __len__(self):
        return len(self.roots)

    def to_json(self) -> dict:
        return {
            "roots": [{"z": [z.real, z.imag], "multiplicity": m} for z, m in self.roots],
            "classification": list(self.classification),
            "tau_circle": self.tau_circle,
        }


@dataclass(frozen=True)
class CriticalityReport:
    span: int
    critical: bool
    z0: tuple = ()
    moment_orders: tuple = ()
    predicted_lambda: float | None = None
    predicted_manifold_dim: int | None = None
    kappa_c: int = 0
    xi_inv: float = math.inf
    scale: complex = 1.0

    def to_json(self) -> dict:
        return {
            "span": self.span,
            "critical": self.critical,
            "z0": [[z.real, z.imag] for z in self.z0],
            "momentOrder": list(self.moment_orders),
            "predictedLambda": self.predicted_lambda,
            "predictedManifoldDim": self.predicted_manifold_dim,
            "mergingRootCount": self.kappa_c,
            "xi_inv": None if math.isinf(self.xi_inv) else self.xi_inv,
            "scale": [complex(self.scale).real, complex(self.scale).imag],
        }


def _odd_values(gen: LindbladGenerator) -> np.ndarray:
    if not gen.is_odd_only:
        raise UnsupportedGeneratorError("criticality analysis needs odd-only generators")
    return gen.odd_values


def to_symbol_fraction(gen: LindbladGenerator) -> SymbolFraction:
    s = _odd_values(gen)
    num, den = {}, {}
    for j, sj in enumerate(s):
        for l, sl in enumerate(s):
            w = sj * np.conj(sl)
            den[l - j] = den.get(l - j, 0) + w
            den[j - l] = den.get(j - l, 0) + w
            num[l - j] = num.get(l - j, 0) + w
            num[j - l] = num.get(j - l, 0) - w
    return SymbolFraction(LaurentPolynomial.from_dict(num), LaurentPolynomial.from_dict(den))


def model_symbol_fraction(model: LatticeModel) -> SymbolFraction:
    """Sum of the per-family fractions' numerators and denominators (reservoirs add in ``R``)."""
    if not model.generators:
        raise ModelValidationError("model has no generators")
    fracs = [to_symbol_fraction(g) for g in model.generators]
    num = sum((f.numerator for f in fracs[1:]), fracs[0].numerator)
    den = sum((f.denominator for f in fracs[1:]), fracs[0].denominator)
    return SymbolFraction(num, den)


def _classify(z: complex, tau: float) -> str:
    r = abs(z)
    if abs(r - 1.0) <= tau:
        return "on-circle"
    return "inside" if r < 1.0 else "outside"


def denominator_roots(frac: SymbolFraction, tau_circle: float | None = None) -> RootSet:
    """Roots of ``z^K d(z)`` from companion-matrix eigenvalues, clustered and polished."""
    tau = tol("CIRCLE") if tau_circle is None else tau_circle
    clusters = []
    for poly in frac.factors or (frac.denominator,):
        coeffs, _ = poly.cleared()
        if len(coeffs) > 1:
            clusters.extend(cluster_roots(coeffs))
    if frac.factors:
        clusters = _merge_clusters(clusters, tol("MERGE"))
    return RootSet(tuple(clusters), tuple(_classify(z, tau) for z, _ in clusters), tau)


def _merge_clusters(clusters: list, radius: float) -> list:
    """Combine roots of different factors that coincide within ``radius``."""
    merged = []
    for z, m in clusters:
        for i, (w, k) in enumerate(merged):
            if abs(z - w) < radius:
                merged[i] = ((w * k + z * m) / (k + m), k + m)
                break
        else:
            merged.append((z, m))
    return sorted(merged, key=lambda zm: (abs(zm[0]), math.atan2(zm[0].imag, zm[0].real)))


def _series_div(P: np.ndarray, Q: np.ndarray, order: int) -> np.ndarray:
    """Power-series coefficients of ``P/Q`` up to ``order`` (``Q[0] != 0``)."""
    out = np.zeros(order + 1, dtype=complex)
    P = np.concatenate([P, np.zeros(max(0, order + 1 - len(P)))])
    Q = np.concatenate([Q, np.zeros(max(0, order + 1 - len(Q)))])
    for k in range(order + 1):
        acc = P[k] - np.dot(Q[1 : k + 1], out[k - 1 :: -1][:k]) if k else P[0]
        out[k] = acc / Q[0]
    return out


def _power_series(a: complex, e: int, order: int) -> np.ndarray:
    """Taylor coefficients of ``z^e`` about ``a`` (any integer ``e``, ``a != 0``)."""
    out = np.empty(order + 1, dtype=complex)
    coef = 1.0
    for k in range(order + 1):
        out[k] = coef * a ** (e - k)
        coef *= (e - k) / (k + 1)
    return out


def residue_correlations(frac: SymbolFraction, dmax: int, roots: RootSet | None = None,
                         entry=(0, 0)) -> CorrelationProfile:
    """``<w_1 w_{1+2d}>`` for ``d = 0..dmax`` as residue sums of ``z^{d-1} n(z)/d(z)`` inside the circle.

    For equal species (``entry`` on the diagonal) ``d = 0`` is reported as 1.
    """
    roots = denominator_roots(frac) if roots is None else roots
    if roots.on_circle:
        raise CriticalityError("denominator has a root on the unit circle; use quadrature",
                               report=roots)
    P, kn = frac.numerator.cleared()
    Q, kd = frac.denominator.cleared()
    diagonal = entry[0] == entry[1]
    first = 1 if diagonal else 0
    vals = np.zeros(dmax + 1, dtype=complex)
    if diagonal:
        vals[0] = 1.0
    if dmax < first or frac.numerator.trimmed().is_zero():
        return CorrelationProfile(np.arange(dmax + 1), vals, tuple(entry), 0.0, "residue")
    d = np.arange(first, dmax + 1)
    e = d - 1 + kn - kd
    out = vals[first:]
    dQ = np.polynomial.polynomial.polyder(Q)
    for a, m in roots.inside:
        if m == 1:
            out += a ** e * poly_eval(P, a) / poly_eval(dQ, a)
            continue
        # Q = (z - a)^m Q_a; residue is the (m-1)-th Taylor coefficient of z^e P / Q_a at a
        Qa = Q[::-1]
        for _ in range(m):
            Qa, _rem = np.polydiv(Qa, np.array([1.0, -a]))
        Qa = Qa[::-1]
        tp = taylor_coefficients(P, a, m)
        tq = taylor_coefficients(Qa, a, m)
        ratio = _series_div(tp, tq, m - 1)
        for i, ei in enumerate(e):
            out[i] += np.dot(_power_series(a, int(ei), m - 1)[::-1], ratio)
    # pole at the origin from negative powers of z
    neg = e < 0
    if np.any(neg):
        order = int(-e.min() - 1)
        series = _series_div(P, Q, order)
        out[neg] += series[-e[neg] - 1]
    return CorrelationProfile(np.arange(dmax + 1), vals, tuple(entry), 0.0, "residue")


def correlation_length(frac: SymbolFraction, roots: RootSet | None = None) -> float:
    """Inverse correlation length ``-ln|z_0|``; 0 at criticality, ``inf`` for strictly local symbols."""
    roots = denominator_roots(frac) if roots is None else roots
    if roots.on_circle:
        return 0.0
    inside = roots.inside
    if not inside:
        return math.inf
    return float(-math.log(max(abs(z) for z, _ in inside)))


def closest_root_modulus(frac: SymbolFraction, roots: RootSet | None = None) -> float:
    roots = denominator_roots(frac) if roots is None else roots
    cands = [abs(z) for z, _ in roots.inside + roots.on_circle]
    return max(cands) if cands else 0.0


def damping_spectrum(gen: LindbladGenerator, phi) -> np.ndarray:
    """Relaxation-rate band ``-r(phi) - r(-phi)``."""
    return -(reservoir_symbol(gen, phi) + reservoir_symbol(gen, -np.asarray(phi, dtype=float)))


def _polish_minimum(f, df, d2f, phi0, h, iters=30):
    """Newton on ``f'`` inside ``[phi0 - h, phi0 + h]``; falls back to the start point."""
    best_phi, best = phi0, f(phi0)
    phi = phi0
    for _ in range(iters):
        g2 = d2f(phi)
        if g2 <= 0:
            break
        step = df(phi) / g2
        phi_new = phi - step
        if abs(phi_new - phi0) > h:
            break
        val = f(phi_new)
        if val <= best:
            best_phi, best = phi_new, val
        if abs(step) < 1e-15:
            break
        phi = phi_new
    return best_phi, best


def damping_gap(frac: SymbolFraction, samples: int = 4096) -> float:
    """``min_{|z|=1} d(z)`` by dense sampling plus Newton polishing, clamped at 0."""
    den = frac.denominator.trimmed()
    phi = 2 * np.pi * np.arange(samples) / samples
    vals = den.on_circle(phi).real
    h = 2 * np.pi / samples

    def f(p):
        return float(den.on_circle(p).real)

    def df(p):
        return float(den.derivative_on_circle(p, 1).real)

    def d2f(p):
        return float(den.derivative_on_circle(p, 2).real)

    best = vals.min()
    local = np.flatnonzero((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))
    for i in local[np.argsort(vals[local])][:8]:
        _, v = _polish_minimum(f, df, d2f, phi[i], h)
        best = min(best, v)
    if best < -1e-12 * max(1.0, np.abs(den.coeffs).sum()):
        raise ValueError(f"denominator is negative on the unit circle ({best:.3e})")
    return max(float(best), 0.0)


def damping_gap_finite(dm: DampingMatrices, rel: float = 1e-10) -> float:
    """Smallest nonzero eigenvalue of ``R + R^*`` (Hamiltonian excluded)."""
    ev = np.linalg.eigvalsh(2 * dm.R.real)
    scale = max(1.0, np.abs(ev).max(initial=0.0))
    nz = np.abs(ev[np.abs(ev) > rel * scale])
    return float(nz.min()) if nz.size else 0.0


def damping_gap_model(model: LatticeModel, samples: int = 4096) -> float:
    """Smallest nonzero damping rate of an infinite model from the symbol of ``R + R^*``.

    Eigenvalue branches that vanish for every momentum (undamped species)
    are excluded.
    """
    from scipy.optimize import minimize_scalar

    from .model import reservoir_symbol_matrix

    def S(phi):
        phi = np.asarray(phi, dtype=float)
        return reservoir_symbol_matrix(model, phi) + reservoir_symbol_matrix(model, -phi).conj()

    phi = 2 * np.pi * np.arange(samples) / samples
    ev = np.linalg.eigvalsh(S(phi))
    scale = max(1.0, np.abs(ev).max())
    best = math.inf
    h = 2 * np.pi / samples
    for branch in range(ev.shape[-1]):
        band = ev[:, branch]
        if np.abs(band).max() <= 1e-12 * scale:
            continue
        i = int(np.argmin(band))

        def f(p, branch=branch):
            return float(np.linalg.eigvalsh(S(p))[branch])

        res = minimize_scalar(f, bounds=(phi[i] - h, phi[i] + h), method="bounded",
                              options={"xatol": 1e-13})
        best = min(best, float(band[i]), float(res.fun))
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# criticality conditions and exponents


def _normalized_odd(gen: LindbladGenerator) -> tuple[np.ndarray, complex]:
    s = _odd_values(gen)
    if s[0] == 0:
        raise ModelValidationError("criticality routines need s_0 != 0")
    return s / s[0], complex(s[0])


def criticality_conditions(gen: LindbladGenerator, z0: complex) -> tuple[complex, complex]:
    """``(1 + sum_j s_j z0^j, 1 + sum_j s_j conj(z0)^j)`` after rescaling to ``s_0 = 1``."""
    s, _ = _normalized_odd(gen)
    j = np.arange(len(s))
    return complex(s @ z0**j), complex(s @ np.conj(z0) ** j)


def moment_conditions(gen: LindbladGenerator, z0: complex, m_max: int) -> list:
    """Residual pairs ``sum_j s_j j^m z0^j`` and its ``conj(z0)`` twin for ``m = 0..m_max``."""
    s, _ = _normalized_odd(gen)
    j = np.arange(len(s), dtype=float)
    out = []
    for m in range(m_max + 1):
        w = s * j**m if m else s
        out.append((complex(w @ z0**j), complex(w @ np.conj(z0) ** j)))
    return out


def moment_order(gen: LindbladGenerator, z0: complex, rel: float | None = None) -> int:
    """Smallest ``m`` whose moment pair does not vanish."""
    rel = tol("CRITICAL") if rel is None else rel
    s, _ = _normalized_odd(gen)
    N = len(s)
    j = np.arange(N, dtype=float)
    res = moment_conditions(gen, z0, N - 1)
    for m, (a, b) in enumerate(res):
        scale = max(1.0, float(np.abs(s * j**m).sum()))
        if max(abs(a), abs(b)) > rel * scale:
            return m
    raise DegenerateGeneratorError("all moment conditions vanish; the symbol is identically zero")


def _critical_points(s: np.ndarray, tau: float, rel: float) -> list:
    """Points ``z0`` on the circle with ``p(z0) = p(conj z0) = 0``."""
    nz = np.flatnonzero(np.abs(s) > 0)
    deg = nz[-1]
    if deg == 0:
        return []
    coeffs = s[: deg + 1]
    out = []
    for z, _mult in cluster_roots(coeffs):
        if abs(abs(z) - 1.0) > max(tau, 1e-7):
            continue
        z = z / abs(z)
        scale = float(np.abs(coeffs).sum())
        if abs(poly_eval(coeffs, z)) <= rel * scale and abs(poly_eval(coeffs, np.conj(z))) <= rel * scale:
            out.append(complex(z))
    return out


def predict_exponents(gen: LindbladGenerator) -> CriticalityReport:
    """Exponent prediction ``lambda = 1/M`` from the rational structure of the symbol.

    ``M`` is the moment order at each critical point ``z0``; ``kappa_c`` is
    the multiplicity of ``z0`` as a root of ``z^K d(z)``.
    """
    s, s0 = _normalized_odd(gen)
    N = gen.span
    norm_gen = LindbladGenerator.from_values(s)
    frac = to_symbol_fraction(norm_gen)
    roots = denominator_roots(frac)
    points = _critical_points(s, tol("CIRCLE"), tol("CRITICAL"))
    if not points:
        return CriticalityReport(span=N, critical=False, xi_inv=correlation_length(frac, roots), scale=s0)
    orders = [moment_order(norm_gen, z0) for z0 in points]
    kappas = []
    for z0 in points:
        near = [m for z, m in roots.roots if abs(z - z0) <= tol("KAPPA")]
        kappas.append(sum(near))
    i = int(np.argmax(orders))
    M = orders[i]
    return CriticalityReport(
        span=N,
        critical=True,
        z0=tuple(points),
        moment_orders=tuple(orders),
        predicted_lambda=1.0 / M,
        predicted_manifold_dim=2 * (N - 1 - M),
        kappa_c=kappas[i],
        xi_inv=0.0,
        scale=s0,
    )


@dataclass(frozen=True)
class CriticalFamily:
    """Solutions ``s = particular + sum_k t_k basis[k]`` (complex ``t_k``) of the moment equations."""

    span: int
    order: int
    z0: complex
    particular: np.ndarray
    basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    residual: float = 0.0

    @property
    def free_dimension(self) -> int:
        """Real dimension of the family at fixed ``z0``."""
        return 2 * len(self.basis)

    def coefficients(self, t=None) -> np.ndarray:
        s = self.particular.copy()
        if t is not None and len(self.basis):
            s = s + np.asarray(t, dtype=complex) @ self.basis
        return s

    def generator(self, t=None) -> LindbladGenerator:
        return LindbladGenerator.from_values(self.coefficients(t))


def _moment_rows(N: int, order: int, z0: complex) -> np.ndarray:
    j = np.arange(N, dtype=float)
    rows = []
    for w in (z0, np.conj(z0)):
        for m in range(order):
            rows.append((j**m if m else np.ones(N)) * w**j)
    return np.array(rows, dtype=complex)


def solve_critical_parameters(N: int, target_m: int, z0: complex, fixed=None, rank_tol: float = 1e-10) -> CriticalFamily:
    """Couplings ``s_1..s_{N-1}`` (with ``s_0 = 1``) satisfying the first ``target_m`` moment pairs at ``z0``.

    ``fixed`` maps indices to prescribed complex values.  Returns the
    least-norm solution and an orthonormal basis of the free directions.
    """
    fixed = dict(fixed or {})
    if N < 2:
        raise ModelValidationError("criticality needs N >= 2")
    if not 1 <= target_m <= N - 1:
        raise ModelValidationError(f"target order must be in 1..{N - 1}, got {target_m}")
    if abs(abs(z0) - 1.0) > 1e-12:
        raise ModelValidationError("z0 must lie on the unit circle")
    if 0 in fixed:
        raise ModelValidationError("s_0 is fixed to 1")
    if any(not 1 <= k < N for k in fixed):
        raise ModelValidationError("fixed indices must be in 1..N-1")
    z0 = complex(z0)
    A = _moment_rows(N, target_m, z0)
    known = np.zeros(N, dtype=complex)
    known[0] = 1.0
    for k, v in fixed.items():
        known[k] = v
    free = [k for k in range(1, N) if k not in fixed]
    b = -A @ known
    s = known.copy()
    if not free:
        res = float(np.abs(b).max())
        if res > 1e-9 * max(1.0, float(np.abs(known).sum())):
            raise NoSolutionError(f"fixed couplings violate the moment equations (residual {res:.2e})")
        return CriticalFamily(N, target_m, z0, s, np.zeros((0, N), complex), res)
    Af = A[:, free]
    U, sv, Vh = np.linalg.svd(Af)
    rank = int((sv > rank_tol * max(sv[0], 1.0)).sum())
    x = Vh[:rank].conj().T @ ((U[:, :rank].conj().T @ b) / sv[:rank])
    res = float(np.abs(Af @ x - b).max())
    if res > 1e-9 * max(1.0, float(np.abs(b).max())):
        raise NoSolutionError(f"moment equations are inconsistent (residual {res:.2e})")
    s[free] = x
    null = Vh[rank:].conj()
    basis = np.zeros((len(null), N), dtype=complex)
    basis[:, free] = null
    fam = CriticalFamily(N, target_m, z0, s, basis, res)
    check = moment_conditions(fam.generator(), z0, target_m - 1)
    worst = max(max(abs(a), abs(c)) for a, c in check)
    if worst > 1e-8 * max(1.0, float(np.abs(s).sum()) * N ** target_m):
        raise NoSolutionError(f"solution fails verification (residual {worst:.2e})")
    return fam


@dataclass(frozen=True)
class ManifoldDimensionReport:
    """Measured local dimension of the critical set against ``2(N - 1 - M)``."""

    span: int
    order: int
    z0: complex
    jacobian_dim: int
    fixed_z0_dim: int
    formula_dim: int
    singular_values: tuple

    @property
    def agrees(self) -> bool:
        return self.jacobian_dim == self.formula_dim

    def to_json(self) -> dict:
        return {
            "span": self.span, "order": self.order, "z0": [self.z0.real, self.z0.imag],
            "jacobian_dim": self.jacobian_dim, "fixed_z0_dim": self.fixed_z0_dim,
            "formula_dim": self.formula_dim, "agrees": self.agrees,
        }


def _constraint_jacobian(s: np.ndarray, theta: float, M: int, with_theta: bool) -> np.ndarray:
    N = len(s)
    j = np.arange(N, dtype=float)
    rows = []
    for sign in (1, -1):
        w = np.exp(1j * sign * theta * j)
        for m in range(M):
            jm = j**m if m else np.ones(N)
            ds = (jm * w)[1:]  # derivative w.r.t. complex s_k, k >= 1
            # real parameters (Re s_k, Im s_k) -> columns ds, i*ds
            re_cols = np.stack([ds, 1j * ds], axis=1).reshape(-1)
            row = list(re_cols)
            if with_theta:
                row.append(1j * sign * np.sum(s * jm * j * w))
            row = np.array(row, dtype=complex)
            rows.append(row.real)
            rows.append(row.imag)
    return np.array(rows)


def _rank(J: np.ndarray, rel: float) -> tuple[int, np.ndarray]:
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, sv
    return int((sv > rel * sv[0]).sum()), sv


def empirical_manifold_dimension(gen: LindbladGenerator, z0: complex | None = None,
                                 perturbation: float = 1e-6, seed: int = 0) -> ManifoldDimensionReport:
    """Local dimension of the critical set from the rank of the active constraint Jacobian.

    Variables are ``Re s_k, Im s_k`` (``k >= 1``) and the angle of ``z0``;
    constraints are the moment pairs ``m < M``.  The rank is re-measured at
    points moved by ``perturbation`` inside the fixed-``z0`` solution family.
    """
    s, _ = _normalized_odd(gen)
    N = len(s)
    if z0 is None:
        pts = _critical_points(s, tol("CIRCLE"), tol("CRITICAL"))
        if not pts:
            raise ModelValidationError("generator is not critical")
        z0 = pts[0]
    z0 = complex(z0) / abs(z0)
    c1, c2 = criticality_conditions(gen, z0)
    if max(abs(c1), abs(c2)) > 1e-8 * max(1.0, float(np.abs(s).sum())):
        raise ModelValidationError("generator does not satisfy the criticality conditions at z0")
    M = moment_order(LindbladGenerator.from_values(s), z0)
    theta = math.atan2(z0.imag, z0.real)
    rel = tol("RANK")
    nparam = 2 * (N - 1)
    r_full, sv = _rank(_constraint_jacobian(s, theta, M, True), rel)
    r_fixed, _ = _rank(_constraint_jacobian(s, theta, M, False), rel)

    fam = solve_critical_parameters(N, M, z0)
    if len(fam.basis):
        rng = np.random.default_rng(seed)
        for _ in range(3):
            t = perturbation * (rng.standard_normal(len(fam.basis)) + 1j * rng.standard_normal(len(fam.basis)))
            sp = s + t @ fam.basis
            if _rank(_constraint_jacobian(sp, theta, M, True), rel)[0] != r_full:
                raise IllConditionedError("Jacobian rank changes under a small move along the critical family")
    return ManifoldDimensionReport(
        span=N, order=M, z0=z0,
        jacobian_dim=nparam + 1 - r_full,
        fixed_z0_dim=nparam - r_fixed,
        formula_dim=2 * (N - 1 - M),
        singular_values=tuple(float(x) for x in sv),
    )
