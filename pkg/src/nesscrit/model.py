"""Reservoir-coupled free-fermion chains and their damping matrices.

Index conventions (used everywhere in the package)
--------------------------------------------------
Sites are numbered ``j = 0 .. L-1``.  Site ``j`` owns two Majorana operators,

    odd species  ``a_j = c_j^dag + c_j``        -> array index ``2*j``
    even species ``b_j = i (c_j - c_j^dag)``    -> array index ``2*j + 1``

so ``c_j = (a_j - i b_j)/2`` and ``c_j^dag = (a_j + i b_j)/2``.  Species are
labelled 0 (odd) and 1 (even).  A generator term ``m`` couples site ``j + m``.

A local reservoir generator translated to site ``j`` reads

    L_j = sum_m  s_m a_{j+m} + q_m b_{j+m},        m = 0 .. N-1.

The Hamiltonian is ``H = (i/4) sum_{jk} K_{jk} w_j w_k`` with ``K`` real
antisymmetric.  The damping matrices entering

    dGamma/dt = X^T Gamma + Gamma X - Y

are ``R = sum_mu l_mu l_mu^dag``, ``X = -K - (R + R^*)`` and ``Y = 2i (R - R^*)``.
(Writing the Hamiltonian matrix as ``H = -i K / 4`` gives the familiar form ``X = -4 i H - (R + R^*)``.)

Symbols of block-circulant matrices use ``a(phi) = sum_d A_{(0,.),(d,.)} e^{-i phi d}``,
which makes the symbol of ``A^T`` equal to ``a(-phi)^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelTooSmallError, ModelValidationError, UnsupportedGeneratorError

ODD, EVEN = 0, 1


def canonical_phase(g: float) -> float:
    """Map a phase into (-pi, pi]."""
    g = math.pi - math.fmod(math.pi - float(g), 2 * math.pi)
    if g <= -math.pi:
        g += 2 * math.pi
    elif g > math.pi:
        g -= 2 * math.pi
    return g


@dataclass(frozen=True)
class ComplexAmplitude:
    """Polar form ``nu * exp(i g)`` of one coupling coefficient."""

    nu: float
    g: float = 0.0

    def __post_init__(self):
        nu = float(self.nu)
        if not math.isfinite(nu) or nu < 0:
            raise ModelValidationError(f"amplitude magnitude must be finite and >= 0, got {self.nu!r}")
        if not math.isfinite(float(self.g)):
            raise ModelValidationError(f"phase must be finite, got {self.g!r}")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "g", canonical_phase(self.g))

    @classmethod
    def from_complex(cls, s: complex) -> "ComplexAmplitude":
        s = complex(s)
        if s == 0:
            return cls(0.0, 0.0)
        return cls(abs(s), math.atan2(s.imag, s.real))

    @property
    def value(self) -> complex:
        return self.nu * complex(math.cos(self.g), math.sin(self.g))


ZERO = ComplexAmplitude(0.0, 0.0)


def _amplitudes(values) -> tuple:
    out = []
    for v in values:
        out.append(v if isinstance(v, ComplexAmplitude) else ComplexAmplitude.from_complex(v))
    return tuple(out)


@dataclass(frozen=True)
class LindbladGenerator:
    """One local reservoir, coupling ``span`` adjacent sites.

    ``odd[m]`` multiplies the odd Majorana of site ``j+m``, ``even[m]`` the
    even one.  Build from complex numbers with :meth:`from_values`.
    """

    span: int
    odd: tuple
    even: tuple

    def __post_init__(self):
        if int(self.span) != self.span or self.span < 1:
            raise ModelValidationError(f"generator span must be a positive integer, got {self.span!r}")
        object.__setattr__(self, "span", int(self.span))
        odd, even = _amplitudes(self.odd), _amplitudes(self.even)
        if len(odd) != self.span or len(even) != self.span:
            raise ModelValidationError(
                f"span {self.span} needs {self.span} odd and even coefficients, "
                f"got {len(odd)} and {len(even)}"
            )
        if all(a.nu == 0 for a in odd + even):
            raise ModelValidationError("generator has no nonzero coefficient")
        object.__setattr__(self, "odd", odd)
        object.__setattr__(self, "even", even)

    @classmethod
    def from_values(cls, odd: Sequence[complex], even: Sequence[complex] | None = None) -> "LindbladGenerator":
        odd = list(odd)
        even = [0.0] * len(odd) if even is None else list(even)
        n = max(len(odd), len(even))
        odd += [0.0] * (n - len(odd))
        even += [0.0] * (n - len(even))
        return cls(n, tuple(odd), tuple(even))

    @classmethod
    def from_fermions(cls, annihilate: Sequence[complex] = (), create: Sequence[complex] = ()) -> "LindbladGenerator":
        """Generator ``sum_m u_m c_{j+m} + v_m c_{j+m}^dag`` rewritten in Majoranas."""
        n = max(len(annihilate), len(create))
        u = np.zeros(n, complex)
        v = np.zeros(n, complex)
        u[: len(annihilate)] = annihilate
        v[: len(create)] = create
        # c = (a - i b)/2, c^dag = (a + i b)/2
        return cls.from_values((u + v) / 2, 1j * (v - u) / 2)

    @property
    def odd_values(self) -> np.ndarray:
        return np.array([a.value for a in self.odd], dtype=complex)

    @property
    def even_values(self) -> np.ndarray:
        return np.array([a.value for a in self.even], dtype=complex)

    @property
    def coefficients(self) -> np.ndarray:
        """``(span, 2)`` array; column 0 odd, column 1 even."""
        return np.stack([self.odd_values, self.even_values], axis=1)

    @property
    def is_odd_only(self) -> bool:
        return all(a.nu == 0 for a in self.even)

    @property
    def normalized(self) -> bool:
        return self.odd[0].nu == 1.0 and self.odd[0].g == 0.0

    def normalize(self) -> tuple["LindbladGenerator", complex]:
        """Rescale so that the first odd coefficient is 1.

        Returns the rescaled generator and the discarded factor ``s_0``; the
        factor only sets the overall time scale.
        """
        s0 = self.odd_values[0]
        if s0 == 0:
            raise ModelValidationError("cannot normalize a generator with s_0 = 0")
        odd = self.odd_values / s0
        odd[0] = 1.0
        return LindbladGenerator.from_values(odd, self.even_values / s0), s0

    def with_coefficient(self, index: int, species: str, nu: float | None = None, g: float | None = None):
        """Copy with one coefficient replaced (``species`` is ``'odd'`` or ``'even'``)."""
        odd, even = list(self.odd), list(self.even)
        target = odd if species == "odd" else even
        old = target[index]
        target[index] = ComplexAmplitude(old.nu if nu is None else nu, old.g if g is None else g)
        return LindbladGenerator(self.span, tuple(odd), tuple(even))


def _pair_index(pair) -> tuple:
    a, b = pair
    names = {"odd": ODD, "even": EVEN, 0: ODD, 1: EVEN}
    try:
        return names[a], names[b]
    except KeyError:
        raise ModelValidationError(f"species pair must use 'odd'/'even' or 0/1, got {pair!r}") from None


@dataclass(frozen=True)
class HamiltonianStencil:
    """Translation-invariant quadratic Hamiltonian.

    ``couplings[(offset, (alpha, beta))] = c`` puts ``+c`` at
    ``K[(j, alpha), (j + offset, beta)]`` and ``-c`` at the transposed
    position, for every site ``j``.
    """

    couplings: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.couplings).items():
            offset, pair = key
            if int(offset) != offset:
                raise ModelValidationError(f"offset must be an integer, got {offset!r}")
            a, b = _pair_index(pair)
            if offset == 0 and a == b:
                raise ModelValidationError("on-site coupling of a Majorana with itself is a constant")
            value = float(value)
            if not math.isfinite(value):
                raise ModelValidationError("Hamiltonian coupling must be finite")
            k = (int(offset), (a, b))
            clean[k] = clean.get(k, 0.0) + value
        object.__setattr__(self, "couplings", clean)

    @property
    def range(self) -> int:
        return max((abs(o) for o, _ in self.couplings), default=0)

    @classmethod
    def onsite(cls, eps: float) -> "HamiltonianStencil":
        """``eps * sum_j c_j^dag c_j`` (up to a constant)."""
        return cls({(0, (ODD, EVEN)): -eps})

    @classmethod
    def hopping(cls, t: float) -> "HamiltonianStencil":
        """``-t * sum_j (c_j^dag c_{j+1} + h.c.)``."""
        return cls({(1, (ODD, EVEN)): t, (1, (EVEN, ODD)): -t})

    def __add__(self, other: "HamiltonianStencil") -> "HamiltonianStencil":
        merged = dict(self.couplings)
        for k, v in other.couplings.items():
            merged[k] = merged.get(k, 0.0) + v
        return HamiltonianStencil(merged)

    def matrix(self, L: int, periodic: bool = True) -> np.ndarray:
        K = np.zeros((2 * L, 2 * L))
        for (offset, (a, b)), c in self.couplings.items():
            for j in range(L):
                k = j + offset
                if not 0 <= k < L:
                    if not periodic:
                        continue
                    k %= L
                K[2 * j + a, 2 * k + b] += c
                K[2 * k + b, 2 * j + a] -= c
        return K

    def symbol(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(phi.shape + (2, 2), dtype=complex)
        for (offset, (a, b)), c in self.couplings.items():
            out[..., a, b] += c * np.exp(-1j * phi * offset)
            out[..., b, a] -= c * np.exp(1j * phi * offset)
        return out


@dataclass(frozen=True)
class InfiniteChain:
    pass


@dataclass(frozen=True)
class FiniteChain:
    L: int
    periodic: bool = True

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ModelValidationError(f"site count must be a positive integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "periodic", bool(self.periodic))


@dataclass(frozen=True)
class LatticeModel:
    """Generators (each translated over every site), optional Hamiltonian, chain geometry."""

    generators: tuple
    hamiltonian: HamiltonianStencil | None = None
    chain: InfiniteChain | FiniteChain = field(default_factory=InfiniteChain)

    def __post_init__(self):
        gens = tuple(self.generators)
        for gen in gens:
            if not isinstance(gen, LindbladGenerator):
                raise ModelValidationError(f"expected LindbladGenerator, got {type(gen).__name__}")
        object.__setattr__(self, "generators", gens)
        if isinstance(self.chain, FiniteChain):
            for gen in gens:
                if gen.span > self.chain.L:
                    raise ModelTooSmallError(f"generator span {gen.span} exceeds chain length {self.chain.L}")
            if self.hamiltonian is not None and self.hamiltonian.range >= self.chain.L:
                raise ModelTooSmallError(
                    f"Hamiltonian range {self.hamiltonian.range} must be below chain length {self.chain.L}"
                )

    @property
    def is_finite(self) -> bool:
        return isinstance(self.chain, FiniteChain)

    @property
    def is_odd_only(self) -> bool:
        return all(g.is_odd_only for g in self.generators)

    @property
    def max_span(self) -> int:
        return max((g.span for g in self.generators), default=1)

    def finite(self, L: int, periodic: bool = True) -> "LatticeModel":
        return LatticeModel(self.generators, self.hamiltonian, FiniteChain(L, periodic))

    def infinite(self) -> "LatticeModel":
        return LatticeModel(self.generators, self.hamiltonian, InfiniteChain())

    def replace_generator(self, index: int, gen: LindbladGenerator) -> "LatticeModel":
        gens = list(self.generators)
        gens[index] = gen
        return LatticeModel(tuple(gens), self.hamiltonian, self.chain)


@dataclass(frozen=True)
class DampingMatrices:
    """``X``, ``Y`` (real) and the complex Hermitian reservoir matrix ``R``; ``K`` is the Hamiltonian part."""

    X: np.ndarray
    Y: np.ndarray
    R: np.ndarray
    K: np.ndarray

    @property
    def L(self) -> int:
        return self.X.shape[0] // 2


def _require_finite(model: LatticeModel) -> FiniteChain:
    if not model.is_finite:
        raise ModelValidationError("operation needs a finite chain")
    return model.chain


def build_generator_vectors(model: LatticeModel) -> np.ndarray:
    """Coefficient vectors ``l_mu`` (rows, length ``2L``), one per family and translation.

    Non-periodic chains drop translations that would leave the chain.
    """
    chain = _require_finite(model)
    L = chain.L
    rows = []
    for gen in model.generators:
        if gen.span > L:
            raise ModelTooSmallError(f"generator span {gen.span} exceeds chain length {L}")
        coeffs = gen.coefficients
        last = L if chain.periodic else L - gen.span + 1
        for j in range(last):
            vec = np.zeros(2 * L, dtype=complex)
            for m in range(gen.span):
                site = (j + m) % L
                vec[2 * site] += coeffs[m, ODD]
                vec[2 * site + 1] += coeffs[m, EVEN]
            rows.append(vec)
    if not rows:
        return np.zeros((0, 2 * L), dtype=complex)
    return np.array(rows)


def build_damping_matrices(model: LatticeModel) -> DampingMatrices:
    chain = _require_finite(model)
    L = chain.L
    ls = build_generator_vectors(model)
    R = ls.T @ ls.conj()
    K = model.hamiltonian.matrix(L, chain.periodic) if model.hamiltonian is not None else np.zeros((2 * L, 2 * L))
    X = -K - 2 * R.real
    Y = -4 * R.imag
    return DampingMatrices(X=X, Y=Y, R=R, K=K)


def reservoir_symbol_matrix(model: LatticeModel, phi) -> np.ndarray:
    """Symbol of ``R``: ``sum_gen C(phi) C(phi)^dag`` with ``C_alpha = sum_m c_alpha(m) e^{i phi m}``."""
    phi = np.asarray(phi, dtype=float)
    out = np.zeros(phi.shape + (2, 2), dtype=complex)
    for gen in model.generators:
        m = np.arange(gen.span)
        phase = np.exp(1j * phi[..., None] * m)
        C = phase @ gen.coefficients
        out += C[..., :, None] * C[..., None, :].conj()
    return out


def build_symbol_matrices(model: LatticeModel, phi):
    """Momentum-space ``(x(phi), y(phi))``, each ``2x2`` in the (odd, even) basis.

    ``phi`` may be an array; the matrices then carry its shape in front.
    """
    if model.is_finite:
        raise ModelValidationError("symbol matrices are defined for infinite chains; use model.infinite()")
    phi = np.asarray(phi, dtype=float)
    Rp = reservoir_symbol_matrix(model, phi)
    Rm_conj = reservoir_symbol_matrix(model, -phi).conj()
    x = -(Rp + Rm_conj)
    if model.hamiltonian is not None:
        x = x - model.hamiltonian.symbol(phi)
    y = 2j * (Rp - Rm_conj)
    return x, y


def reservoir_symbol(gen: LindbladGenerator, phi):
    """``r(phi) = |sum_m s_m e^{-i phi m}|^2`` for an odd-only generator."""
    if not gen.is_odd_only:
        raise UnsupportedGeneratorError("reservoir_symbol needs an odd-only generator; use build_symbol_matrices")
    phi = np.asarray(phi, dtype=float)
    m = np.arange(gen.span)
    amp = np.exp(-1j * phi[..., None] * m) @ gen.odd_values
    return np.abs(amp) ** 2


def circulant_blocks(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fourier blocks of a block-circulant ``2L x 2L`` matrix at ``phi_k = 2 pi k / L``."""
    L = A.shape[0] // 2
    first = A[0:2, :].reshape(2, L, 2).transpose(1, 0, 2)  # first[d] = A_{(0,.),(d,.)}
    phi = 2 * np.pi * np.arange(L) / L
    blocks = np.fft.fft(first, axis=0)  # sum_d first[d] e^{-2 pi i k d / L}
    return phi, blocks
