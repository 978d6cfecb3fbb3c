"""Reference models: the two-site quantum-optical chain and the odd-only families.

Quantum-optical chain
---------------------
Two reservoir families per site,

    pump   chi (c_j^dag + nu c_{j+1}^dag),
    decay  c_j + nu e^{i g} c_{j+1},

with closed-form correlation symbol.  In this package's convention
(``gamma`` is the symbol of ``-i Gamma``) it reads

    gamma(phi) = (-i / d(phi)) [[ n11, n12], [-n12, n11]]

with

    n11 = 4 i nu chi^2 (1 + nu^2 + 2 nu cos phi) sin g sin phi,
    n12 = (1 + nu^2 + 2 nu cos g cos phi)^2 - 4 nu^2 sin^2 g sin^2 phi
          - chi^4 (1 + nu^2 + 2 nu cos phi)^2,
    d   = [(1 + nu^2)(1 + chi^2) + 2 nu (chi^2 + cos g) cos phi]^2 - 4 nu^2 sin^2 g sin^2 phi.

It is critical at ``nu = 1, g = 0`` for every ``chi > 0``.
"""

from __future__ import annotations

import math

import numpy as np

from ..criticality import SymbolFraction
from ..errors import ModelValidationError
from ..laurent import LaurentPolynomial
from ..model import LatticeModel, LindbladGenerator
from ..ness import SymbolMatrix

_COS = LaurentPolynomial.from_dict({-1: 0.5, 1: 0.5})
_SIN = LaurentPolynomial.from_dict({-1: 0.5j, 1: -0.5j})


def _check(chi: float, nu: float, g: float):
    if not (math.isfinite(chi) and math.isfinite(nu) and math.isfinite(g)):
        raise ModelValidationError("quantum-optical parameters must be finite")
    if chi <= 0:
        raise ModelValidationError(f"chi must be positive, got {chi}")
    if nu < 0:
        raise ModelValidationError(f"nu must be nonnegative, got {nu}")


def quantum_optical_model(chi: float, nu: float, g: float) -> LatticeModel:
    """Infinite chain with the pump and decay reservoirs."""
    _check(chi, nu, g)
    pump = LindbladGenerator.from_fermions(create=[chi, chi * nu])
    decay = LindbladGenerator.from_fermions(annihilate=[1.0, nu * np.exp(1j * g)])
    return LatticeModel((pump, decay))


def quantum_optical_denominator_factors(chi: float, nu: float, g: float):
    """``d = d_- d_+`` with ``d_pm = (1 + nu^2)(1 + chi^2) + 2 nu (chi^2 + cos g) cos phi pm 2 nu sin g sin phi``."""
    _check(chi, nu, g)
    base = (1 + nu**2) * (1 + chi**2) + 2 * nu * (chi**2 + math.cos(g)) * _COS
    twist = 2 * nu * math.sin(g) * _SIN
    return (base - twist).trimmed(), (base + twist).trimmed()


def quantum_optical_polynomials(chi: float, nu: float, g: float):
    """``(n11, n12, d)`` as Laurent polynomials in ``z = e^{i phi}``."""
    _check(chi, nu, g)
    base = 1 + nu**2 + 2 * nu * _COS
    n11 = 4j * nu * chi**2 * math.sin(g) * base * _SIN
    n12 = (1 + nu**2 + 2 * nu * math.cos(g) * _COS) ** 2 \
        - 4 * nu**2 * math.sin(g) ** 2 * _SIN**2 - chi**4 * base**2
    d = ((1 + nu**2) * (1 + chi**2) + 2 * nu * (chi**2 + math.cos(g)) * _COS) ** 2 \
        - 4 * nu**2 * math.sin(g) ** 2 * _SIN**2
    return n11.trimmed(), n12.trimmed(), d.trimmed()


def quantum_optical_reference(chi: float, nu: float, g: float) -> SymbolMatrix:
    """Closed-form correlation symbol of :func:`quantum_optical_model`."""
    n11, n12, d = quantum_optical_polynomials(chi, nu, g)
    factors = quantum_optical_denominator_factors(chi, nu, g)
    fractions = {
        (0, 0): SymbolFraction(-1j * n11, d, factors),
        (0, 1): SymbolFraction(-1j * n12, d, factors),
        (1, 0): SymbolFraction(1j * n12, d, factors),
        (1, 1): SymbolFraction(-1j * n11, d, factors),
    }

    def evaluate(phi):
        phi = np.asarray(phi, dtype=float)
        den = d.on_circle(phi)
        a = n11.on_circle(phi) / den
        b = n12.on_circle(phi) / den
        return -1j * np.stack([np.stack([a, b], -1), np.stack([-b, a], -1)], -2)

    return SymbolMatrix(evaluate, fraction=fractions)


def quantum_optical_fraction(chi: float, nu: float, g: float) -> SymbolFraction:
    """Normal-correlation entry ``gamma_12`` (it carries ``<c^dag c>``)."""
    return quantum_optical_reference(chi, nu, g).fraction[(0, 1)]


def two_site_generator(nu: float = 1.0, g: float = 0.0) -> LindbladGenerator:
    return LindbladGenerator.from_values([1.0, nu * np.exp(1j * g)])


def three_site_double_root(g: float = 0.0) -> LindbladGenerator:
    """``s = (1, 2 e^{i g}, 1)``: critical at ``g = 0`` with ``lambda = 1/2``."""
    return LindbladGenerator.from_values([1.0, 2.0 * np.exp(1j * g), 1.0])


def three_site_staircase(delta: float = 0.0) -> LindbladGenerator:
    """Phases ``(-2pi/3, delta, 2pi/3)``, equal magnitudes: critical at ``delta = 0`` with ``lambda = 1``."""
    phases = np.array([-2 * np.pi / 3, delta, 2 * np.pi / 3])
    return LindbladGenerator.from_values(np.exp(1j * phases))
