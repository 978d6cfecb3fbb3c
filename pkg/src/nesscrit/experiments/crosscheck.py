"""Independent-route comparisons: residue vs quadrature, finite vs infinite, exact vs Gaussian."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..criticality import residue_correlations, to_symbol_fraction
from ..model import LatticeModel, LindbladGenerator, build_damping_matrices
from ..ness import (
    bulk_profile,
    correlations_quadrature,
    degenerate_even_sector,
    model_symbol,
    solve_lyapunov_finite,
    wick_four_point,
)
from .oracle import ExactSteadyState

ENTRIES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Comparison:
    name: str
    max_abs_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_diff <= self.tolerance)

    def to_json(self) -> dict:
        return {"name": self.name, "max_abs_diff": self.max_abs_diff,
                "tolerance": self.tolerance, "passed": self.passed}


def residue_vs_quadrature(gen: LindbladGenerator, dmax: int = 15, tolerance: float = 1e-10) -> Comparison:
    frac = to_symbol_fraction(gen)
    a = residue_correlations(frac, dmax)
    b = correlations_quadrature(frac.as_symbol(), dmax)
    return Comparison("residue-vs-quadrature", float(np.abs(a.values - b.values).max()), tolerance)


def finite_vs_symbol(model: LatticeModel, L: int = 256, dmax: int = 20, tolerance: float = 1e-8) -> Comparison:
    """Bulk correlations of a periodic ``L``-site chain against symbol quadrature.

    Covers ``d = -dmax..dmax`` through the four species entries (negative
    distances are the transposed entries).  When the even sector is undamped
    only the odd-odd entry is compared.
    """
    infinite = model.infinite()
    finite = model.finite(L, periodic=True)
    degenerate = degenerate_even_sector(infinite)
    gamma = solve_lyapunov_finite(build_damping_matrices(finite), degenerate="zero" if degenerate else "raise")
    symbol = model_symbol(infinite)
    worst = 0.0
    for entry in ((0, 0),) if degenerate else ENTRIES:
        fin = bulk_profile(gamma, dmax, entry)
        inf = correlations_quadrature(symbol, dmax, entry)
        worst = max(worst, float(np.abs(fin.values - inf.values).max()))
    return Comparison(f"finite-L{L}-vs-symbol", worst, tolerance)


def exact_vs_gaussian(model: LatticeModel, tolerance: float = 1e-8) -> tuple[Comparison, Comparison]:
    """Exact-Liouvillian two- and four-point functions against the Lyapunov solution."""
    exact = ExactSteadyState(model)
    gamma = solve_lyapunov_finite(build_damping_matrices(model))
    two = float(np.abs(exact.two_point() - gamma.two_point()).max())
    n = 2 * model.chain.L
    four = 0.0
    for idx in itertools.combinations(range(n), 4):
        four = max(four, abs(exact.four_point(*idx) - wick_four_point(gamma, idx)))
    # a few products with repeated indices exercise the w^2 = 1 reduction
    for idx in ((0, 1, 0, 2), (1, 2, 3, 1), (0, 0, 2, 3)):
        four = max(four, abs(exact.four_point(*idx) - wick_four_point(gamma, idx)))
    return (Comparison("exact-vs-gaussian-two-point", two, tolerance),
            Comparison("exact-vs-gaussian-four-point", float(four), tolerance))
