"""Parameter sweeps over generator coefficients or the quantum-optical parameters.

Every grid point is solved independently; a failure is recorded on its row
and the sweep continues.  Rows come back in grid order whatever the worker
count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..criticality import (
    closest_root_modulus,
    correlation_length,
    damping_gap,
    damping_gap_model,
    denominator_roots,
    model_symbol_fraction,
)
from ..errors import ModelValidationError, NessError
from ..model import ComplexAmplitude, LatticeModel
from .reference import quantum_optical_fraction, quantum_optical_model

FIELDS = ("nu", "g")
SPECIES = ("odd", "even", "both")
MODES = ("set", "shift")


@dataclass(frozen=True)
class ParameterPath:
    """Which coefficient a sweep moves.

    ``mode="set"`` writes the swept value into ``field``; ``mode="shift"`` adds
    it to the template value (useful for phases shared by both species).
    """

    generator: int = 0
    index: int = 0
    field: str = "g"
    species: str = "odd"
    mode: str = "set"

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ModelValidationError(f"field must be one of {FIELDS}, got {self.field!r}")
        if self.species not in SPECIES:
            raise ModelValidationError(f"species must be one of {SPECIES}, got {self.species!r}")
        if self.mode not in MODES:
            raise ModelValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.generator < 0 or self.index < 0:
            raise ModelValidationError("generator and coefficient indices must be nonnegative")

    def apply(self, model: LatticeModel, value: float) -> LatticeModel:
        if self.generator >= len(model.generators):
            raise ModelValidationError(f"model has no generator {self.generator}")
        gen = model.generators[self.generator]
        if self.index >= gen.span:
            raise ModelValidationError(f"generator {self.generator} has no coefficient {self.index}")
        species = ("odd", "even") if self.species == "both" else (self.species,)
        for sp in species:
            amp: ComplexAmplitude = (gen.odd if sp == "odd" else gen.even)[self.index]
            current = getattr(amp, self.field)
            new = current + value if self.mode == "shift" else value
            if self.field == "nu" and new < 0:
                raise ModelValidationError(f"swept magnitude became negative ({new})")
            gen = gen.with_coefficient(self.index, sp, **{self.field: new})
        return model.replace_generator(self.generator, gen)


@dataclass(frozen=True)
class Grid:
    """Sweep abscissae.

    ``spacing="linear"``: ``count`` points from ``start`` to ``stop``.
    ``spacing="log"``: points at ``critical + side * 10^t`` with ``t`` evenly
    spaced between ``log10(start)`` and ``log10(stop)``; ``start`` and
    ``stop`` are then distances from the critical value.
    """

    start: float
    stop: float
    count: int
    spacing: str = "linear"
    side: int = 1

    def __post_init__(self):
        if self.count < 2:
            raise ModelValidationError("grid needs at least two points")
        if self.spacing not in ("linear", "log"):
            raise ModelValidationError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.start == self.stop:
            raise ModelValidationError("grid start and stop coincide")
        if self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
            raise ModelValidationError("log grids need positive distances")
        if self.side not in (1, -1):
            raise ModelValidationError("side must be +1 or -1")

    def values(self, critical: float | None) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.start, self.stop, self.count)
        if critical is None:
            raise ModelValidationError("log-toward-critical grids need the critical value")
        dist = np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        return critical + self.side * dist


@dataclass(frozen=True)
class SweepSpec:
    """A model template and one swept parameter.

    ``kind="generator"`` moves ``path`` inside ``model``.  ``kind="quantum-optical"``
    sweeps ``qo_field`` (``"nu"`` or ``"g"``) of the quantum-optical chain with the
    other parameters from ``qo_params = (chi, nu, g)``.
    """

    grid: Grid
    kind: str = "generator"
    model: LatticeModel | None = None
    path: ParameterPath = field(default_factory=ParameterPath)
    critical: float | None = None
    qo_params: tuple = (1.0, 1.0, 0.0)
    qo_field: str = "g"

    def __post_init__(self):
        if self.kind not in ("generator", "quantum-optical"):
            raise ModelValidationError(f"unknown sweep kind {self.kind!r}")
        if self.kind == "generator" and self.model is None:
            raise ModelValidationError("generator sweeps need a model template")
        if self.kind == "quantum-optical" and self.qo_field not in ("nu", "g"):
            raise ModelValidationError("quantum-optical sweeps move 'nu' or 'g'")

    def values(self) -> np.ndarray:
        return self.grid.values(self.critical)


@dataclass(frozen=True)
class SweepPoint:
    p: float
    xi_inv: float = math.nan
    gap: float = math.nan
    root_mod: float = math.nan
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple

    @property
    def p(self) -> np.ndarray:
        return np.array([pt.p for pt in self.points])

    @property
    def xi_inv(self) -> np.ndarray:
        return np.array([pt.xi_inv for pt in self.points])

    @property
    def gap(self) -> np.ndarray:
        return np.array([pt.gap for pt in self.points])

    @property
    def root_mod(self) -> np.ndarray:
        return np.array([pt.root_mod for pt in self.points])

    @property
    def failures(self) -> list:
        return [pt for pt in self.points if pt.error is not None]


def _generator_point(model: LatticeModel) -> tuple[float, float, float]:
    if model.is_odd_only:
        frac = model_symbol_fraction(model)
        roots = denominator_roots(frac)
        return correlation_length(frac, roots), damping_gap(frac), closest_root_modulus(frac, roots)
    # mixed species: only the damping gap is available in general
    return math.nan, damping_gap_model(model), math.nan


def evaluate_point(spec: SweepSpec, p: float) -> SweepPoint:
    try:
        if spec.kind == "quantum-optical":
            chi, nu, g = spec.qo_params
            if spec.qo_field == "nu":
                nu = p
            else:
                g = p
            frac = quantum_optical_fraction(chi, nu, g)
            roots = denominator_roots(frac)
            xi = correlation_length(frac, roots)
            gap = damping_gap_model(quantum_optical_model(chi, nu, g))
            return SweepPoint(float(p), xi, gap, closest_root_modulus(frac, roots))
        model = spec.path.apply(spec.model, float(p))
        xi, gap, rm = _generator_point(model)
        err = None if not math.isnan(xi) else "correlation length needs odd-only generators"
        return SweepPoint(float(p), xi, gap, rm, err)
    except (NessError, ValueError, np.linalg.LinAlgError) as exc:
        return SweepPoint(float(p), error=f"{type(exc).__name__}: {exc}")


def _evaluate_chunk(args):
    spec, ps = args
    return [evaluate_point(spec, p) for p in ps]


def sweep(spec: SweepSpec, workers: int | None = 1) -> SweepResult:
    """Solve every grid point; ``workers=None`` uses all available cores."""
    ps = spec.values()
    workers = (os.cpu_count() or 1) if workers is None else max(1, int(workers))
    if workers == 1 or len(ps) < 2 * workers:
        points = _evaluate_chunk((spec, ps))
    else:
        chunks = [(spec, c) for c in np.array_split(ps, workers) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = [pt for part in pool.map(_evaluate_chunk, chunks) for pt in part]
    return SweepResult(spec, tuple(points))
