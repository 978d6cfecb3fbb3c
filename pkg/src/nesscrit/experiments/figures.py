"""CSV bundles (plus gnuplot stubs) for the correlation-length and gap figures.

``fig2``: quantum-optical chain at ``chi = nu = 1``, ``xi^{-1}`` and ``Delta`` vs ``g``.
``fig4``: the two three-site families, ``|<w_1 w_{1+2d}>|`` heatmaps over
``(g, d)`` and ``xi^{-1}`` curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..criticality import denominator_roots, residue_correlations, to_symbol_fraction
from ..errors import ModelValidationError, NessError
from ..io import write_csv
from ..model import LatticeModel
from .reference import three_site_double_root, three_site_staircase
from .sweep import Grid, ParameterPath, SweepSpec, sweep

FIGURES = ("fig2", "fig4")


@dataclass(frozen=True)
class FigureBundle:
    figure: str
    files: tuple

    def to_json(self) -> dict:
        return {"figure": self.figure, "files": [str(f) for f in self.files]}


def _sweep_rows(result):
    return [(pt.p, pt.xi_inv, pt.gap, pt.root_mod) for pt in result.points]


SWEEP_HEADER = ("g", "xi_inv", "gap", "root_mod")

FIG2_GNUPLOT = """\
set datafile separator ','
set key autotitle columnhead
set multiplot layout 1,2
set xlabel 'g'
set ylabel 'inverse correlation length'
plot 'fig2_sweep.csv' using 1:2 with lines
set ylabel 'damping gap'
plot 'fig2_sweep.csv' using 1:3 with lines
unset multiplot
"""

FIG4_GNUPLOT = """\
set datafile separator ','
set key autotitle columnhead
set multiplot layout 2,2
set logscale cb
set xlabel 'g'
set ylabel 'd'
plot 'fig4_{left}_heatmap.csv' using 1:2:3 with image
plot 'fig4_{right}_heatmap.csv' using 1:2:3 with image
unset logscale cb
set logscale xy
set ylabel 'inverse correlation length'
plot 'fig4_{left}_sweep.csv' using (abs($1)):2 with linespoints
plot 'fig4_{right}_sweep.csv' using (abs($1)):2 with linespoints
unset multiplot
"""


def heatmap_rows(generator_of_g, g_values, dmax: int):
    """``(g, d, |<w_1 w_{1+2d}>|)`` rows; critical grid points are skipped."""
    rows = []
    for g in g_values:
        frac = to_symbol_fraction(generator_of_g(g))
        roots = denominator_roots(frac)
        if roots.on_circle:
            continue
        prof = residue_correlations(frac, dmax, roots)
        rows.extend((float(g), int(d), float(abs(v))) for d, v in zip(prof.distances, prof.values))
    return rows


def reproduce_figure_data(figure: str, outdir, points: int = 101, dmax: int = 30,
                          workers: int | None = 1) -> FigureBundle:
    if figure not in FIGURES:
        raise ModelValidationError(f"figure must be one of {FIGURES}, got {figure!r}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if figure == "fig2":
        grid = Grid(-0.5, 0.5, points)
        res = sweep(SweepSpec(grid, kind="quantum-optical", qo_params=(1.0, 1.0, 0.0), qo_field="g"), workers)
        files.append(write_csv(out / "fig2_sweep.csv", SWEEP_HEADER, _sweep_rows(res)))
        (out / "fig2.gp").write_text(FIG2_GNUPLOT)
        files.append(out / "fig2.gp")
        return FigureBundle(figure, tuple(files))

    families = {
        "double_root": three_site_double_root,
        "staircase": three_site_staircase,
    }
    grid = Grid(-0.5, 0.5, points)
    g_values = grid.values(None)
    for name, family in families.items():
        model = LatticeModel((family(0.0),))
        res = sweep(SweepSpec(grid, model=model, path=ParameterPath(0, 1, "g"), critical=0.0), workers)
        files.append(write_csv(out / f"fig4_{name}_sweep.csv", SWEEP_HEADER, _sweep_rows(res)))
        try:
            rows = heatmap_rows(family, g_values, dmax)
        except NessError as exc:  # pragma: no cover - reported, not fatal
            rows = []
            (out / f"fig4_{name}_heatmap.err").write_text(str(exc) + "\n")
        files.append(write_csv(out / f"fig4_{name}_heatmap.csv", ("g", "d", "abs_corr"), rows))
    (out / "fig4.gp").write_text(FIG4_GNUPLOT.format(left="double_root", right="staircase"))
    files.append(out / "fig4.gp")
    return FigureBundle(figure, tuple(files))
