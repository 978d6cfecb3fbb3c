import math

import numpy as np
import pytest

from nesscrit.criticality import predict_exponents, to_symbol_fraction
from nesscrit.errors import FitWindowError, ModelValidationError
from nesscrit.experiments.crosscheck import exact_vs_gaussian, finite_vs_symbol, residue_vs_quadrature
from nesscrit.experiments.figures import reproduce_figure_data
from nesscrit.experiments.fitting import fit_dynamical_exponent, fit_power_law, fit_static_exponent
from nesscrit.experiments.reference import (
    quantum_optical_model,
    quantum_optical_polynomials,
    quantum_optical_reference,
    three_site_double_root,
    three_site_staircase,
    two_site_generator,
)
from nesscrit.experiments.sweep import Grid, ParameterPath, SweepSpec, evaluate_point, sweep
from nesscrit.io import read_csv
from nesscrit.model import LatticeModel, LindbladGenerator
from nesscrit.ness import correlations_quadrature, model_symbol

G = LindbladGenerator.from_values
PHI = np.linspace(-np.pi, np.pi, 513)


def log_spec(model, critical=0.0, count=25, side=1, index=1):
    return SweepSpec(Grid(1e-4, 1e-2, count, "log", side), model=model,
                     path=ParameterPath(0, index, "g"), critical=critical)


# reference models ------------------------------------------------------------------------


def test_reference_g_zero_has_no_anomalous_part():
    n11, _, _ = quantum_optical_polynomials(1.0, 0.7, 0.0)
    assert n11.trimmed().is_zero()


def test_reference_nu_zero_is_local():
    n11, n12, d = quantum_optical_polynomials(1.3, 0.0, 0.4)
    assert set(d.trimmed().to_dict()) == {0}
    assert set(n12.trimmed().to_dict()) == {0}


@pytest.mark.parametrize("params", [(1.0, 0.5, 0.3), (0.7, 1.2, -0.8), (2.0, 0.9, 2.5)])
def test_reference_matches_generic_solver(params):
    ref = quantum_optical_reference(*params)(PHI)
    gen = model_symbol(quantum_optical_model(*params))(PHI)
    assert np.abs(ref - gen).max() < 1e-10


def test_reference_rejects_bad_parameters():
    with pytest.raises(ModelValidationError):
        quantum_optical_model(0.0, 1.0, 0.0)
    with pytest.raises(ModelValidationError):
        quantum_optical_model(1.0, -1.0, 0.0)


def test_families_are_critical_at_origin():
    assert predict_exponents(two_site_generator(1.0, 0.0)).critical
    assert predict_exponents(three_site_double_root()).predicted_lambda == 0.5
    assert predict_exponents(three_site_staircase()).predicted_lambda == 1
    assert not predict_exponents(three_site_staircase(0.1)).critical


# sweeps -------------------------------------------------------------------------------------


def test_parameter_path_apply():
    model = LatticeModel((G([1.0, 1.0]),))
    moved = ParameterPath(0, 1, "g").apply(model, 0.3)
    assert moved.generators[0].odd[1].g == pytest.approx(0.3)
    shifted = ParameterPath(0, 1, "nu", mode="shift").apply(model, 0.5)
    assert shifted.generators[0].odd[1].nu == pytest.approx(1.5)
    with pytest.raises(ModelValidationError):
        ParameterPath(0, 5, "g").apply(model, 0.1)
    with pytest.raises(ModelValidationError):
        ParameterPath(field="phase")


def test_grid_values():
    assert Grid(0, 1, 5).values(None) == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    v = Grid(1e-4, 1e-2, 3, "log", -1).values(2.0)
    assert v == pytest.approx([2 - 1e-4, 2 - 1e-3, 2 - 1e-2])
    with pytest.raises(ModelValidationError):
        Grid(0, 1, 1)
    with pytest.raises(ModelValidationError):
        Grid(-1, 1, 5, "log").values(0.0)


def test_single_site_sweep_point():
    spec = SweepSpec(Grid(0.5, 1.5, 3), model=LatticeModel((G([1.0]),)), path=ParameterPath(0, 0, "nu"))
    pt = evaluate_point(spec, 1.0)
    assert pt.xi_inv == math.inf
    assert pt.gap == pytest.approx(2.0)
    assert pt.error is None


def test_sweep_records_failures_and_continues():
    spec = SweepSpec(Grid(-1.0, 1.0, 5), model=LatticeModel((G([1.0, 1.0]),)),
                     path=ParameterPath(0, 1, "nu"))
    res = sweep(spec)
    assert len(res.points) == 5
    assert len(res.failures) == 2  # negative magnitudes
    assert np.isfinite(res.gap[2:]).all()


def test_sweep_is_ordered_and_parallel_matches_serial():
    spec = log_spec(LatticeModel((two_site_generator(1.0, 0.0),)), count=16)
    a, b = sweep(spec, workers=1), sweep(spec, workers=2)
    assert np.array_equal(a.p, b.p)
    assert np.allclose(a.xi_inv, b.xi_inv, rtol=0, atol=0)
    assert np.all(np.diff(a.p) > 0)


def test_mixed_generator_sweep_reports_gap_only():
    model = LatticeModel((G([1.0, 0.5], [0.3, 0.0]),))
    pt = evaluate_point(SweepSpec(Grid(0, 1, 2), model=model, path=ParameterPath(0, 1, "g")), 0.2)
    assert math.isnan(pt.xi_inv) and pt.gap > 0 and pt.error


# fitting --------------------------------------------------------------------------------------


def test_fit_power_law_synthetic():
    x = np.logspace(-4, -2, 25)
    fit = fit_power_law(x, 3.0 * x**0.5, 0.0)
    assert fit.exponent == pytest.approx(0.5, abs=1e-6)
    assert fit.n_points == 25
    fit = fit_power_law(1.0 - x, x**4, 1.0, lam=2.0, quantity="gap")
    assert fit.exponent == pytest.approx(4.0, abs=1e-6)
    assert fit.z == pytest.approx(2.0)


def test_fit_window_errors():
    x = np.logspace(-4, -2, 25)
    with pytest.raises(FitWindowError):
        fit_power_law(x, x, 0.0, window=(1e-1, 1.0))
    with pytest.raises(FitWindowError):
        fit_power_law(x, x, 0.0, window=(1e-2, 1e-4))
    with pytest.raises(FitWindowError):
        fit_power_law(x[:5], x[:5], 0.0)


@pytest.mark.parametrize(
    "model,lam,dyn",
    [
        (LatticeModel((two_site_generator(1.0, 0.0),)), 1.0, 2.0),
        (LatticeModel((three_site_double_root(),)), 0.5, 2.0),
        (LatticeModel((three_site_staircase(),)), 1.0, 2.0),
    ],
)
def test_static_and_dynamical_exponents(model, lam, dyn):
    res = sweep(log_spec(model))
    static = fit_static_exponent(res, 0.0)
    assert static.n_points == 25
    assert static.exponent == pytest.approx(lam, abs=0.02)
    dynamic = fit_dynamical_exponent(res, 0.0, lam)
    assert dynamic.exponent == pytest.approx(dyn, abs=0.02)


def test_quantum_optical_exponents():
    spec = SweepSpec(Grid(1e-4, 1e-2, 25, "log"), kind="quantum-optical", critical=0.0,
                     qo_params=(1.0, 1.0, 0.0), qo_field="g")
    res = sweep(spec)
    static = fit_static_exponent(res, 0.0)
    assert static.n_points == 25
    assert static.exponent == pytest.approx(1.0, abs=0.01)
    assert fit_dynamical_exponent(res, 0.0, 1.0).exponent == pytest.approx(2.0, abs=0.02)


# cross-checks -----------------------------------------------------------------------------------


def test_crosscheck_routes():
    assert residue_vs_quadrature(G([1.0, 0.4 + 0.3j, -0.2j])).passed
    assert finite_vs_symbol(quantum_optical_model(1.0, 0.6, 0.4), L=128).passed
    assert finite_vs_symbol(LatticeModel((two_site_generator(1.0, 0.5),)), L=128).passed
    two, four = exact_vs_gaussian(quantum_optical_model(1.0, 0.6, 0.4).finite(3))
    assert two.passed and four.passed


def test_crosscheck_detects_mismatch():
    cmp = finite_vs_symbol(LatticeModel((two_site_generator(1.0, 0.02),)), L=16, tolerance=1e-12)
    assert not cmp.passed


# figures ------------------------------------------------------------------------------------------


def test_figure_two(tmp_path):
    bundle = reproduce_figure_data("fig2", tmp_path, points=11)
    rows = read_csv(tmp_path / "fig2_sweep.csv")
    assert len(rows) == 11
    mid = rows[5]
    assert mid["g"] == 0.0 and mid["xi_inv"] == 0.0 and mid["gap"] == pytest.approx(0, abs=1e-12)
    assert all(r["xi_inv"] > 0 for r in rows if r["g"] != 0)
    assert (tmp_path / "fig2.gp").exists()
    assert len(bundle.files) == 2


def test_figure_four(tmp_path):
    reproduce_figure_data("fig4", tmp_path, points=11, dmax=10)
    for name in ("double_root", "staircase"):
        sweep_rows = read_csv(tmp_path / f"fig4_{name}_sweep.csv")
        heat = read_csv(tmp_path / f"fig4_{name}_heatmap.csv")
        assert len(sweep_rows) == 11
        assert {r["g"] for r in heat} == {r["g"] for r in sweep_rows} - {0.0}
        assert all(r["abs_corr"] >= 0 for r in heat)


def test_figure_unknown(tmp_path):
    with pytest.raises(ModelValidationError):
        reproduce_figure_data("fig9", tmp_path)
