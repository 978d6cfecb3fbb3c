import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nesscrit.errors import ModelTooSmallError, ModelValidationError, UnsupportedGeneratorError
from nesscrit.model import (
    ComplexAmplitude,
    FiniteChain,
    HamiltonianStencil,
    LatticeModel,
    LindbladGenerator,
    build_damping_matrices,
    build_generator_vectors,
    build_symbol_matrices,
    canonical_phase,
    circulant_blocks,
    reservoir_symbol,
)

from .conftest import odd_model

complexes = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


# ComplexAmplitude / LindbladGenerator -------------------------------------


def test_amplitude_canonical_phase():
    a = ComplexAmplitude(2.0, 3 * math.pi)
    assert a.g == pytest.approx(math.pi)
    assert ComplexAmplitude(1.0, -math.pi).g == pytest.approx(math.pi)
    assert canonical_phase(-math.pi / 2) == pytest.approx(-math.pi / 2)
    assert a.value == pytest.approx(-2.0)


@pytest.mark.parametrize("nu", [-1.0, math.nan, math.inf])
def test_amplitude_rejects_bad_magnitude(nu):
    with pytest.raises(ModelValidationError):
        ComplexAmplitude(nu, 0.0)


@given(complexes)
def test_amplitude_roundtrip(s):
    assert ComplexAmplitude.from_complex(s).value == pytest.approx(s, abs=1e-12)


def test_generator_invariants():
    with pytest.raises(ModelValidationError):
        LindbladGenerator(0, (), ())
    with pytest.raises(ModelValidationError):
        LindbladGenerator(2, (ComplexAmplitude(1),), (ComplexAmplitude(0), ComplexAmplitude(0)))
    with pytest.raises(ModelValidationError):
        LindbladGenerator.from_values([0, 0])


def test_generator_normalize_records_scale():
    gen = LindbladGenerator.from_values([2j, 1.0])
    norm, s0 = gen.normalize()
    assert s0 == pytest.approx(2j)
    assert norm.normalized
    assert norm.odd_values == pytest.approx([1.0, -0.5j])
    assert not gen.normalized


def test_from_fermions_matches_majorana_substitution():
    # c = (a - i b)/2, c^dag = (a + i b)/2 with a = c^dag + c, b = i(c - c^dag)
    chi, nu = 0.7, 0.4
    pump = LindbladGenerator.from_fermions(create=[chi, chi * nu])
    assert pump.odd_values == pytest.approx([chi / 2, chi * nu / 2])
    assert pump.even_values == pytest.approx([1j * chi / 2, 1j * chi * nu / 2])
    loss = LindbladGenerator.from_fermions(annihilate=[1.0])
    assert loss.odd_values == pytest.approx([0.5])
    assert loss.even_values == pytest.approx([-0.5j])


# generator vectors -----------------------------------------------------------


def test_single_site_loss_vectors():
    model = LatticeModel((LindbladGenerator.from_fermions(annihilate=[1.0]),), chain=FiniteChain(2))
    ls = build_generator_vectors(model)
    assert ls.shape == (2, 4)
    assert [int(np.count_nonzero(v)) for v in ls] == [2, 2]


def test_two_site_periodic_wrap():
    model = odd_model(1.0, 0.5 * np.exp(0.2j)).finite(4)
    ls = build_generator_vectors(model)
    assert ls.shape == (4, 8)
    wrap = ls[3]
    assert wrap[6] == pytest.approx(1.0)  # site 3 (last)
    assert wrap[0] == pytest.approx(0.5 * np.exp(0.2j))  # wraps onto site 0
    assert np.count_nonzero(wrap) == 2


def test_open_chain_drops_boundary_translations():
    ls = build_generator_vectors(odd_model(1.0, 1.0, 1.0).finite(5, periodic=False))
    assert ls.shape == (3, 10)


def test_span_exceeding_chain_is_rejected():
    with pytest.raises(ModelTooSmallError):
        odd_model(1.0, 1.0, 1.0).finite(2)


def test_translation_covariance():
    model = odd_model(1.0, 0.3 - 0.2j, 0.5j).finite(6)
    ls = build_generator_vectors(model)
    shifted = np.roll(ls, 2, axis=1)
    assert np.allclose(shifted[:-1], ls[1:])
    assert np.allclose(shifted[-1], ls[0])


# damping matrices --------------------------------------------------------------


def test_empty_model_has_zero_matrices():
    dm = build_damping_matrices(LatticeModel((), chain=FiniteChain(3)))
    assert not dm.X.any() and not dm.Y.any()


def test_single_site_odd_only_has_no_y():
    dm = build_damping_matrices(odd_model(1.0).finite(1))
    assert not dm.Y.any()


def test_two_site_spectrum_matches_symbol():
    g = 0.1
    gen = LindbladGenerator.from_values([1.0, np.exp(1j * g)])
    dm = build_damping_matrices(LatticeModel((gen,)).finite(8))
    phi = 2 * np.pi * np.arange(8) / 8
    band = -(reservoir_symbol(gen, phi) + reservoir_symbol(gen, -phi))
    ev = np.sort(np.linalg.eigvals(dm.X).real)
    expected = np.sort(np.concatenate([band, np.zeros(8)]))
    assert ev == pytest.approx(expected, abs=1e-12)


@given(st.lists(complexes, min_size=1, max_size=4), st.lists(complexes, min_size=1, max_size=4))
def test_reservoir_matrix_is_psd_and_y_antisymmetric(odd, even):
    n = max(len(odd), len(even))
    if not any(odd) and not any(even):
        return
    gen = LindbladGenerator.from_values(odd + [0] * (n - len(odd)), even + [0] * (n - len(even)))
    dm = build_damping_matrices(LatticeModel((gen,)).finite(max(n, 3)))
    herm = 0.5 * (dm.R + dm.R.conj().T)
    assert np.linalg.eigvalsh(herm).min() >= -1e-12 * max(1.0, np.abs(dm.R).max())
    assert np.allclose(dm.Y, -dm.Y.T)
    assert np.allclose(dm.R, dm.R.conj().T)


# symbols -----------------------------------------------------------------------


def test_single_site_symbol_at_zero():
    x, y = build_symbol_matrices(odd_model(1.0), 0.0)
    assert x == pytest.approx(-np.diag([2.0, 0.0]))
    assert y == pytest.approx(np.zeros((2, 2)))


def test_odd_only_y_has_zero_even_entry():
    _, y = build_symbol_matrices(odd_model(1.0, 0.3 + 0.4j), np.linspace(0, 6, 11))
    assert np.abs(y[..., 1, 1]).max() == 0
    assert np.abs(y[..., 0, 1]).max() == 0


def test_quantum_optical_symbol_singular_at_critical_point():
    from nesscrit.experiments.reference import quantum_optical_model

    model = quantum_optical_model(1.0, 1.0, 0.0)
    x, _ = build_symbol_matrices(model, np.pi)
    xm, _ = build_symbol_matrices(model, -np.pi)
    assert abs(np.linalg.det(x + xm.T)) < 1e-12


@pytest.mark.parametrize("L", [4, 9, 16, 64])
def test_circulant_blocks_match_symbol(L):
    ham = HamiltonianStencil.hopping(0.7) + HamiltonianStencil.onsite(-0.3)
    gens = (LindbladGenerator.from_values([1.0, 0.3j, -0.2], [0.1, 0.5, 0.0]),
            LindbladGenerator.from_fermions(create=[0.4]))
    model = LatticeModel(gens, ham)
    dm = build_damping_matrices(model.finite(L))
    phi, Xb = circulant_blocks(dm.X)
    _, Yb = circulant_blocks(dm.Y)
    x, y = build_symbol_matrices(model, phi)
    assert np.abs(Xb - x).max() < 1e-12
    assert np.abs(Yb - y).max() < 1e-12


def test_symbol_rejects_finite_models():
    with pytest.raises(ModelValidationError):
        build_symbol_matrices(odd_model(1.0).finite(3), 0.0)


def test_reservoir_symbol_examples():
    phi = np.linspace(-np.pi, np.pi, 100)
    assert reservoir_symbol(LindbladGenerator.from_values([1.0]), phi) == pytest.approx(np.ones(100))
    nu, g = 0.6, 0.8
    r = reservoir_symbol(LindbladGenerator.from_values([1.0, nu * np.exp(1j * g)]), phi)
    assert r == pytest.approx(1 + nu**2 + 2 * nu * np.cos(phi - g))
    assert reservoir_symbol(LindbladGenerator.from_values([1, 2, 1]), np.pi) == pytest.approx(0.0, abs=1e-15)


def test_reservoir_symbol_rejects_even_couplings():
    with pytest.raises(UnsupportedGeneratorError):
        reservoir_symbol(LindbladGenerator.from_values([1.0], [1.0]), 0.0)


def test_reservoir_symbol_nonnegative(rng):
    from .conftest import random_odd_generator

    phi = np.linspace(0, 2 * np.pi, 1000)
    for _ in range(50):
        r = reservoir_symbol(random_odd_generator(rng, 6), phi)
        assert np.isrealobj(r) and r.min() >= 0


# Hamiltonian stencil --------------------------------------------------------------


def test_hamiltonian_matrix_is_real_antisymmetric():
    K = (HamiltonianStencil.hopping(1.0) + HamiltonianStencil.onsite(0.5)).matrix(5)
    assert np.allclose(K, -K.T)


def test_hamiltonian_rejects_self_coupling():
    with pytest.raises(ModelValidationError):
        HamiltonianStencil({(0, ("odd", "odd")): 1.0})


def test_hamiltonian_range_must_fit_chain():
    with pytest.raises(ModelTooSmallError):
        LatticeModel((), HamiltonianStencil.hopping(1.0), FiniteChain(1))
