"""Oracle self-consistency and an independent dense solve of the matching conditions."""

import numpy as np
import pytest

from pseudowell.bound import find_real_bound_states
from pseudowell.potentials import PiecewiseSystem, PotentialSpec, decompose
from pseudowell.transfer import (DegenerateSystemError, delta_matrix, jump_matrix,
                                 oracle_amplitudes, oracle_bound_condition, oracle_real_bound_states,
                                 plane_wave_basis, region_matrix, system_factors, system_matrix)


def dense_solve(system, k, incident="left"):
    """Match plane waves region by region with numpy.linalg.solve.

    Unknowns are (A_j, B_j) for ``A exp(i q_j x) + B exp(-i q_j x)`` in every
    region; the incoming amplitude is fixed to one and the other one to zero.
    """
    xs, us, ss = system.interfaces, system.region_potentials, system.delta_strengths
    n = len(us)
    q = [np.sqrt(complex(k * k - u)) for u in us]
    rows, rhs = [], []

    def wave(j, x):
        e = np.exp(1j * q[j] * x)
        return np.array([e, 1 / e]), np.array([1j * q[j] * e, -1j * q[j] / e])

    for i, x in enumerate(xs):
        (f_l, d_l), (f_r, d_r) = wave(i, x), wave(i + 1, x)
        cont = np.zeros(2 * n, complex)
        cont[2 * i:2 * i + 2] = -f_l
        cont[2 * i + 2:2 * i + 4] = f_r
        jump = np.zeros(2 * n, complex)
        jump[2 * i:2 * i + 2] = d_l + ss[i] * f_l
        jump[2 * i + 2:2 * i + 4] = -d_r
        rows += [cont, jump]
        rhs += [0, 0]
    fix_in = np.zeros(2 * n, complex)
    fix_out = np.zeros(2 * n, complex)
    if incident == "left":
        fix_in[0], fix_out[2 * n - 1] = 1, 1
    else:
        fix_in[2 * n - 1], fix_out[0] = 1, 1
    rows += [fix_in, fix_out]
    rhs += [1, 0]
    c = np.linalg.solve(np.array(rows), np.array(rhs, complex))
    if incident == "left":
        return c[2 * n - 2], c[1]   # t, r
    return c[1], c[2 * n - 2]


@pytest.fixture
def random_system():
    rng = np.random.default_rng(7)
    xs = np.sort(rng.uniform(-2, 2, 4))
    us = [0] + list(rng.normal(size=3) + 1j * rng.normal(size=3)) + [0]
    ss = list(rng.normal(size=4) + 1j * rng.normal(size=4))
    return PiecewiseSystem(tuple(xs), tuple(us), tuple(ss))


@pytest.mark.parametrize("k", [0.3, 1.1, 4.0])
def test_oracle_matches_dense_solve(random_system, k):
    data = oracle_amplitudes(random_system, k)
    t_r, r_r = dense_solve(random_system, k, "left")
    t_l, r_l = dense_solve(random_system, k, "right")
    assert complex(data.tR) == pytest.approx(t_r, rel=1e-11)
    assert complex(data.rR) == pytest.approx(r_r, rel=1e-11)
    assert complex(data.tL) == pytest.approx(t_l, rel=1e-11)
    assert complex(data.rL) == pytest.approx(r_l, rel=1e-11)


def test_factors_are_unimodular(random_system):
    for f in system_factors(random_system, np.array([0.5, 2.0])):
        np.testing.assert_allclose(np.linalg.det(f), 1.0, atol=1e-12)


def test_region_matrix_composes():
    k = 1.3 + 0.2j
    whole = region_matrix(k, 0.0, 1.5)
    split = region_matrix(k, 0.7, 1.5) @ region_matrix(k, 0.0, 0.7)
    np.testing.assert_allclose(whole, split, atol=1e-14)
    np.testing.assert_allclose(np.linalg.det(whole), 1.0, atol=1e-14)


def test_region_matrix_zero_wavenumber_is_drift():
    np.testing.assert_allclose(region_matrix(0.0, 0.0, 2.0), [[1, 2], [0, 1]], atol=1e-15)


def test_delta_matrix_equals_basis_change_of_jump():
    k, x0, s = 0.8, 0.4, 0.3 - 1.1j
    via_basis = np.linalg.inv(plane_wave_basis(k, x0)) @ jump_matrix(s) @ plane_wave_basis(k, x0)
    np.testing.assert_allclose(delta_matrix(s, k, x0), via_basis, atol=1e-14)


def test_delta_matrix_rejects_zero_k():
    with pytest.raises(ValueError):
        delta_matrix(1.0, 0.0, 0.0)


def test_splitting_a_region_changes_nothing():
    spec = PotentialSpec.model_i(3.0, 1.2, 0.7)
    base = decompose(spec)
    split = PiecewiseSystem((-0.6, 0.1, 0.6), (0, -3.0, -3.0, 0), (-0.7j, 0, 0.7j))
    k = np.linspace(0.1, 5, 9)
    np.testing.assert_allclose(system_matrix(base, k), system_matrix(split, k), atol=1e-12)


def test_free_space_is_transparent():
    free = PiecewiseSystem((-1.0, 1.0), (0, 0, 0), (0, 0))
    data = oracle_amplitudes(free, np.array([0.5, 3.0]))
    np.testing.assert_allclose(data.tR, 1, atol=1e-14)
    np.testing.assert_allclose(data.rR, 0, atol=1e-14)


def test_single_delta_textbook():
    # t = 1/(1 + g/(2ik)) for psi' jump g psi
    g, k = -0.9, 0.7
    data = oracle_amplitudes(PiecewiseSystem((0.0,), (0, 0), (g,)), k)
    assert complex(data.tR) == pytest.approx(1 / (1 - g / (2j * k)), rel=1e-14)


def test_degenerate_system_raises():
    # a spectral singularity of a single complex delta: s = 2ik at k = 1
    with pytest.raises(DegenerateSystemError):
        oracle_amplitudes(PiecewiseSystem((0.0,), (0, 0), (2j,)), 1.0)


def test_oracle_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        oracle_amplitudes(decompose(PotentialSpec.model_i(1, 1)), [0.0, 1.0])


def test_bound_condition_single_delta():
    # attractive delta of strength -mu binds at beta = mu/2
    sys_ = PiecewiseSystem((0.0,), (0, 0), (-1.4,))
    assert abs(oracle_bound_condition(sys_, 0.7)) < 1e-15
    assert oracle_real_bound_states(sys_, 5.0) == pytest.approx([0.7], abs=1e-12)


def test_bound_condition_handles_deep_wells():
    # many e-folds of growth across the structure must not overflow
    spec = PotentialSpec.model_i(400.0, 10.0, 3.0)
    roots = oracle_real_bound_states(decompose(spec), 19.999, n=8192)
    solver = [s.beta.real for s in find_real_bound_states(spec, n=8192)]
    assert len(roots) == len(solver) > 50
    np.testing.assert_allclose(roots, solver, atol=1e-9)
