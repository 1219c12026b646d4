import numpy as np
import pytest

import nvlac
from nvlac import FieldSpec, InvalidArgumentError, NotFoundError
from nvlac.spectra import _golden_min, pair_indices, reference_pair_states, tls_extract


def test_eigensystem_orders_and_diagonalizes(rng):
    m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    h = (m + m.conj().T) / 2
    eig = nvlac.eigensystem(h)
    assert np.all(np.diff(eig.values) >= 0)
    d = eig.vectors.conj().T @ h @ eig.vectors
    assert np.linalg.norm(d - np.diag(eig.values)) < 1e-10


def test_eigensystem_rejects_non_hermitian(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    with pytest.raises(InvalidArgumentError):
        nvlac.eigensystem(m)
    nvlac.eigensystem(m, check=False)   # explicit opt-out only


def test_reference_pair_states_structure():
    plus, minus = reference_pair_states()
    for v in (plus, minus):
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert abs(np.vdot(plus, minus)) < 1e-12
    # equal weight on the two outer electron levels, none in the middle
    probs = np.abs(plus.reshape(3, 2, 3)) ** 2
    assert probs[1].sum() < 1e-12
    assert probs[0].sum() == pytest.approx(0.5, abs=1e-12)


def test_pair_indices_finds_adjacent_mixed_pair(lac_eig):
    lo, hi = pair_indices(lac_eig)
    assert hi == lo + 1
    gap = lac_eig.values[hi] - lac_eig.values[lo]
    assert 1.0 < gap < 2.0


def test_tls_extract_moment_and_ordering(lac_eig):
    tls = tls_extract(lac_eig, pair_indices(lac_eig))
    assert tls.omega0 > 0
    assert tls.moment == pytest.approx(0.9984, abs=2e-3)
    # psi1 is the lower level
    e1 = np.real(np.vdot(tls.psi1, lac_eig.vectors @ (np.diag(lac_eig.values)
                                                      @ (lac_eig.vectors.conj().T @ tls.psi1))))
    e2 = np.real(np.vdot(tls.psi2, lac_eig.vectors @ (np.diag(lac_eig.values)
                                                      @ (lac_eig.vectors.conj().T @ tls.psi2))))
    assert e1 < e2


def test_transition_moments_matrix(lac_eig):
    from nvlac.system import ELECTRON
    m = nvlac.transition_moments(lac_eig, ELECTRON[2])
    assert m.shape == (18, 18)
    assert np.all(m >= 0)
    assert np.linalg.norm(m - m.T) < 1e-10


def test_golden_min_quadratic():
    got = _golden_min(lambda x: (x - 2.7182) ** 2 + 0.3, 0.0, 5.0, 1e-4)
    assert abs(got - 2.7182) < 1e-3


def test_track_levels_single_point(params):
    curves = nvlac.track_levels(params, 28.9, 0.0, [38.4])
    eig = nvlac.eigensystem(nvlac.build_hamiltonian(params, FieldSpec()))
    assert curves.curves.shape == (18, 1)
    assert np.allclose(curves.curves[:, 0], eig.values)


def test_track_levels_follows_states_through_crossings(params):
    """Tracked curves may cross, so they are not everywhere sorted."""
    grid = np.linspace(30.0, 46.0, 81)
    subset = np.arange(6, 18)
    curves = nvlac.track_levels(params, 28.9, 0.0, grid, subset=subset).curves
    assert curves.shape == (12, 81)
    # continuity: no jumps beyond a few MHz between neighboring angles
    assert np.max(np.abs(np.diff(curves, axis=1))) < 5.0
    # at least one genuine crossing within the window
    order_violated = np.any(np.diff(curves, axis=0) < 0)
    assert order_violated


def test_find_lac_defaults(params, lac):
    assert 35.0 < lac.theta_star < 42.0
    assert lac.omega0 == pytest.approx(1.612, abs=0.01)
    # the minimum is flat at the 1e-4 degree refinement scale
    again = nvlac.find_lac(params, 28.9, 0.0, (36.0, 41.0))
    assert again.theta_star == pytest.approx(lac.theta_star, abs=1e-3)


def test_find_lac_rejects_edge_minimum(params):
    with pytest.raises(NotFoundError):
        nvlac.find_lac(params, 20.0, 0.0, (35.0, 42.0))
    with pytest.raises(InvalidArgumentError):
        nvlac.find_lac(params, 28.9, 0.0, (42.0, 35.0))


def test_find_lac_without_coupling_is_a_true_crossing(params):
    """Zeroed hyperfine removes the mixing: no anti-crossing in the usual
    window, and the wide-angle crossing has near-zero gap and moment."""
    bare = nvlac.params_from_items(
        {"A1xx": 0.0, "A1yy": 0.0, "A1zz": 0.0, "A1xz": 0.0}, base=params)
    with pytest.raises(NotFoundError):
        nvlac.find_lac(bare, 28.9, 0.0, (35.0, 42.0))
    crossing = nvlac.find_lac(bare, 28.9, 0.0, (80.0, 95.0))
    assert crossing.omega0 < 0.1
    assert crossing.moment < 0.1


def test_far_from_lac_pair_is_unmixed(params):
    eig = nvlac.eigensystem(nvlac.build_hamiltonian(params, FieldSpec(theta=20.0)))
    tls = tls_extract(eig, pair_indices(eig))
    assert tls.omega0 > 20.0
    assert tls.moment < 0.1


def test_spectrum_phi_invariant_for_axial_tensors(params):
    """With axially symmetric couplings the azimuth cannot matter."""
    axial = nvlac.params_from_items(
        {"A1xx": 150.0, "A1yy": 150.0, "A1xz": 0.0}, base=params)
    va = np.linalg.eigvalsh(nvlac.build_hamiltonian(axial, FieldSpec(phi=0.0)))
    vb = np.linalg.eigvalsh(nvlac.build_hamiltonian(axial, FieldSpec(phi=222.0)))
    assert np.max(np.abs(va - vb)) < 1e-9
