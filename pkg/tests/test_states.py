import numpy as np
import pytest

from modaldyn import (
    DensityMatrix,
    EpistemicState,
    InvalidDensityMatrixError,
    NonOrthogonalEntriesError,
    OnticState,
    SystemLayout,
    epistemic_to_density,
    extract_epistemic,
)
from modaldyn.random_objects import random_density_matrix

QUBIT = SystemLayout.qubits(("Q",))


def test_density_matrix_validation():
    good = DensityMatrix(np.diag([0.6, 0.4]).astype(complex), QUBIT)
    assert abs(good.purity() - (0.36 + 0.16)) < 1e-14
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix(np.diag([0.6, 0.6]).astype(complex), QUBIT)  # trace 1.2
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix(np.array([[0.5, 0.5], [-0.5, 0.5]]), QUBIT)  # not Hermitian
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix(np.diag([1.5, -0.5]).astype(complex), QUBIT)  # not PSD
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix(np.eye(3) / 3.0, QUBIT)  # wrong shape for layout


def test_density_matrix_is_immutable():
    rho = DensityMatrix(np.diag([0.6, 0.4]).astype(complex), QUBIT)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0


def test_ontic_state_unit_norm_and_phase():
    with pytest.raises(Exception):
        OnticState(np.array([1.0, 1.0]), QUBIT, 0)
    s = OnticState(np.array([0.0, 1j]), QUBIT, 0)
    # stored vector is phase-canonicalized
    assert np.abs(s.vector - np.array([0.0, 1.0])).max() < 1e-15
    p = s.projector()
    assert np.abs(p - np.diag([0.0, 1.0])).max() < 1e-15


def test_extract_epistemic_reads_spectrum():
    rho = DensityMatrix(np.diag([0.3, 0.7]).astype(complex), QUBIT)
    e = extract_epistemic(rho)
    probs = [p for p, _ in e]
    assert probs == pytest.approx([0.7, 0.3])
    # entries come back in descending probability order with matching vectors
    assert np.abs(e.entries[0][1].vector - np.array([0.0, 1.0])).max() < 1e-14
    assert np.abs(e.entries[1][1].vector - np.array([1.0, 0.0])).max() < 1e-14
    assert e.truncation_mass == 0.0
    assert e.degenerate_clusters == ()


def test_extract_flags_degeneracy():
    rho = DensityMatrix(np.eye(2, dtype=complex) / 2.0, QUBIT)
    e = extract_epistemic(rho)
    assert e.degenerate_clusters == ((0, 1),)
    assert e.is_degenerate(0) and e.is_degenerate(1)


def test_extract_pure_state_shortcut():
    v = np.array([0.6, 0.8], dtype=complex)
    rho = DensityMatrix(np.outer(v, v.conj()), QUBIT)
    e = extract_epistemic(rho)
    assert len(e) == 1
    p, state = e.entries[0]
    assert p == 1.0
    assert np.abs(state.vector - v).max() < 1e-8


def test_threshold_moves_small_weights_to_truncation_mass():
    rho = DensityMatrix(np.diag([0.9995, 0.0005]).astype(complex), QUBIT)
    e = extract_epistemic(rho, threshold=1e-3)
    assert len(e) == 1
    assert e.truncation_mass == pytest.approx(0.0005, abs=1e-12)
    with pytest.raises(ValueError):
        extract_epistemic(rho, threshold=1.0)
    with pytest.raises(ValueError):
        extract_epistemic(rho, threshold=-0.1)


def test_roundtrip_random_states():
    rng = np.random.default_rng(101)
    for trial in range(30):
        dim = int(rng.integers(2, 7))
        layout = SystemLayout((dim,), ("Q",))
        rho = random_density_matrix(layout, rng)
        e = extract_epistemic(rho)
        back = epistemic_to_density(e)
        assert np.abs(back.matrix - rho.matrix).max() < 1e-10
        basis = e.basis_matrix()
        gram = basis.conj().T @ basis
        assert np.abs(gram - np.eye(len(e))).max() < 1e-11


def test_reduce_produces_subsystem_state():
    layout = SystemLayout.qubits(("A", "B"))
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / np.sqrt(2.0)
    rho = DensityMatrix(np.outer(bell, bell.conj()), layout)
    reduced = rho.reduce(("A",))
    assert reduced.layout.labels == ("A",)
    assert np.abs(reduced.matrix - np.eye(2) / 2.0).max() < 1e-14
    e = extract_epistemic(reduced)
    assert [p for p, _ in e] == pytest.approx([0.5, 0.5])
    assert e.degenerate_clusters == ((0, 1),)


def test_epistemic_state_rejects_non_orthogonal_entries():
    v0 = OnticState(np.array([1.0, 0.0]), QUBIT, 0)
    v1 = OnticState(np.array([1.0, 1.0]) / np.sqrt(2.0), QUBIT, 1)
    with pytest.raises(NonOrthogonalEntriesError):
        EpistemicState(entries=((0.5, v0), (0.5, v1)))


def test_epistemic_state_rejects_bad_mass_balance():
    v0 = OnticState(np.array([1.0, 0.0]), QUBIT, 0)
    v1 = OnticState(np.array([0.0, 1.0]), QUBIT, 1)
    with pytest.raises(Exception):
        EpistemicState(entries=((0.5, v0), (0.3, v1)))


def test_rebuild_refuses_large_truncation():
    rho = DensityMatrix(np.diag([0.9, 0.1]).astype(complex), QUBIT)
    e = extract_epistemic(rho, threshold=0.5)
    assert e.truncation_mass == pytest.approx(0.1)
    with pytest.raises(ValueError):
        epistemic_to_density(e)
