import numpy as np
import pytest
import scipy.linalg

from modaldyn import (
    CptVerificationError,
    DensityMatrix,
    KrausChannel,
    LindbladGenerator,
    NotUnitaryError,
    Superoperator,
    SystemLayout,
    apply,
    choi_to_kraus,
    compose,
    evolve,
    identity_channel,
    kraus_to_choi,
    kraus_to_superoperator,
    lindblad_superoperator,
    superoperator_to_choi,
    trace_distance,
    unitary_channel,
    verify_cpt,
    verify_kraus_operators,
    verify_superoperator_matrix,
)
from modaldyn.random_objects import (
    random_density_matrix,
    random_kraus_channel,
    random_lindblad,
    random_unitary,
)

from oracles import naive_kraus_apply

QUBIT = SystemLayout.qubits(("Q",))
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def damping_kraus(p: float) -> KrausChannel:
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(operators=(k0, k1), dim=2)


def test_kraus_completeness_enforced():
    with pytest.raises(CptVerificationError):
        KrausChannel(operators=(np.eye(2) * 0.5,), dim=2)
    ch = damping_kraus(0.3)
    assert verify_cpt(ch).is_tp
    assert verify_cpt(ch).is_cp


def test_unitary_channel_requires_unitary():
    with pytest.raises(NotUnitaryError):
        unitary_channel(np.array([[1.0, 1.0], [0.0, 1.0]]))
    rng = np.random.default_rng(0)
    u = random_unitary(3, rng)
    ch = unitary_channel(u)
    rep = verify_cpt(ch)
    assert rep.is_cp and rep.is_tp


def test_apply_matches_naive_kraus_sum():
    rng = np.random.default_rng(14)
    for _ in range(10):
        ch = random_kraus_channel(3, 4, rng)
        rho = random_density_matrix(SystemLayout((3,), ("Q",)), rng)
        out = apply(ch, rho)
        ref = naive_kraus_apply(ch.operators, rho.matrix)
        assert np.abs(out.matrix - ref).max() < 1e-12
        assert abs(np.trace(out.matrix) - 1.0) < 1e-12


def test_superoperator_reproduces_kraus_action():
    rng = np.random.default_rng(15)
    ch = random_kraus_channel(2, 3, rng)
    s = kraus_to_superoperator(ch)
    rho = random_density_matrix(QUBIT, rng)
    via_kraus = naive_kraus_apply(ch.operators, rho.matrix)
    via_super = (s.matrix @ rho.matrix.reshape(-1)).reshape(2, 2)
    assert np.abs(via_kraus - via_super).max() < 1e-12


def test_choi_roundtrip():
    rng = np.random.default_rng(16)
    for _ in range(5):
        ch = random_kraus_channel(3, 2, rng)
        choi = kraus_to_choi(ch)
        # the two Choi constructions must agree
        choi2 = superoperator_to_choi(kraus_to_superoperator(ch))
        assert np.abs(choi - choi2).max() < 1e-12
        ops = choi_to_kraus(choi, 3)
        rebuilt = KrausChannel(operators=tuple(ops), dim=3)
        rho = random_density_matrix(SystemLayout((3,), ("Q",)), rng)
        a = naive_kraus_apply(ch.operators, rho.matrix)
        b = naive_kraus_apply(rebuilt.operators, rho.matrix)
        assert np.abs(a - b).max() < 1e-10


def test_transpose_map_rejected():
    # transpose is trace preserving but not completely positive
    d = 2
    s = np.zeros((4, 4))
    for i in range(d):
        for j in range(d):
            s[d * j + i, d * i + j] = 1.0
    rep = verify_superoperator_matrix(s, d)
    assert rep.is_tp
    assert not rep.is_cp
    assert rep.choi_min_eigenvalue == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(CptVerificationError):
        choi_to_kraus(superoperator_to_choi(Superoperator(s, d)), d)


def test_verify_kraus_reports_completeness_residual():
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - 0.3)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(0.3 + 1e-6)], [0.0, 0.0]], dtype=complex)
    rep = verify_kraus_operators((k0, k1))
    assert not rep.is_tp
    assert rep.is_cp
    assert rep.completeness_residual > 1e-7


def test_identity_channel_is_noop():
    rng = np.random.default_rng(17)
    rho = random_density_matrix(QUBIT, rng)
    out = apply(identity_channel(2), rho)
    assert np.abs(out.matrix - rho.matrix).max() < 1e-15


def test_lindblad_generator_validation():
    with pytest.raises(Exception):
        LindbladGenerator(hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]), jumps=())
    with pytest.raises(ValueError):
        LindbladGenerator(hamiltonian=np.zeros((2, 2)), jumps=((SIGMA_Z, -1.0),))


def test_lindblad_superoperator_action_on_dephasing():
    # generator must act as -2*gamma on the coherence |0><1|
    gamma = 0.7
    g = LindbladGenerator(hamiltonian=np.zeros((2, 2)), jumps=((SIGMA_Z, gamma),))
    ls = lindblad_superoperator(g)
    coherence = np.zeros((2, 2), dtype=complex)
    coherence[0, 1] = 1.0
    image = (ls.matrix @ coherence.reshape(-1)).reshape(2, 2)
    assert np.abs(image - (-2.0 * gamma) * coherence).max() < 1e-12


def test_evolve_matches_expm_action():
    rng = np.random.default_rng(18)
    g = random_lindblad(2, 2, rng)
    t = 0.37
    ch = evolve(g, t)
    rho = random_density_matrix(QUBIT, rng)
    step = scipy.linalg.expm(lindblad_superoperator(g).matrix * t)
    ref = (step @ rho.matrix.reshape(-1)).reshape(2, 2)
    out = apply(ch, rho)
    assert np.abs(out.matrix - ref).max() < 1e-9


def test_evolve_semigroup_property():
    rng = np.random.default_rng(19)
    g = random_lindblad(2, 1, rng)
    rho = random_density_matrix(QUBIT, rng)
    one_shot = apply(evolve(g, 0.8), rho)
    stepped = apply(evolve(g, 0.4), apply(evolve(g, 0.4), rho))
    assert np.abs(one_shot.matrix - stepped.matrix).max() < 1e-8
    composed = compose(evolve(g, 0.4), evolve(g, 0.4))
    assert np.abs(apply(composed, rho).matrix - one_shot.matrix).max() < 1e-8


def test_evolve_rejects_negative_duration():
    g = LindbladGenerator(hamiltonian=np.zeros((2, 2)), jumps=((SIGMA_Z, 1.0),))
    with pytest.raises(ValueError):
        evolve(g, -0.1)


def test_dephasing_closed_form():
    gamma = 0.9
    g = LindbladGenerator(hamiltonian=np.zeros((2, 2)), jumps=((SIGMA_Z, gamma),))
    plus = DensityMatrix(np.full((2, 2), 0.5, dtype=complex), QUBIT)
    for t in np.linspace(0.0, 2.0, 9):
        out = apply(evolve(g, float(t)), plus)
        assert abs(out.matrix[0, 1] - 0.5 * np.exp(-2.0 * gamma * t)) < 1e-9
        assert abs(out.matrix[0, 0] - 0.5) < 1e-9


def test_damping_closed_form():
    gamma = 1.3
    g = LindbladGenerator(hamiltonian=np.zeros((2, 2)), jumps=((LOWER, gamma),))
    excited = DensityMatrix(np.diag([0.0, 1.0]).astype(complex), QUBIT)
    for t in np.linspace(0.0, 2.0, 9):
        out = apply(evolve(g, float(t)), excited)
        assert abs(out.matrix[1, 1] - np.exp(-gamma * t)) < 1e-9


def test_trace_distance_contracts_under_channels():
    rng = np.random.default_rng(20)
    for _ in range(25):
        dim = int(rng.integers(2, 5))
        layout = SystemLayout((dim,), ("Q",))
        ch = random_kraus_channel(dim, int(rng.integers(1, 4)), rng)
        rho = random_density_matrix(layout, rng)
        sigma = random_density_matrix(layout, rng)
        before = trace_distance(rho.matrix, sigma.matrix)
        after = trace_distance(apply(ch, rho).matrix, apply(ch, sigma).matrix)
        assert after <= before + 1e-9


def test_verify_large_unitary_uses_gram_path():
    # 10 qubits: the explicit Choi matrix would be 2^20-sized, so the
    # verifier must fall back to the Gram spectrum and still pass
    rng = np.random.default_rng(21)
    u = random_unitary(2**10, rng)
    rep = verify_cpt(unitary_channel(u))
    assert rep.is_cp and rep.is_tp
