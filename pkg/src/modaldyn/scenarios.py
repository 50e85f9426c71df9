"""Canned physical setups with closed-form reference data attached.

Each constructor returns a :class:`Scenario` bundling an initial state, its
dynamics (a Lindblad generator, a discrete unitary schedule, or nothing), the
subsystems worth looking at, and an ``oracle`` dict of independently derived
reference values for tests and demos.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .channels import KrausChannel, LindbladGenerator, unitary_channel, apply, evolve
from .errors import InvalidAmplitudesError
from .linalg import SystemLayout, kron_all
from .states import DensityMatrix

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|

KET_ZERO = np.array([1.0, 0.0], dtype=complex)
KET_ONE = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class Scenario:
    """A named system, its initial state, and how it moves."""

    name: str
    layout: SystemLayout
    initial_state: DensityMatrix
    generator: Optional[LindbladGenerator] = None
    schedule: tuple[KrausChannel, ...] = ()
    observables: tuple[tuple[tuple[str, ...], str], ...] = ()
    oracle: dict = field(default_factory=dict)

    def final_state(self) -> DensityMatrix:
        """State after the full discrete schedule (identity if none)."""
        rho = self.initial_state
        for ch in self.schedule:
            rho = apply(ch, rho)
        return rho

    def state_at(self, t: float) -> DensityMatrix:
        """State at time ``t`` for generator dynamics.

        Discrete-schedule scenarios return the post-schedule state and
        static scenarios the initial state; ``t`` only drives a generator.
        """
        if self.generator is not None:
            if t == 0:
                return self.initial_state
            return apply(evolve(self.generator, float(t)), self.initial_state)
        if self.schedule:
            return self.final_state()
        return self.initial_state


def _controlled_gate(
    dims: tuple[int, ...], control: int, target: int, gate: np.ndarray
) -> np.ndarray:
    """Embed a two-level controlled gate into the full factor space."""
    p0 = np.outer(KET_ZERO, KET_ZERO.conj())
    p1 = np.outer(KET_ONE, KET_ONE.conj())
    idle = [np.eye(d, dtype=complex) for d in dims]
    branch0 = list(idle)
    branch0[control] = p0
    branch1 = list(idle)
    branch1[control] = p1
    branch1[target] = gate
    return kron_all(branch0) + kron_all(branch1)


def von_neumann_measurement(
    alpha: complex,
    beta: complex,
    n_env: int = 8,
    coupling: float = 0.4,
) -> Scenario:
    """Unitary measurement of a qubit by a pointer, watched by an environment.

    The system starts in ``alpha|0> + beta|1>``, the pointer in its ready
    state ``|0>``, and ``n_env`` environment qubits in ``|0>``. The schedule
    first copies the system onto the pointer (controlled flip), then lets
    each environment qubit read the pointer through a controlled rotation
    whose conditional environment states overlap by ``coupling``. After the
    full schedule, the off-diagonal of the system+pointer record is
    suppressed by exactly ``coupling ** n_env``, which gives this scenario a
    closed-form oracle:

    * pointer reduced state: exactly ``diag(|alpha|^2, |beta|^2)``;
    * record (system+pointer) eigenvalues:
      ``(1 +- sqrt((p - q)^2 + 4 p q s^2)) / 2`` with ``p = |alpha|^2``,
      ``q = |beta|^2``, ``s = coupling ** n_env``, converging monotonically
      to the Born weights as ``n_env`` grows.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    norm_dev = abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0)
    if norm_dev > 1e-12:
        raise InvalidAmplitudesError(
            f"|alpha|^2 + |beta|^2 deviates from 1 by {norm_dev:.3e}"
        )
    n_env = int(n_env)
    if n_env < 0:
        raise ValueError(f"n_env must be nonnegative: {n_env}")
    coupling = float(coupling)
    if not 0.0 <= coupling <= 1.0:
        raise ValueError(f"coupling must lie in [0, 1]: {coupling}")

    labels = ("S", "P") + tuple(f"E{k}" for k in range(1, n_env + 1))
    layout = SystemLayout.qubits(labels)
    system = alpha * KET_ZERO + beta * KET_ONE
    vec = kron_all([system] + [KET_ZERO] * (1 + n_env))
    initial = DensityMatrix.from_vector(vec, layout)

    # Environment qubit k ends in |0> or RY(theta)|0>; overlap cos(theta/2).
    theta = 2.0 * math.acos(coupling)
    ry = np.array(
        [
            [math.cos(theta / 2.0), -math.sin(theta / 2.0)],
            [math.sin(theta / 2.0), math.cos(theta / 2.0)],
        ],
        dtype=complex,
    )
    gates = [_controlled_gate(layout.dims, 0, 1, PAULI_X)]
    gates += [
        _controlled_gate(layout.dims, 1, 2 + k, ry) for k in range(n_env)
    ]
    schedule = tuple(unitary_channel(u) for u in gates)

    p = abs(alpha) ** 2
    q = abs(beta) ** 2
    s = coupling**n_env
    gap = math.sqrt((p - q) ** 2 + 4.0 * p * q * s * s)
    record_eigs = ((1.0 + gap) / 2.0, (1.0 - gap) / 2.0)
    oracle = {
        "born_weights": (p, q),
        "pointer_probabilities": tuple(sorted((p, q), reverse=True)),
        "record_offdiagonal_suppression": s,
        "record_eigenvalues": record_eigs,
    }
    return Scenario(
        name="von-neumann",
        layout=layout,
        initial_state=initial,
        schedule=schedule,
        observables=((("P",), "pointer"), (("S", "P"), "measurement record")),
        oracle=oracle,
    )


def epr_bohm() -> Scenario:
    """Two-qubit singlet; both margins maximally mixed, perfectly
    anticorrelated in every aligned basis."""
    layout = SystemLayout.qubits(("A", "B"))
    vec = (np.kron(KET_ZERO, KET_ONE) - np.kron(KET_ONE, KET_ZERO)) / math.sqrt(2.0)
    oracle = {
        "subsystem_probabilities": (0.5, 0.5),
        "aligned_same_outcome_probability": 0.0,
        "aligned_opposite_outcome_probability": 0.5,
    }
    return Scenario(
        name="epr-bohm",
        layout=layout,
        initial_state=DensityMatrix.from_vector(vec, layout),
        observables=((("A",), "left qubit"), (("B",), "right qubit")),
        oracle=oracle,
    )


def ghz_mermin() -> Scenario:
    """Three-qubit GHZ state ``(|000> + |111>)/sqrt(2)``."""
    layout = SystemLayout.qubits(("A", "B", "C"))
    vec = (kron_all([KET_ZERO] * 3) + kron_all([KET_ONE] * 3)) / math.sqrt(2.0)
    oracle = {
        "subsystem_probabilities": (0.5, 0.5),
        "all_zero_outcome_probability": 0.5,
        "mixed_outcome_probability": 0.0,
    }
    return Scenario(
        name="ghz-mermin",
        layout=layout,
        initial_state=DensityMatrix.from_vector(vec, layout),
        observables=(
            (("A",), "first qubit"),
            (("A", "B"), "first pair"),
        ),
        oracle=oracle,
    )


def dephasing_qubit(
    gamma: float, rho0: Optional[DensityMatrix] = None
) -> Scenario:
    """Pure dephasing: jump operator ``sigma_z`` at rate ``gamma``.

    Coherences decay as ``rho_01(t) = rho_01(0) * exp(-2 gamma t)`` while
    populations stand still; from ``|+><+|`` the eigenvalues at time t are
    ``(1 +- exp(-2 gamma t)) / 2``.
    """
    gamma = float(gamma)
    layout = SystemLayout.qubits(("Q",))
    if rho0 is None:
        rho0 = DensityMatrix.from_vector(KET_PLUS, layout)
    generator = LindbladGenerator(
        hamiltonian=np.zeros((2, 2), dtype=complex),
        jumps=((PAULI_Z, gamma),),
    )
    c0 = complex(rho0.matrix[0, 1])
    oracle = {
        "offdiagonal": _exp_decay(c0, 2.0 * gamma),
        "decay_rate": 2.0 * gamma,
    }
    return Scenario(
        name="dephasing",
        layout=layout,
        initial_state=rho0,
        generator=generator,
        observables=((("Q",), "qubit"),),
        oracle=oracle,
    )


def amplitude_damping_qubit(
    gamma: float, rho0: Optional[DensityMatrix] = None
) -> Scenario:
    """Spontaneous decay: jump operator ``|0><1|`` at rate ``gamma``.

    The excited population decays as ``rho_11(t) = rho_11(0) * exp(-gamma t)``.
    Default initial state is the excited state ``|1><1|``.
    """
    gamma = float(gamma)
    layout = SystemLayout.qubits(("Q",))
    if rho0 is None:
        rho0 = DensityMatrix.from_vector(KET_ONE, layout)
    generator = LindbladGenerator(
        hamiltonian=np.zeros((2, 2), dtype=complex),
        jumps=((LOWERING, gamma),),
    )
    p0 = float(np.real(rho0.matrix[1, 1]))
    oracle = {
        "excited_population": _exp_decay(p0, gamma),
        "decay_rate": gamma,
    }
    return Scenario(
        name="damping",
        layout=layout,
        initial_state=rho0,
        generator=generator,
        observables=((("Q",), "qubit"),),
        oracle=oracle,
    )


def _exp_decay(x0: complex, rate: float) -> Callable[[float], complex]:
    def value(t: float) -> complex:
        return x0 * math.exp(-rate * float(t))

    return value
