"""Stochastic trajectories through the spectral entries of an evolving state.

The two-time conditional probabilities p(j at t+dt | i at t) define, step by
step, a classical Markov chain over the retained spectral entries of
rho(t). Chaining them into full multi-time trajectories is a modeling
completion made by this package: the underlying theory fixes only the
two-time conditionals, not any particular joint distribution over whole
histories. The chain is the minimal completion consistent with those
conditionals, and everything downstream of it (sampled paths, ensemble
frequency reports) should be read with that caveat.

Branch identity across time is kept by eigenvector overlap: entries at t+dt
are greedily matched to entries at t by largest |<psi_i(t)|psi_j(t+dt)>|, so
a trajectory label follows one physical branch through eigenvalue crossings
instead of jumping with the descending-eigenvalue sort order. Labels are
created as branches appear (rank growth) and retired as they vanish.

Randomness: each trajectory uses its own PCG64 generator seeded explicitly;
a trajectory draws ``n_steps + 1`` uniforms up front, the first selecting the
initial entry and the k-th thereafter selecting the jump at step k. Ensembles
use consecutive seeds ``base_seed .. base_seed + n - 1``, which makes every
sample reproducible in isolation and the aggregate independent of execution
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import channels as channels_mod
from .channels import KrausChannel, LindbladGenerator
from .errors import DegenerateBasisError, NormalizationError
from .states import DEFAULT_THRESHOLD, DensityMatrix, extract_epistemic

ROW_SUM_TOL = 1e-6
CLAMP_TOL = 1e-10

STRICT = "strict"
PERMISSIVE = "permissive"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid ``t0 + k*dt`` for ``k = 0..n_steps``."""

    t0: float
    dt: float
    n_steps: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if self.dt <= 0:
            raise ValueError(f"dt must be positive: {self.dt}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be nonnegative: {self.n_steps}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class Trajectory:
    """One sampled history: ``(time, branch label, eigenvalue at that time)``."""

    points: tuple[tuple[float, int, float], ...]
    seed: int


@dataclass(frozen=True)
class EnsembleReport:
    """Empirical branch occupation against the exact eigenvalue reference.

    Arrays are indexed ``[time, branch label]``; a label absent at some time
    carries reference eigenvalue 0 and can collect no counts. Frequencies at
    each time sum to one exactly (counts over samples).
    """

    times: np.ndarray
    frequencies: np.ndarray
    eigenvalues: np.ndarray
    max_abs_deviation: float
    sample_count: int
    base_seed: int


@dataclass
class StepChain:
    """Prepared per-step conditional machinery along one time grid.

    Construction does all the heavy lifting (exponentials, spectra, rows) so
    that sampling is just inverse-CDF draws. ``entry_labels[k][e]`` is the
    persistent branch label of retained entry ``e`` at grid point ``k``;
    ``raw_rows[k]`` are the unnormalized two-time conditional rows between
    grid points ``k`` and ``k+1``.
    """

    grid: TimeGrid
    entry_probs: list[np.ndarray]
    entry_vectors: list[np.ndarray]
    entry_labels: list[np.ndarray]
    raw_rows: list[np.ndarray]
    n_labels: int
    cum_rows: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.cum_rows:
            self.cum_rows = []
            for rows in self.raw_rows:
                sums = rows.sum(axis=1, keepdims=True)
                self.cum_rows.append(np.cumsum(rows / sums, axis=1))

    @property
    def n_times(self) -> int:
        return len(self.entry_probs)

    def eigenvalue_table(self) -> np.ndarray:
        """Reference eigenvalues arranged ``[time, branch label]``."""
        table = np.zeros((self.n_times, self.n_labels))
        for k in range(self.n_times):
            table[k, self.entry_labels[k]] = self.entry_probs[k]
        return table

    def propagated_marginals(self) -> np.ndarray:
        """Chain marginals pushed forward with the exact conditional rows.

        By the law of total probability these must reproduce the eigenvalue
        table up to truncation effects; the match is a core consistency check
        on the whole construction.
        """
        table = np.zeros((self.n_times, self.n_labels))
        mu = self.entry_probs[0].copy()
        table[0, self.entry_labels[0]] = mu
        for k, rows in enumerate(self.raw_rows):
            mu = mu @ rows
            table[k + 1, self.entry_labels[k + 1]] = mu
        return table

    def _walk(self, uniforms: np.ndarray) -> np.ndarray:
        """Entry indices along the grid for one vector of uniforms."""
        p0 = self.entry_probs[0]
        cum0 = np.cumsum(p0 / p0.sum())
        entries = np.empty(self.n_times, dtype=int)
        entries[0] = min(
            int(np.searchsorted(cum0, uniforms[0], side="right")), len(p0) - 1
        )
        for k in range(self.n_times - 1):
            cum = self.cum_rows[k][entries[k]]
            entries[k + 1] = min(
                int(np.searchsorted(cum, uniforms[k + 1], side="right")),
                len(cum) - 1,
            )
        return entries

    def sample(self, seed: int) -> Trajectory:
        rng = np.random.Generator(np.random.PCG64(int(seed)))
        uniforms = rng.random(self.n_times)
        entries = self._walk(uniforms)
        times = self.grid.times
        points = tuple(
            (
                float(times[k]),
                int(self.entry_labels[k][entries[k]]),
                float(self.entry_probs[k][entries[k]]),
            )
            for k in range(self.n_times)
        )
        return Trajectory(points=points, seed=int(seed))


def _greedy_overlap_labels(
    prev_vectors: np.ndarray,
    prev_labels: np.ndarray,
    vectors: np.ndarray,
    next_label: int,
) -> tuple[np.ndarray, int]:
    """Assign persistent labels to new entries by maximal overlap.

    Greedy on the overlap magnitude matrix; ties resolve to the lowest
    (previous, new) index pair. Unmatched new entries get fresh labels in
    entry order.
    """
    m_prev = prev_vectors.shape[1]
    m_new = vectors.shape[1]
    overlap = np.abs(prev_vectors.conj().T @ vectors)
    labels = -np.ones(m_new, dtype=int)
    used_prev = np.zeros(m_prev, dtype=bool)
    for _ in range(min(m_prev, m_new)):
        masked = overlap.copy()
        masked[used_prev, :] = -1.0
        masked[:, labels >= 0] = -1.0
        a, b = np.unravel_index(int(np.argmax(masked)), masked.shape)
        labels[b] = prev_labels[a]
        used_prev[a] = True
    for b in range(m_new):
        if labels[b] < 0:
            labels[b] = next_label
            next_label += 1
    return labels, next_label


def build_step_chain(
    generator: LindbladGenerator,
    rho0: DensityMatrix,
    grid: TimeGrid,
    threshold: float = DEFAULT_THRESHOLD,
    mode: str = STRICT,
    step_channel: Optional[KrausChannel] = None,
) -> StepChain:
    """Precompute spectra and conditional rows along the grid.

    ``step_channel`` overrides the generator exponential for one grid step
    (useful for discrete-map dynamics); otherwise it is ``exp(L*dt)``.
    In strict mode any degenerate spectrum along the grid refuses the chain.
    """
    if mode not in (STRICT, PERMISSIVE):
        raise ValueError(f"mode must be 'strict' or 'permissive': {mode!r}")
    if step_channel is None:
        step_channel = channels_mod.evolve(generator, grid.dt)
    rho = rho0
    states = []
    for k in range(grid.n_steps + 1):
        e = extract_epistemic(rho, threshold)
        if mode == STRICT and e.degenerate_clusters:
            raise DegenerateBasisError(
                f"degenerate spectrum at grid point {k} "
                f"(t={grid.t0 + k * grid.dt:g}); clusters {e.degenerate_clusters}"
            )
        states.append(e)
        if k < grid.n_steps:
            rho = channels_mod.apply(step_channel, rho)

    entry_probs = [e.probabilities for e in states]
    entry_vectors = [e.basis_matrix() for e in states]
    entry_labels = [np.arange(len(states[0]))]
    next_label = len(states[0])
    for k in range(1, len(states)):
        labels, next_label = _greedy_overlap_labels(
            entry_vectors[k - 1], entry_labels[k - 1], entry_vectors[k], next_label
        )
        entry_labels.append(labels)

    raw_rows = []
    for k in range(grid.n_steps):
        vecs_t = entry_vectors[k]
        vecs_tp = entry_vectors[k + 1]
        m_t = vecs_t.shape[1]
        m_tp = vecs_tp.shape[1]
        rows = np.zeros((m_t, m_tp))
        for a in range(m_t):
            proj = np.outer(vecs_t[:, a], vecs_t[:, a].conj())
            evolved = step_channel.apply_matrix(proj)
            vals = np.real(np.einsum("ib,ij,jb->b", vecs_tp.conj(), evolved, vecs_tp))
            if vals.min() < -CLAMP_TOL:
                raise NormalizationError(
                    f"conditional row {a} at step {k} has entry {vals.min():.3e}"
                )
            rows[a] = np.clip(vals, 0.0, None)
            total = rows[a].sum()
            if not (1.0 - ROW_SUM_TOL <= total <= 1.0 + ROW_SUM_TOL):
                raise NormalizationError(
                    f"conditional row {a} at step {k} sums to {total!r}"
                )
        raw_rows.append(rows)

    return StepChain(
        grid=grid,
        entry_probs=entry_probs,
        entry_vectors=entry_vectors,
        entry_labels=entry_labels,
        raw_rows=raw_rows,
        n_labels=next_label,
    )


def sample_trajectory(
    generator: LindbladGenerator,
    rho0: DensityMatrix,
    grid: TimeGrid,
    seed: int,
    threshold: float = DEFAULT_THRESHOLD,
    mode: str = STRICT,
) -> Trajectory:
    """Sample one trajectory; identical seeds give identical trajectories."""
    chain = build_step_chain(generator, rho0, grid, threshold, mode)
    return chain.sample(seed)


def run_ensemble(
    generator: LindbladGenerator,
    rho0: DensityMatrix,
    grid: TimeGrid,
    n_samples: int,
    base_seed: int,
    threshold: float = DEFAULT_THRESHOLD,
    mode: str = STRICT,
    chain: Optional[StepChain] = None,
) -> EnsembleReport:
    """Aggregate ``n_samples`` trajectories with seeds ``base_seed + k``.

    The walk is vectorized across trajectories per grid step, drawing each
    trajectory's uniforms from its own seeded generator, so results are
    bit-identical to sampling the trajectories one by one.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1: {n_samples}")
    if chain is None:
        chain = build_step_chain(generator, rho0, grid, threshold, mode)
    n_times = chain.n_times
    uniforms = np.empty((n_samples, n_times))
    for i in range(n_samples):
        rng = np.random.Generator(np.random.PCG64(int(base_seed) + i))
        uniforms[i] = rng.random(n_times)

    entries = np.empty((n_samples, n_times), dtype=int)
    p0 = chain.entry_probs[0]
    cum0 = np.cumsum(p0 / p0.sum())
    entries[:, 0] = np.minimum(
        np.searchsorted(cum0, uniforms[:, 0], side="right"), len(p0) - 1
    )
    for k in range(n_times - 1):
        cum = chain.cum_rows[k]
        rows = cum[entries[:, k]]
        nxt = (rows <= uniforms[:, k + 1, None]).sum(axis=1)
        entries[:, k + 1] = np.minimum(nxt, cum.shape[1] - 1)

    counts = np.zeros((n_times, chain.n_labels))
    for k in range(n_times):
        labels_k = chain.entry_labels[k][entries[:, k]]
        counts[k] = np.bincount(labels_k, minlength=chain.n_labels)
    frequencies = counts / n_samples
    eigenvalues = chain.eigenvalue_table()
    max_dev = float(np.abs(frequencies - eigenvalues).max())
    return EnsembleReport(
        times=chain.grid.times,
        frequencies=frequencies,
        eigenvalues=eigenvalues,
        max_abs_deviation=max_dev,
        sample_count=n_samples,
        base_seed=int(base_seed),
    )
