"""Conditional probabilities between spectral decompositions at two times.

The central quantity: given a parent system W occupying ontic state w at time
t (an eigenvector of rho_W(t)), the probability of finding disjoint subsystems
Q_1..Q_n in ontic states i_1..i_n at time t' >= t is

    p(i_1..i_n ; t' | w ; t)
        = Tr[ (P_1(i_1) kron ... kron P_n(i_n))  E[P_W(w)] ]

where each P_a(i_a) projects onto an eigenvector of the reduced matrix of
Q_a at t', P_W(w) projects onto the parent eigenvector at t, and E is the CPT
channel carrying W from t to t'. Two special cases matter enough to get their
own entry points: the single-time case (identity channel) and the
single-subsystem two-time case (trivial partition).

Degenerate spectra make eigenvectors non-unique, so queries touching a
flagged degenerate cluster are refused in strict mode and answered against
the canonical basis (with the flags carried on the result) in permissive
mode.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import channels as channels_mod
from .channels import Channel
from .errors import (
    DegenerateBasisError,
    LayoutMismatchError,
    NormalizationError,
    ProbabilityBoundsError,
)
from .linalg import SystemLayout, permute_vector_factors
from .states import DEFAULT_THRESHOLD, DensityMatrix, EpistemicState, extract_epistemic

ROW_SUM_TOL = 1e-8
CLAMP_TOL = 1e-10
IMAG_TOL = 1e-10

STRICT = "strict"
PERMISSIVE = "permissive"


@dataclass(frozen=True)
class Partition:
    """Ordered split of a layout's factors into disjoint covering blocks.

    Block order fixes the index order of conditional queries. Within each
    block, labels are canonicalized to parent layout order; blocks themselves
    may interleave arbitrarily (the machinery permutes tensor factors
    explicitly, so non-contiguous blocks are fine).
    """

    layout: SystemLayout
    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise LayoutMismatchError("partition needs at least one block")
        canon = []
        seen: set[str] = set()
        for block in self.blocks:
            if not block:
                raise LayoutMismatchError("empty partition block")
            pos = self.layout.positions(block)
            labels = tuple(self.layout.labels[p] for p in pos)
            if seen & set(labels):
                raise LayoutMismatchError(
                    f"blocks overlap on {sorted(seen & set(labels))}"
                )
            seen |= set(labels)
            canon.append(labels)
        if seen != set(self.layout.labels):
            missing = set(self.layout.labels) - seen
            raise LayoutMismatchError(
                f"blocks do not cover the layout; missing {sorted(missing)}"
            )
        object.__setattr__(self, "blocks", tuple(canon))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def concat_positions(self) -> tuple[int, ...]:
        """Parent factor positions in blocks-concatenated order."""
        return tuple(
            self.layout.position(label) for block in self.blocks for label in block
        )


def trivial_partition(layout: SystemLayout) -> Partition:
    return Partition(layout, (tuple(layout.labels),))


def _clamp_probability(value: complex, context: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise ProbabilityBoundsError(
            f"{context}: imaginary residue {value.imag:.3e} exceeds {IMAG_TOL:.1e}"
        )
    p = float(value.real)
    if p < -CLAMP_TOL or p > 1.0 + CLAMP_TOL:
        raise ProbabilityBoundsError(f"{context}: value {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _check_mode(mode: str) -> str:
    if mode not in (STRICT, PERMISSIVE):
        raise ValueError(f"mode must be 'strict' or 'permissive': {mode!r}")
    return mode


def _entry_index(e: EpistemicState, index: int, what: str) -> int:
    index = int(index)
    if not 0 <= index < len(e):
        raise IndexError(
            f"{what} index {index} out of range for {len(e)} retained entries"
        )
    return index


def _refuse_degenerate_entry(e: EpistemicState, index: int, what: str) -> None:
    if e.is_degenerate(index):
        raise DegenerateBasisError(
            f"{what} index {index} lies in a degenerate eigenvalue cluster; "
            "rerun in permissive mode to answer against the canonical basis"
        )


def _refuse_any_degeneracy(e: EpistemicState, what: str) -> None:
    if e.degenerate_clusters:
        raise DegenerateBasisError(
            f"{what} has degenerate eigenvalue clusters {e.degenerate_clusters}; "
            "rerun in permissive mode to answer against the canonical basis"
        )


@dataclass(frozen=True)
class _QueryContext:
    """Shared spectral data for conditional queries on one (state, channel)."""

    parent: EpistemicState
    blocks: tuple[EpistemicState, ...]
    partition: Partition
    channel: Optional[Channel]
    concat_dims: tuple[int, ...]
    perm: tuple[int, ...]

    def evolved_projector(self, w: int) -> np.ndarray:
        proj = self.parent.entries[w][1].projector()
        if self.channel is None:
            return proj
        return self.channel.apply_matrix(proj)

    def product_vector(self, indices: Sequence[int]) -> np.ndarray:
        vecs = [
            self.blocks[a].entries[i][1].vector for a, i in enumerate(indices)
        ]
        out = vecs[0]
        for v in vecs[1:]:
            out = np.kron(out, v)
        return permute_vector_factors(out, self.concat_dims, self.perm)

    def probability(self, w: int, indices: Sequence[int]) -> float:
        evolved = self.evolved_projector(w)
        vec = self.product_vector(indices)
        value = vec.conj() @ evolved @ vec
        label = f"p({','.join(str(i) for i in indices)}|{w})"
        return _clamp_probability(complex(value), label)


def _build_context(
    rho_w_t: DensityMatrix,
    channel: Optional[Channel],
    part: Partition,
    threshold: float,
) -> _QueryContext:
    if part.layout != rho_w_t.layout:
        raise LayoutMismatchError(
            "partition layout does not match the density matrix layout"
        )
    if channel is not None and channel.dim != rho_w_t.dim:
        raise LayoutMismatchError(
            f"channel dim {channel.dim} does not match state dim {rho_w_t.dim}"
        )
    parent = extract_epistemic(rho_w_t, threshold)
    rho_tprime = (
        rho_w_t if channel is None else channels_mod.apply(channel, rho_w_t)
    )
    blocks = tuple(
        extract_epistemic(rho_tprime.reduce(block), threshold)
        for block in part.blocks
    )
    sigma = part.concat_positions()
    concat_dims = tuple(part.layout.dims[p] for p in sigma)
    perm = tuple(int(k) for k in np.argsort(sigma))
    return _QueryContext(
        parent=parent,
        blocks=blocks,
        partition=part,
        channel=channel,
        concat_dims=concat_dims,
        perm=perm,
    )


def _validate_query(
    ctx: _QueryContext, w: int, indices: Sequence[int], mode: str
) -> tuple[int, tuple[int, ...]]:
    if len(indices) != ctx.partition.n_blocks:
        raise IndexError(
            f"expected {ctx.partition.n_blocks} subsystem indices, got {len(indices)}"
        )
    w = _entry_index(ctx.parent, w, "parent")
    idx = tuple(
        _entry_index(ctx.blocks[a], i, f"block {a}") for a, i in enumerate(indices)
    )
    if mode == STRICT:
        _refuse_degenerate_entry(ctx.parent, w, "parent")
        for a, i in enumerate(idx):
            _refuse_degenerate_entry(ctx.blocks[a], i, f"block {a}")
    return w, idx


def joint_conditional(
    rho_w_t: DensityMatrix,
    channel: Channel,
    part: Partition,
    w: int,
    indices: Sequence[int],
    mode: str = STRICT,
    threshold: float = DEFAULT_THRESHOLD,
) -> float:
    """General two-time conditional probability for a partitioned parent.

    ``w`` indexes the retained spectral entries of ``rho_w_t``; ``indices``
    index the retained entries of each block's reduced matrix after the
    channel. Conditioning on dropped (sub-threshold) entries is impossible by
    construction, which is exactly the zero-probability-conditioning
    precondition.
    """
    mode = _check_mode(mode)
    ctx = _build_context(rho_w_t, channel, part, threshold)
    w, idx = _validate_query(ctx, w, indices, mode)
    return ctx.probability(w, idx)


def kinematic_conditional(
    rho_w: DensityMatrix,
    part: Partition,
    w: int,
    indices: Sequence[int],
    mode: str = STRICT,
    threshold: float = DEFAULT_THRESHOLD,
) -> float:
    """Single-time conditional: subsystem states given the parent state now.

    Implemented directly as the squared overlap between the parent
    eigenvector and the product of subsystem eigenvectors; agrees with
    ``joint_conditional`` under the identity channel to round-off.
    """
    mode = _check_mode(mode)
    ctx = _build_context(rho_w, None, part, threshold)
    w, idx = _validate_query(ctx, w, indices, mode)
    vec = ctx.product_vector(idx)
    amp = vec.conj() @ ctx.parent.entries[w][1].vector
    return _clamp_probability(complex(abs(amp) ** 2), "kinematic")


def dynamical_conditional(
    rho_q_t: DensityMatrix,
    channel: Channel,
    i: int,
    j: int,
    mode: str = STRICT,
    threshold: float = DEFAULT_THRESHOLD,
) -> float:
    """Two-time conditional for one undivided system: p(j at t' | i at t).

    Equals the general form with the trivial one-block partition.
    """
    mode = _check_mode(mode)
    e_t = extract_epistemic(rho_q_t, threshold)
    rho_tprime = channels_mod.apply(channel, rho_q_t)
    e_tp = extract_epistemic(rho_tprime, threshold)
    i = _entry_index(e_t, i, "initial")
    j = _entry_index(e_tp, j, "final")
    if mode == STRICT:
        _refuse_degenerate_entry(e_t, i, "initial")
        _refuse_degenerate_entry(e_tp, j, "final")
    evolved = channel.apply_matrix(e_t.entries[i][1].projector())
    v = e_tp.entries[j][1].vector
    return _clamp_probability(complex(v.conj() @ evolved @ v), f"p({j}|{i})")


@dataclass(frozen=True)
class ConditionalTable:
    """Full conditional-probability table with its audit numbers.

    ``probabilities[w, i_1, ..., i_n]`` is the conditional probability of the
    block entries given parent entry ``w``. Rows must sum to one within 1e-8
    (violations raise at construction); marginal deviations are recorded but
    left to the caller's judgement.
    """

    parent: EpistemicState
    blocks: tuple[EpistemicState, ...]
    partition: Partition
    probabilities: np.ndarray
    mode: str
    times: tuple[float, float] = (0.0, 0.0)
    channel_id: str = "identity"
    row_sums: np.ndarray = None  # type: ignore[assignment]
    max_row_deviation: float = 0.0
    max_marginal_deviation: float = 0.0

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        expected = (len(self.parent),) + tuple(len(b) for b in self.blocks)
        if probs.shape != expected:
            raise LayoutMismatchError(
                f"table shape {probs.shape} does not match entries {expected}"
            )
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise ProbabilityBoundsError("table values must lie in [0, 1]")
        sums = probs.reshape(probs.shape[0], -1).sum(axis=1)
        dev = float(np.abs(sums - 1.0).max())
        if dev > ROW_SUM_TOL:
            raise NormalizationError(
                f"conditional rows sum to 1 within {dev:.3e} > {ROW_SUM_TOL:.1e}"
            )
        marg_dev = 0.0
        weights = self.parent.probabilities
        for a, block in enumerate(self.blocks):
            axes = tuple(
                k + 1 for k in range(len(self.blocks)) if k != a
            )
            cond_marg = probs.sum(axis=axes) if axes else probs
            mixed = weights @ cond_marg
            marg_dev = max(
                marg_dev, float(np.abs(mixed - block.probabilities).max())
            )
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "row_sums", sums)
        object.__setattr__(self, "max_row_deviation", dev)
        object.__setattr__(self, "max_marginal_deviation", marg_dev)

    @property
    def degenerate(self) -> bool:
        return bool(
            self.parent.degenerate_clusters
            or any(b.degenerate_clusters for b in self.blocks)
        )


def conditional_table(
    rho_w_t: DensityMatrix,
    channel: Optional[Channel],
    part: Partition,
    mode: str = STRICT,
    threshold: float = DEFAULT_THRESHOLD,
    times: tuple[float, float] = (0.0, 0.0),
    channel_id: str = "identity",
) -> ConditionalTable:
    """Evaluate the conditional probability over every retained combination.

    ``channel=None`` means the identity (single-time table). In strict mode
    any degenerate cluster in the parent or a block refuses the whole table,
    since a table necessarily touches every entry.
    """
    mode = _check_mode(mode)
    ctx = _build_context(rho_w_t, channel, part, threshold)
    if mode == STRICT:
        _refuse_any_degeneracy(ctx.parent, "parent spectrum")
        for a, block in enumerate(ctx.blocks):
            _refuse_any_degeneracy(block, f"block {a} spectrum")
    shape = (len(ctx.parent),) + tuple(len(b) for b in ctx.blocks)
    probs = np.zeros(shape)
    ranges = [range(len(b)) for b in ctx.blocks]
    for w in range(len(ctx.parent)):
        evolved = ctx.evolved_projector(w)
        for combo in itertools.product(*ranges):
            vec = ctx.product_vector(combo)
            value = vec.conj() @ evolved @ vec
            probs[(w, *combo)] = _clamp_probability(
                complex(value), f"p({combo}|{w})"
            )
    return ConditionalTable(
        parent=ctx.parent,
        blocks=ctx.blocks,
        partition=part,
        probabilities=probs,
        mode=mode,
        times=(float(times[0]), float(times[1])),
        channel_id=str(channel_id),
    )
