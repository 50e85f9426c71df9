"""Slow reference implementations the test suite trusts.

Everything here is written with plain Python loops and elementwise
arithmetic so it shares no code path with the package: no einsum, no
vectorization tricks, no factor permutation helpers. Tests compare the
fast implementations against these.
"""

from __future__ import annotations

import itertools

import numpy as np


def naive_partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace by explicit summation over traced multi-indices.

    ``keep`` holds factor positions to retain, in the order they appear
    in ``dims``.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(keep))
    traced = tuple(i for i in range(len(dims)) if i not in keep)
    keep_dims = tuple(dims[i] for i in keep)
    out_dim = int(np.prod(keep_dims)) if keep_dims else 1
    out = np.zeros((out_dim, out_dim), dtype=complex)
    for row_kept in itertools.product(*[range(dims[i]) for i in keep]):
        for col_kept in itertools.product(*[range(dims[i]) for i in keep]):
            acc = 0.0 + 0.0j
            for env in itertools.product(*[range(dims[i]) for i in traced]):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, val in zip(keep, row_kept):
                    row[pos] = val
                for pos, val in zip(keep, col_kept):
                    col[pos] = val
                for pos, val in zip(traced, env):
                    row[pos] = val
                    col[pos] = val
                r = int(np.ravel_multi_index(tuple(row), dims))
                c = int(np.ravel_multi_index(tuple(col), dims))
                acc += rho[r, c]
            r_out = int(np.ravel_multi_index(row_kept, keep_dims)) if keep_dims else 0
            c_out = int(np.ravel_multi_index(col_kept, keep_dims)) if keep_dims else 0
            out[r_out, c_out] = acc
    return out


def naive_kraus_apply(operators, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for k in operators:
        k = np.asarray(k, dtype=complex)
        out += k @ rho @ k.conj().T
    return out


def product_amplitudes(dims, block_positions, block_vectors) -> np.ndarray:
    """Full-space amplitudes of a tensor product of block vectors.

    ``block_positions[b]`` lists the factor positions (in layout order)
    that block ``b`` occupies; ``block_vectors[b]`` is that block's
    vector over its own factors in the same order. Built by looping over
    every full multi-index, so no reshapes or permutations are involved.
    """
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    amp = np.zeros(total, dtype=complex)
    for full_idx in itertools.product(*[range(d) for d in dims]):
        value = 1.0 + 0.0j
        for positions, vec in zip(block_positions, block_vectors):
            sub = tuple(full_idx[p] for p in positions)
            sub_dims = tuple(dims[p] for p in positions)
            value *= vec[int(np.ravel_multi_index(sub, sub_dims))]
        amp[int(np.ravel_multi_index(full_idx, dims))] = value
    return amp


def naive_joint_probability(
    dims, block_positions, block_vectors, parent_vector, kraus_operators=None
) -> float:
    """Tr[(|V><V|) E[|Psi_w><Psi_w|]] with V the product of block vectors."""
    amp = product_amplitudes(dims, block_positions, block_vectors)
    parent = np.asarray(parent_vector, dtype=complex)
    rho_w = np.outer(parent, parent.conj())
    if kraus_operators is not None:
        rho_w = naive_kraus_apply(kraus_operators, rho_w)
    value = amp.conj() @ rho_w @ amp
    return float(value.real)


def dephasing_offdiagonal(initial_offdiag: complex, gamma: float, t: float) -> complex:
    return initial_offdiag * np.exp(-2.0 * gamma * t)


def damping_excited_population(initial_pop: float, gamma: float, t: float) -> float:
    return initial_pop * np.exp(-gamma * t)


def record_pair_eigenvalues(p: float, n_env: int, coupling: float):
    """Spectrum of the system+pointer state after environment coupling.

    The off-diagonal of the two-outcome record state is suppressed by a
    factor s = coupling**n_env, giving eigenvalues (1 +- g)/2 with
    g = sqrt((p - q)^2 + 4 p q s^2).
    """
    q = 1.0 - p
    s = float(coupling) ** int(n_env)
    gap = np.sqrt((p - q) ** 2 + 4.0 * p * q * s * s)
    return (1.0 + gap) / 2.0, (1.0 - gap) / 2.0
