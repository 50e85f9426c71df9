"""Dense complex linear algebra for multipartite finite-dimensional systems.

Matrices are plain ``numpy.ndarray`` objects with complex dtype, row-major
entries. Tensor-product structure is carried separately by
:class:`SystemLayout` so that operators never need wrapping. Target scale is
desk-sized: total dimension up to a few thousand; no sparse or GPU paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    LayoutMismatchError,
    NotHermitianError,
    UnknownLabelError,
)

HERMITICITY_TOL = 1e-10
DEGENERACY_GAP = 1e-9


@dataclass(frozen=True)
class SystemLayout:
    """Ordered tensor factorization of a composite Hilbert space.

    ``dims[k]`` is the dimension of factor ``k`` and ``labels[k]`` its unique
    name. Basis indices are row-major over the factors in this order.
    """

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if len(self.dims) != len(self.labels):
            raise LayoutMismatchError(
                f"{len(self.dims)} dims but {len(self.labels)} labels"
            )
        if not self.dims:
            raise LayoutMismatchError("layout needs at least one factor")
        if any(d < 1 for d in self.dims):
            raise LayoutMismatchError(f"factor dimensions must be >= 1: {self.dims}")
        if len(set(self.labels)) != len(self.labels):
            raise LayoutMismatchError(f"duplicate factor labels: {self.labels}")

    @classmethod
    def qubits(cls, labels: Sequence[str]) -> "SystemLayout":
        return cls((2,) * len(labels), tuple(labels))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(
                f"label {label!r} not in layout {self.labels}"
            ) from None

    def positions(self, labels: Iterable[str]) -> tuple[int, ...]:
        """Positions of ``labels``, sorted into layout order."""
        return tuple(sorted(self.position(s) for s in labels))

    def sublayout(self, labels: Iterable[str]) -> "SystemLayout":
        """Layout of the named factors, kept in this layout's order."""
        pos = self.positions(labels)
        if not pos:
            raise UnknownLabelError("sublayout needs at least one label")
        return SystemLayout(
            tuple(self.dims[p] for p in pos), tuple(self.labels[p] for p in pos)
        )


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor owning the slow index."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of operators, left to right."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase to a canonical representative.

    The component of largest magnitude (lowest index on ties) is made real
    and positive. Vectors equal up to phase map to the same output.
    """
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    a = v[k]
    if a == 0:
        return v.copy()
    return v * (abs(a) / a)


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(x for c in v for x in (c.real, c.imag))


def hermitian_eig(
    h: np.ndarray, tol: float = HERMITICITY_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    The input must be Hermitian within ``tol`` (max absolute deviation); it is
    symmetrized to (H + H†)/2 before decomposition so round-off asymmetry
    cannot leak into the result. Eigenvalues come back in descending order,
    exact ties broken by descending lexicographic order of the
    phase-canonicalized eigenvectors (this keeps identity-basis order for
    diagonal inputs). Eigenvector columns are phase-canonicalized.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    dev = np.abs(h - h.conj().T).max()
    if dev > tol:
        raise NotHermitianError(
            f"max |H - H^dag| = {dev:.3e} exceeds tolerance {tol:.1e}"
        )
    sym = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(sym)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    cols = [canonical_phase(v[:, j]) for j in range(v.shape[1])]
    # Exact eigenvalue ties get a deterministic vector order.
    i = 0
    n = len(w)
    while i < n:
        j = i + 1
        while j < n and w[j] == w[i]:
            j += 1
        if j - i > 1:
            cols[i:j] = sorted(cols[i:j], key=_lex_key, reverse=True)
        i = j
    return w, np.column_stack(cols)


def partial_trace(
    rho: np.ndarray, layout: SystemLayout, keep: Iterable[str]
) -> np.ndarray:
    """Trace out every factor not named in ``keep``.

    The result's factors follow the parent layout order of the kept labels
    (use ``layout.sublayout(keep)`` for the matching layout). The trace of the
    input is preserved exactly up to round-off.
    """
    rho = np.asarray(rho, dtype=complex)
    d = layout.total_dim
    if rho.shape != (d, d):
        raise LayoutMismatchError(
            f"matrix shape {rho.shape} does not match layout dimension {d}"
        )
    keep_pos = layout.positions(keep)
    if not keep_pos:
        raise UnknownLabelError("keep must name at least one factor")
    n = layout.n_factors
    keep_set = set(keep_pos)
    rho_t = rho.reshape(layout.dims * 2)
    row_idx = list(range(n))
    col_idx = [i if i not in keep_set else n + i for i in range(n)]
    out_idx = [i for i in keep_pos] + [n + i for i in keep_pos]
    return np.einsum(rho_t, row_idx + col_idx, out_idx).reshape(
        int(np.prod([layout.dims[p] for p in keep_pos])), -1
    )


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)*sum |eigenvalues of rho - sigma|.

    Valid for Hermitian operands; intended for pairs of density matrices.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatchError(
            f"operand shapes differ: {rho.shape} vs {sigma.shape}"
        )
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def factor_permutation_matrix(
    dims: Sequence[int], perm: Sequence[int]
) -> np.ndarray:
    """Unitary reordering tensor factors: output slot ``k`` takes input factor
    ``perm[k]``.

    Acting on a vector indexed row-major over ``dims``, the result is indexed
    row-major over ``[dims[p] for p in perm]``.
    """
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise DimensionMismatchError(
            f"{perm} is not a permutation of {len(dims)} slots"
        )
    d = int(np.prod(dims))
    out_dims = [dims[p] for p in perm]
    mat = np.zeros((d, d))
    for flat_in, multi in enumerate(np.ndindex(*dims)):
        multi_out = tuple(multi[p] for p in perm)
        flat_out = int(np.ravel_multi_index(multi_out, out_dims))
        mat[flat_out, flat_in] = 1.0
    return mat


def permute_vector_factors(
    vec: np.ndarray, dims: Sequence[int], perm: Sequence[int]
) -> np.ndarray:
    """Apply the factor permutation to a vector without building the matrix."""
    dims = tuple(int(d) for d in dims)
    return np.asarray(vec).reshape(dims).transpose(perm).reshape(-1)
