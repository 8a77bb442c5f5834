"""Exact entanglement quantities: spectra, partial transpose, negativity, concurrence."""

from __future__ import annotations

import numpy as np

from ._backend import kernels
from .errors import InvalidParameterError
from .states import PATHWAY_DIAGONAL, DensityMatrix, embed_symmetric

HERMITIAN_TOL = 1e-10
SIGMA_Y2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _hermitian(matrix) -> np.ndarray:
    a = np.asarray(matrix.entries if isinstance(matrix, DensityMatrix) else matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"expected a square matrix, got shape {a.shape}")
    defect = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if defect > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a)))):
        raise InvalidParameterError(f"matrix is not Hermitian (defect {defect:.3g})")
    return (a + a.conj().T) / 2


JACOBI_MAX_DIM = 128


def hermitian_eigenvalues(matrix, vectors: bool = False, method: str = "auto"):
    """Eigenvalues of a Hermitian matrix in descending order.

    ``method="jacobi"`` runs the cyclic complex Jacobi kernel (deterministic,
    compiled when available); ``"lapack"`` defers to ``numpy.linalg.eigh``;
    ``"auto"`` picks Jacobi up to ``JACOBI_MAX_DIM`` and LAPACK beyond.
    With ``vectors=True`` returns ``(w, V)`` with eigenvectors as columns.
    """
    a = _hermitian(matrix)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        tol = max(1e-15, 10 * a.shape[0] * np.finfo(float).eps)
        w, v, _ = kernels.jacobi_eigh(a, tol, 100, vectors)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise InvalidParameterError(f"unknown eigen method {method!r}")
    order = np.argsort(w)[::-1]
    w = np.asarray(w)[order]
    if vectors:
        return w, np.asarray(v)[:, order]
    return w


def _bipartite(rho, dims):
    if isinstance(rho, DensityMatrix):
        if dims is None:
            if rho.bipartition == PATHWAY_DIAGONAL:
                rho = embed_symmetric(rho)
            dims = rho.bipartition
        a = rho.entries
    else:
        a = np.asarray(rho, dtype=np.complex128)
    if not isinstance(dims, tuple) or len(dims) != 2:
        raise InvalidParameterError("a bipartition (d_s, d_i) is required")
    ds, di = int(dims[0]), int(dims[1])
    if ds * di != a.shape[0]:
        raise InvalidParameterError(f"bipartition {dims} does not match dimension {a.shape[0]}")
    return a, ds, di


def partial_transpose(rho, dims=None) -> np.ndarray:
    """Transpose on the signal factor: entry ((j,a),(k,b)) moves to ((k,a),(j,b)).

    A pathway-diagonal state is first lifted into the full N x N pathway basis.
    """
    a, ds, di = _bipartite(rho, dims)
    return a.reshape(ds, di, ds, di).transpose(2, 1, 0, 3).reshape(ds * di, ds * di)


def trace_norm(matrix, method: str = "auto") -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(matrix, method=method))))


def logarithmic_negativity(rho, dims=None, method: str = "auto") -> float:
    """log2 of the trace norm of the partial transpose, floored at 0."""
    pt = partial_transpose(rho, dims)
    return max(0.0, float(np.log2(trace_norm(pt, method=method))))


def concurrence_two_qubit(rho) -> float:
    """Wootters concurrence, max(0, l1 - l2 - l3 - l4).

    The l_k (square roots of the eigenvalues of rho rho~) are computed as the
    singular values of W^T (sigma_y x sigma_y) W with rho = W W^H, which avoids
    taking square roots of rounding noise; eigenvalues of rho at noise level
    are treated as exact zeros.
    """
    if isinstance(rho, DensityMatrix):
        if rho.bipartition == PATHWAY_DIAGONAL:
            if rho.dim != 2:
                raise InvalidParameterError("concurrence needs N = 2")
            rho = embed_symmetric(rho)
        if rho.bipartition not in (None, (2, 2)):
            raise InvalidParameterError(f"concurrence needs bipartition (2, 2), got {rho.bipartition}")
    a = _hermitian(rho)
    if a.shape != (4, 4):
        raise InvalidParameterError(f"concurrence needs a 4x4 matrix, got {a.shape}")
    w, v = np.linalg.eigh(a)
    floor = 16 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w))))
    w = np.where(w > floor, w, 0.0)
    W = v * np.sqrt(w)
    lam = np.linalg.svd(W.T @ SIGMA_Y2 @ W, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
