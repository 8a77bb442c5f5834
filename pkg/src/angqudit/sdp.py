"""Small dense primal-dual interior-point solver for complex Hermitian SDPs.

Problems are given in dual standard form::

    maximize    b^T y
    subject to  Z_k = C_k - sum_j y_j A_{j,k}  >= 0   for every block k

with primal partner ``minimize sum_k Re Tr(C_k X_k)`` subject to
``sum_k Re Tr(A_{j,k} X_k) = b_j`` and ``X_k >= 0``. The search direction is
HKM with a Mehrotra predictor-corrector step; iterates need not be feasible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class SdpResult:
    y: np.ndarray
    X: list
    Z: list
    status: str
    iterations: int
    primal_objective: float
    dual_objective: float
    gap: float
    primal_infeasibility: float
    dual_infeasibility: float


def _herm(a):
    return (a + a.conj().swapaxes(-1, -2)) / 2


def _op(A, X):
    """A(X)_j = sum_k Re Tr(A_{j,k} X_k)."""
    out = 0.0
    for Ak, Xk in zip(A, X):
        m = Ak.shape[0]
        # Tr(A_j X) = sum_pq A_j[p,q] X[q,p]
        out = out + np.real(Ak.reshape(m, -1) @ Xk.T.reshape(-1))
    return out


def _adj(A, y):
    return [np.tensordot(y, Ak, axes=(0, 0)) for Ak in A]


def _max_step(X, dX):
    """Largest t with X + t dX >= 0 (inf if dX keeps X positive)."""
    try:
        Lc = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = np.linalg.inv(Lc)
    lam = np.linalg.eigvalsh(_herm(Li @ dX @ Li.conj().T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _row_structure(Af):
    """Split constraint rows into empty, sparse (few nonzeros) and dense ones."""
    nnz = np.count_nonzero(Af, axis=1)
    active = np.flatnonzero(nnz)
    sparse = np.flatnonzero((nnz > 0) & (nnz <= 4))
    dense = np.flatnonzero(nnz > 4)
    rows, cols = np.nonzero(Af[sparse])
    return {
        "active": active,
        "dense": dense,
        "dense_conj": np.conj(Af[dense]),
        "sparse_rows": sparse[rows],
        "sparse_cols": cols,
        "sparse_vals": np.conj(Af[sparse][rows, cols]),
    }


def _schur_block(Ak, st, x, zi, m):
    """Contribution Re Tr(A_i X A_j Z^{-1}) of one block to the Schur complement."""
    out = np.zeros((m, m))
    act = st["active"]
    if act.size == 0:
        return out
    G = (x @ Ak[act] @ zi).reshape(act.size, -1)  # rows of G follow ``act``
    if st["dense"].size:
        out[np.ix_(st["dense"], act)] = np.real(st["dense_conj"] @ G.T)
    if st["sparse_rows"].size:
        contrib = st["sparse_vals"][:, None] * G[:, st["sparse_cols"]].T
        block = np.zeros((m, act.size), dtype=np.complex128)
        np.add.at(block, st["sparse_rows"], contrib)
        out[:, act] += np.real(block)
    return out


def solve_sdp(C, A, b, tol=1e-9, max_iter=100, dual_bound=None, step=0.9):
    """Solve the block SDP above.

    Parameters
    ----------
    C : list of (n_k, n_k) Hermitian arrays
    A : list of (m, n_k, n_k) arrays, the constraint matrices per block
    b : (m,) real array
    dual_bound : float, optional
        Upper bound on the optimum valid whenever the primal is feasible.
        A nearly dual-feasible iterate exceeding it certifies primal
        infeasibility.
    """
    C = [np.asarray(c, dtype=np.complex128) for c in C]
    A = [np.asarray(a, dtype=np.complex128) for a in A]
    b = np.asarray(b, dtype=float)
    m = b.size
    X = [np.eye(c.shape[0], dtype=np.complex128) for c in C]
    Z = [np.eye(c.shape[0], dtype=np.complex128) for c in C]
    y = np.zeros(m)
    nsum = sum(c.shape[0] for c in C)
    bnorm = 1.0 + np.linalg.norm(b)
    cnorm = 1.0 + max(np.linalg.norm(c) for c in C)
    structure = [_row_structure(Ak.reshape(m, -1)) for Ak in A]

    status = "max-iterations"
    it = 0
    for it in range(1, max_iter + 1):
        Rp = b - _op(A, X)
        ATy = _adj(A, y)
        Rd = [c - z - aty for c, z, aty in zip(C, Z, ATy)]
        mu = sum(np.real(np.trace(x @ z)) for x, z in zip(X, Z)) / nsum
        pobj = sum(np.real(np.trace(c @ x)) for c, x in zip(C, X))
        dobj = float(b @ y)
        pinf = np.linalg.norm(Rp) / bnorm
        dinf = max(np.linalg.norm(r) for r in Rd) / cnorm
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        log.debug("it %d pobj %.10g dobj %.10g gap %.2e pinf %.2e dinf %.2e mu %.2e",
                  it, pobj, dobj, gap, pinf, dinf, mu)
        if gap < tol and pinf < tol and dinf < tol:
            status = "optimal"
            break
        if dual_bound is not None and dinf < 1e-6 and dobj > dual_bound:
            status = "infeasible"
            break

        try:
            Zinv = [np.linalg.inv(z) for z in Z]
        except np.linalg.LinAlgError:
            # Z hit the cone boundary in floating point; keep the last iterate
            status = "feasible"
            break
        M = np.zeros((m, m))
        for Ak, st, x, zi in zip(A, structure, X, Zinv):
            M += _schur_block(Ak, st, x, zi, m)
        M = (M + M.T) / 2
        try:
            factor = np.linalg.cholesky(M + 1e-14 * np.trace(M) / m * np.eye(m))
            finv = np.linalg.inv(factor)

            def solve(r, finv=finv, M=M):
                x = finv.T @ (finv @ r)
                for _ in range(2):
                    x = x + finv.T @ (finv @ (r - M @ x))
                return x
        except np.linalg.LinAlgError:
            Mp = np.linalg.pinv(M, rcond=1e-13)
            solve = lambda r: Mp @ r  # noqa: E731

        def direction(K):
            W = [(k - x @ rd) @ zi for k, x, rd, zi in zip(K, X, Rd, Zinv)]
            dy = solve(Rp - _op(A, W))
            dZ = [rd - a for rd, a in zip(Rd, _adj(A, dy))]
            dX = [_herm((k - x @ dz) @ zi) for k, x, dz, zi in zip(K, X, dZ, Zinv)]
            return dy, dX, dZ

        try:
            dy, dX, dZ = direction([-x @ z for x, z in zip(X, Z)])
            ap = min(1.0, min(_max_step(x, d) for x, d in zip(X, dX)))
            ad = min(1.0, min(_max_step(z, d) for z, d in zip(Z, dZ)))
            mu_aff = sum(np.real(np.trace((x + ap * dx) @ (z + ad * dz)))
                         for x, dx, z, dz in zip(X, dX, Z, dZ)) / nsum
            expon = max(1.0, 3.0 * min(ap, ad) ** 2)
            sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** expon) if mu > 0 else 0.0
            # keep complementarity from outrunning the infeasibilities
            infeas = max(pinf, dinf)
            if mu < infeas * 1e-2:
                sigma = max(sigma, 0.5)
            K = [sigma * mu * np.eye(x.shape[0]) - x @ z - dxa @ dza
                 for x, z, dxa, dza in zip(X, Z, dX, dZ)]
            dy, dX, dZ = direction(K)
        except np.linalg.LinAlgError:
            status = "feasible"
            break
        ap = min(_max_step(x, d) for x, d in zip(X, dX))
        ad = min(_max_step(z, d) for z, d in zip(Z, dZ))
        gamma = max(step, 0.9 + 0.09 * min(1.0, ap, ad))
        ap = min(1.0, gamma * ap)
        ad = min(1.0, gamma * ad)
        if ap < 1e-12 and ad < 1e-12:
            status = "feasible"
            break
        X = [_herm(x + ap * d) for x, d in zip(X, dX)]
        y = y + ad * dy
        Z = [_herm(z + ad * d) for z, d in zip(Z, dZ)]

    Rp = b - _op(A, X)
    Rd = [c - z - aty for c, z, aty in zip(C, Z, _adj(A, y))]
    pobj = float(sum(np.real(np.trace(c @ x)) for c, x in zip(C, X)))
    dobj = float(b @ y)
    return SdpResult(
        y=y,
        X=X,
        Z=Z,
        status=status,
        iterations=it,
        primal_objective=pobj,
        dual_objective=dobj,
        gap=abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj)),
        primal_infeasibility=float(np.linalg.norm(Rp) / bnorm),
        dual_infeasibility=float(max(np.linalg.norm(r) for r in Rd) / cnorm),
    )
