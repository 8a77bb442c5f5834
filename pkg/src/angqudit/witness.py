"""Certified lower bounds on logarithmic negativity from partial measurement data.

For any Hermitian H with -I <= H <= I and reals nu with H^{T1} >= sum nu_i M_i,
every state reproducing the data m_i has ||rho^{T1}||_1 >= sum nu_i m_i. The
best such pair is found by semidefinite programming; the resulting
certificate is checked by :func:`verify_certificate` without reference to
the solver.

The trace constraint Tr(rho) = 1 is always part of the data (coefficient
``nu_identity``), so any solver output can be made exactly feasible by
shifting that coefficient; certificates are sound even from truncated runs.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .entanglement import partial_transpose
from .errors import InvalidParameterError, NumericalInconsistencyError
from .sdp import solve_sdp
from .states import PATHWAY_DIAGONAL, DensityMatrix, embed_symmetric

log = logging.getLogger(__name__)

STATUSES = ("optimal", "feasible", "infeasible", "max-iterations")


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    matrix: np.ndarray
    label: str = ""
    locality: tuple | None = None

    def __post_init__(self):
        a = np.array(self.matrix, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameterError(f"measurement operator must be square, got {a.shape}")
        if np.max(np.abs(a - a.conj().T)) > 1e-12:
            raise InvalidParameterError(f"measurement operator {self.label!r} is not Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_dict(self) -> dict:
        return {"label": self.label, "entries": [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]}

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementOperator":
        pairs = np.asarray(d["entries"], dtype=float)
        n = int(round(np.sqrt(pairs.shape[0])))
        return cls((pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n), d.get("label", ""))


def product_operator(signal: np.ndarray, idler: np.ndarray, label: str = "") -> MeasurementOperator:
    signal = np.asarray(signal, dtype=np.complex128)
    idler = np.asarray(idler, dtype=np.complex128)
    return MeasurementOperator(np.kron(signal, idler), label, (signal, idler))


def _ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[i] = 1.0
    return v


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _superposition(d: int, j: int, k: int, phase: float) -> np.ndarray:
    return (_ket(d, j) + np.exp(1j * phase) * _ket(d, k)) / np.sqrt(2)


def _oam_index(L: int, l: int) -> int:
    if int(l) != l or abs(l) > L:
        raise InvalidParameterError(f"OAM index {l!r} outside [-{L}, {L}]")
    return int(l) + L


def oam_projectors(L: int, pairs: Sequence[tuple[int, int]]) -> list[MeasurementOperator]:
    """|l_s><l_s| (x) |l_i><l_i| on the truncated OAM basis l in [-L, L]."""
    d = 2 * L + 1
    ops = []
    for ls, li in pairs:
        ps = _proj(_ket(d, _oam_index(L, ls)))
        pi = _proj(_ket(d, _oam_index(L, li)))
        ops.append(product_operator(ps, pi, f"P[{ls},{li}]"))
    return ops


def superposition_projectors(L: int, pairs) -> list[MeasurementOperator]:
    """Products of projectors onto (|l> + e^{i phi}|l'>)/sqrt 2 on each side.

    ``pairs`` holds ``((l, l', phi_s), (k, k', phi_i))`` tuples.
    """
    d = 2 * L + 1
    ops = []
    for (l1, l2, ps), (k1, k2, pi) in pairs:
        if l1 == l2 or k1 == k2:
            raise InvalidParameterError("superposition needs two distinct modes per side")
        vs = _superposition(d, _oam_index(L, l1), _oam_index(L, l2), ps)
        vi = _superposition(d, _oam_index(L, k1), _oam_index(L, k2), pi)
        ops.append(product_operator(_proj(vs), _proj(vi), f"S[{l1},{l2},{ps:.6g};{k1},{k2},{pi:.6g}]"))
    return ops


def local_tomography_projectors(d: int) -> list[tuple[str, np.ndarray]]:
    """d^2 rank-one projectors spanning the Hermitian d x d matrices."""
    out = [(f"{j}", _proj(_ket(d, j))) for j in range(d)]
    for j, k in combinations(range(d), 2):
        out.append((f"{j}+{k}", _proj(_superposition(d, j, k, 0.0))))
        out.append((f"{j}+i{k}", _proj(_superposition(d, j, k, np.pi / 2))))
    return out


def complete_product_set(d_s: int, d_i: int) -> list[MeasurementOperator]:
    """Tomographically complete set of product projectors, (d_s d_i)^2 operators."""
    ls = local_tomography_projectors(d_s)
    li = local_tomography_projectors(d_i)
    return [product_operator(a, b, f"T[{na};{nb}]") for na, a in ls for nb, b in li]


def diagonal_product_set(d_s: int, d_i: int) -> list[MeasurementOperator]:
    """Product projectors onto the local computational bases."""
    return [
        product_operator(_proj(_ket(d_s, j)), _proj(_ket(d_i, k)), f"P[{j},{k}]")
        for j in range(d_s)
        for k in range(d_i)
    ]


def correlated_superposition_set(d_s: int, d_i: int) -> list[MeasurementOperator]:
    """Diagonal projectors plus two-mode superpositions on matching index pairs of both sides.

    Pairs (j, k) on the signal are combined with (j, k) on the idler for the
    phases (0, 0) and (pi/2, -pi/2); these detect the coherences of states
    concentrated on the j = k diagonal.
    """
    ops = diagonal_product_set(d_s, d_i)
    for j, k in combinations(range(min(d_s, d_i)), 2):
        for ps, pi in ((0.0, 0.0), (np.pi / 2, -np.pi / 2)):
            a = _proj(_superposition(d_s, j, k, ps))
            b = _proj(_superposition(d_i, j, k, pi))
            ops.append(product_operator(a, b, f"S[{j},{k},{ps:.6g};{j},{k},{pi:.6g}]"))
    return ops


def expectation_values(rho, ops: Sequence[MeasurementOperator]) -> np.ndarray:
    """m_i = Tr(M_i rho)."""
    if isinstance(rho, DensityMatrix) and rho.bipartition == PATHWAY_DIAGONAL and ops and ops[0].dim != rho.dim:
        rho = embed_symmetric(rho)
    a = np.asarray(rho.entries if isinstance(rho, DensityMatrix) else rho, dtype=np.complex128)
    out = []
    for op in ops:
        if op.dim != a.shape[0]:
            raise InvalidParameterError(f"operator {op.label!r} has dim {op.dim}, state has {a.shape[0]}")
        val = np.sum(op.matrix * a.T)
        if abs(val.imag) > 1e-10:
            raise NumericalInconsistencyError(f"Tr(M rho) for {op.label!r} has imaginary part {val.imag:.3g}")
        out.append(float(val.real))
    return np.array(out)


@dataclass
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 80
    margin: float = 1e-11
    consistency_tol: float = 1e-8


@dataclass(eq=False)
class WitnessCertificate:
    """A feasible witness pair and the negativity bound it certifies.

    ``bound = log2(max(1, sum_i nu_i m_i + nu_identity))``.
    """

    H: np.ndarray
    nu: np.ndarray
    nu_identity: float
    bound: float
    solver_status: str
    dims: tuple
    iterations: int = 0
    objective: float = 0.0
    duality_gap: float = float("nan")
    solve_seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self, ops=None, m=None) -> dict:
        d = {
            "dims": list(self.dims),
            "H": [[float(z.real), float(z.imag)] for z in np.asarray(self.H).ravel()],
            "nu": [float(x) for x in self.nu],
            "nu_identity": float(self.nu_identity),
            "bound": float(self.bound),
            "status": self.solver_status,
            "iterations": int(self.iterations),
            "objective": float(self.objective),
            "duality_gap": float(self.duality_gap),
        }
        if ops is not None:
            d["operators"] = [op.to_dict() for op in ops]
        if m is not None:
            d["data"] = [float(x) for x in m]
        return d

    def to_json(self, ops=None, m=None) -> str:
        return json.dumps(self.to_dict(ops, m), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict):
        """Returns ``(certificate, ops or None, m or None)``."""
        pairs = np.asarray(d["H"], dtype=float)
        n = int(round(np.sqrt(pairs.shape[0])))
        H = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
        cert = cls(
            H=H,
            nu=np.asarray(d["nu"], dtype=float),
            nu_identity=float(d["nu_identity"]),
            bound=float(d["bound"]),
            solver_status=d.get("status", "feasible"),
            dims=tuple(d["dims"]),
            iterations=int(d.get("iterations", 0)),
            objective=float(d.get("objective", 0.0)),
            duality_gap=float(d.get("duality_gap", float("nan"))),
        )
        ops = [MeasurementOperator.from_dict(o) for o in d["operators"]] if "operators" in d else None
        m = np.asarray(d["data"], dtype=float) if "data" in d else None
        return cert, ops, m


def _hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of n x n Hermitian matrices under Re Tr(A B), shape (n^2, n, n)."""
    basis = []
    for j in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[j, j] = 1.0
        basis.append(e)
    s = 1.0 / np.sqrt(2)
    for j, k in combinations(range(n), 2):
        e = np.zeros((n, n), dtype=np.complex128)
        e[j, k] = e[k, j] = s
        basis.append(e)
        e = np.zeros((n, n), dtype=np.complex128)
        e[j, k] = -1j * s
        e[k, j] = 1j * s
        basis.append(e)
    return np.array(basis)


def _coefficient_sum(ops, nu, nu_identity, n):
    total = nu_identity * np.eye(n, dtype=np.complex128)
    for coef, op in zip(nu, ops):
        total = total + coef * op.matrix
    return total


def certificate_bound(nu, nu_identity, m) -> tuple[float, float]:
    objective = float(np.dot(nu, m) + nu_identity)
    return objective, float(np.log2(max(1.0, objective)))


def negativity_lower_bound(ops: Sequence[MeasurementOperator], m, dims: tuple,
                           solver_cfg: SolverConfig | None = None) -> WitnessCertificate:
    """Best certified lower bound on log2 ||rho^{T1}||_1 given Tr(M_i rho) = m_i.

    ``dims`` is the bipartition ``(d_s, d_i)`` of the operators' space.
    """
    cfg = solver_cfg or SolverConfig()
    ops = list(ops)
    m = np.asarray(m, dtype=float)
    if len(ops) != m.size:
        raise InvalidParameterError(f"{len(ops)} operators but {m.size} data values")
    ds, di = int(dims[0]), int(dims[1])
    n = ds * di
    for op in ops:
        if op.dim != n:
            raise InvalidParameterError(f"operator {op.label!r} has dim {op.dim}, expected {n}")
    t0 = time.perf_counter()

    basis = _hermitian_basis(n)
    mats = np.array([np.eye(n)] + [op.matrix for op in ops], dtype=np.complex128)
    m_ext = np.concatenate([[1.0], m])
    # coordinates of each operator in the Hermitian basis
    F = np.real(np.einsum("ipq,aqp->ia", mats, basis))
    W, S, Ut = np.linalg.svd(F, full_matrices=False)
    r = int(np.sum(S > S[0] * 1e-10))
    W, S, Ut = W[:, :r], S[:r], Ut[:r]
    resid = m_ext - W @ (W.T @ m_ext)
    consistent = np.linalg.norm(resid) <= cfg.consistency_tol * (1 + np.linalg.norm(m_ext))
    b_red = (W.T @ m_ext) / S
    B_red = np.einsum("ra,apq->rpq", Ut, basis)

    basis_pt = np.array([partial_transpose(e, (ds, di)) for e in basis])
    n2 = n * n
    zeros_r = np.zeros((r, n, n), dtype=np.complex128)
    A1 = np.concatenate([-basis_pt, B_red])
    A2 = np.concatenate([basis, zeros_r])
    A3 = np.concatenate([-basis, zeros_r])
    C = [np.zeros((n, n)), np.eye(n), np.eye(n)]
    b = np.concatenate([np.zeros(n2), b_red])

    if consistent:
        res = solve_sdp(C, [A1, A2, A3], b, tol=cfg.tol, max_iter=cfg.max_iter,
                        dual_bound=min(ds, di) + 1.0)
        status = res.status
        y, iterations, gap = res.y, res.iterations, res.gap
    else:
        status, y, iterations, gap = "infeasible", np.zeros(n2 + r), 0, float("nan")

    H = np.tensordot(y[:n2], basis, axes=(0, 0))
    H = (H + H.conj().T) / 2
    nu_ext = W @ (y[n2:] / S)
    scale = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(H)))))
    H = H / scale
    nu_ext = nu_ext / scale
    slack = partial_transpose(H, (ds, di)) - _coefficient_sum(ops, nu_ext[1:], nu_ext[0], n)
    deficit = float(np.linalg.eigvalsh((slack + slack.conj().T) / 2)[0])
    nu_ext[0] += min(deficit, 0.0) - cfg.margin * (1.0 + float(np.max(np.abs(nu_ext))))
    objective, bound = certificate_bound(nu_ext[1:], nu_ext[0], m)
    if status == "infeasible":
        log.warning("measurement data are not consistent with any density matrix")
    cert = WitnessCertificate(
        H=H,
        nu=nu_ext[1:],
        nu_identity=float(nu_ext[0]),
        bound=bound,
        solver_status=status,
        dims=(ds, di),
        iterations=iterations,
        objective=objective,
        duality_gap=gap,
        solve_seconds=time.perf_counter() - t0,
    )
    return cert


@dataclass
class VerificationReport:
    passed: bool
    h_norm: float
    min_slack_eigenvalue: float
    recomputed_bound: float
    bound_defect: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def verify_certificate(cert: WitnessCertificate, ops: Sequence[MeasurementOperator], m,
                       tol: float = 1e-8) -> VerificationReport:
    """Re-check ||H|| <= 1, H^{T1} - sum nu_i M_i - nu_identity I >= 0 and the stored bound."""
    ops = list(ops)
    m = np.asarray(m, dtype=float)
    H = np.asarray(cert.H, dtype=np.complex128)
    n = H.shape[0]
    nu = np.asarray(cert.nu, dtype=float)
    if len(ops) != nu.size or m.size != nu.size or any(op.dim != n for op in ops):
        return VerificationReport(False, float("nan"), float("nan"), float("nan"), float("inf"))
    herm = float(np.max(np.abs(H - H.conj().T)))
    h_norm = float(np.max(np.abs(np.linalg.eigvalsh((H + H.conj().T) / 2))))
    slack = partial_transpose(H, tuple(cert.dims)) - _coefficient_sum(ops, nu, cert.nu_identity, n)
    min_eig = float(np.linalg.eigvalsh((slack + slack.conj().T) / 2)[0])
    _, bound = certificate_bound(nu, cert.nu_identity, m)
    defect = abs(bound - cert.bound)
    passed = herm <= tol and h_norm <= 1 + tol and min_eig >= -tol and defect <= tol
    return VerificationReport(passed, h_norm, min_eig, bound, defect)
