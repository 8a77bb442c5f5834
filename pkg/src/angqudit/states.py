"""Pathway-basis density matrices and their expansion into the OAM product basis."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidStateError, TruncationError
from .physics import AngularMask, SpiralSpectrum, slit_fourier, slit_overlap

PATHWAY_DIAGONAL = "pathway-diagonal"
PHASE_CONVENTIONS = ("ladder", "uniform")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Immutable density matrix with a labelled basis.

    ``bipartition`` is ``(d_s, d_i)`` for a tensor-product basis ordered
    signal-major, ``"pathway-diagonal"`` for the reduced basis of kets
    |s,n>|i,n>, or ``None`` when no split is declared.
    """

    entries: np.ndarray
    basis_labels: tuple = ()
    bipartition: tuple | str | None = None
    metadata: dict = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameterError(f"density matrix must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        labels = tuple(tuple(x) if isinstance(x, (list, tuple)) else x for x in self.basis_labels)
        if not labels:
            labels = tuple(range(a.shape[0]))
        if len(labels) != a.shape[0]:
            raise InvalidParameterError("basis_labels length does not match matrix dimension")
        object.__setattr__(self, "basis_labels", labels)
        bp = self.bipartition
        if isinstance(bp, list):
            bp = tuple(bp)
        if isinstance(bp, tuple):
            if len(bp) != 2 or bp[0] * bp[1] != a.shape[0]:
                raise InvalidParameterError(f"bipartition {bp} incompatible with dim {a.shape[0]}")
            bp = (int(bp[0]), int(bp[1]))
        elif bp not in (None, PATHWAY_DIAGONAL):
            raise InvalidParameterError(f"unknown bipartition {bp!r}")
        object.__setattr__(self, "bipartition", bp)
        if self.check:
            report = validate_density(a)
            if not report.passed:
                raise InvalidStateError(
                    "not a valid density matrix: "
                    f"hermiticity defect {report.hermiticity_defect:.3g}, "
                    f"trace defect {report.trace_defect:.3g}, "
                    f"min eigenvalue {report.min_eigenvalue:.3g}",
                    min_eigenvalue=report.min_eigenvalue,
                )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def to_dict(self) -> dict:
        flat = self.entries.ravel()
        return {
            "dim": self.dim,
            "bipartition": list(self.bipartition) if isinstance(self.bipartition, tuple) else self.bipartition,
            "basis_labels": [list(x) if isinstance(x, tuple) else x for x in self.basis_labels],
            "entries": [[float(z.real), float(z.imag)] for z in flat],
            "metadata": self.metadata,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, d: dict, check: bool = True) -> "DensityMatrix":
        dim = int(d["dim"])
        pairs = np.asarray(d["entries"], dtype=float)
        if pairs.shape != (dim * dim, 2):
            raise InvalidParameterError(f"entries must hold {dim * dim} [re, im] pairs")
        entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
        return cls(entries, tuple(d.get("basis_labels") or ()), d.get("bipartition"), dict(d.get("metadata") or {}), check)

    @classmethod
    def from_json(cls, text: str, check: bool = True) -> "DensityMatrix":
        return cls.from_dict(json.loads(text), check=check)


class DensityReport(NamedTuple):
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    passed: bool


def validate_density(rho, tol: float = 1e-10, check_psd: bool = True) -> DensityReport:
    """Hermiticity, trace and positivity defects of a square matrix.

    ``check_psd=False`` skips the eigen-decomposition (min_eigenvalue is NaN)
    for matrices that are positive by construction.
    """
    a = np.asarray(rho.entries if isinstance(rho, DensityMatrix) else rho, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"expected a square matrix, got shape {a.shape}")
    herm = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    trace_defect = float(abs(np.trace(a) - 1.0))
    if check_psd and a.size:
        min_eig = float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])
    else:
        min_eig = float("nan") if a.size else 0.0
    passed = herm <= tol and trace_defect <= tol and (min_eig >= -tol or not check_psd)
    return DensityReport(herm, trace_defect, min_eig, passed)


@dataclass(frozen=True)
class PathwayStateParams:
    """Diagonal weights, coherence (visibility) and phase of a symmetric N-slit state."""

    N: int
    V: float = 1.0
    theta: float = 0.0
    weights: tuple | None = None

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not 0.0 <= self.V <= 1.0:
            raise InvalidParameterError(f"visibility V must lie in [0, 1], got {self.V!r}")
        w = np.full(self.N, 1.0 / self.N) if self.weights is None else np.asarray(self.weights, dtype=float)
        if w.shape != (self.N,):
            raise InvalidParameterError(f"need {self.N} diagonal weights, got {w.shape}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("diagonal weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))


def pure_qudit_state(params: PathwayStateParams, phase_convention: str = "ladder") -> DensityMatrix:
    """Symmetric N-slit state in the reduced pathway basis {|s,n>|i,n>}.

    Off-diagonals are sqrt(w_n w_m) V e^{i theta (m - n)} under the ``ladder``
    convention, which is rank one at V = 1. The ``uniform`` convention uses
    e^{i theta sign(m - n)}; for N > 2 and theta not a multiple of pi it is
    not positive and is rejected.
    """
    if phase_convention not in PHASE_CONVENTIONS:
        raise InvalidParameterError(f"phase_convention must be one of {PHASE_CONVENTIONS}")
    N = params.N
    w = np.sqrt(np.asarray(params.weights))
    k = np.arange(N)
    diff = k[None, :] - k[:, None]
    if phase_convention == "ladder":
        phase = np.exp(1j * params.theta * diff)
    else:
        phase = np.exp(1j * params.theta * np.sign(diff))
    rho = np.outer(w, w) * params.V * phase
    rho[k, k] = np.asarray(params.weights)
    rho = (rho + rho.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -1e-10:
        raise InvalidStateError(
            f"parameters N={N}, V={params.V}, theta={params.theta} ({phase_convention}) give a "
            f"non-positive matrix, smallest eigenvalue {min_eig:.6g}",
            min_eigenvalue=min_eig,
        )
    meta = {"N": N, "V": params.V, "theta": params.theta, "phase_convention": phase_convention}
    return DensityMatrix(rho, tuple((n, n) for n in range(N)), PATHWAY_DIAGONAL, meta)


def embed_symmetric(state: DensityMatrix) -> DensityMatrix:
    """Lift a reduced-basis state into the full N x N pathway product basis."""
    if state.bipartition != PATHWAY_DIAGONAL:
        raise InvalidParameterError("embed_symmetric expects a pathway-diagonal state")
    N = state.dim
    idx = np.arange(N) * (N + 1)
    full = np.zeros((N * N, N * N), dtype=np.complex128)
    full[np.ix_(idx, idx)] = state.entries
    labels = tuple((n, m) for n in range(N) for m in range(N))
    return DensityMatrix(full, labels, (N, N), dict(state.metadata), check=False)


def asymmetric_mixed_state(N: int, M: int, V: float, theta: float = 0.0) -> DensityMatrix:
    """(1 - V) I/(NM) + V |u><u| with u_k = e^{i theta k}/sqrt(NM) over pathways k = n M + m."""
    if int(N) != N or int(M) != M or N < 1 or M < 1:
        raise InvalidParameterError(f"N and M must be positive integers, got {N!r}, {M!r}")
    if not 0.0 <= V <= 1.0:
        raise InvalidParameterError(f"visibility V must lie in [0, 1], got {V!r}")
    N, M = int(N), int(M)
    D = N * M
    u = np.exp(1j * theta * np.arange(D)) / np.sqrt(D)
    rho = (1.0 - V) * np.eye(D) / D + V * np.outer(u, u.conj())
    labels = tuple((n, m) for n in range(N) for m in range(M))
    return DensityMatrix(rho, labels, (N, M), {"N": N, "M": M, "V": V, "theta": theta})


def pathways(state: DensityMatrix) -> list[tuple[int, int]]:
    """Slit pairs (n, m) labelling the basis kets of a pathway-basis state."""
    if state.bipartition == PATHWAY_DIAGONAL:
        return [(n, n) for n in range(state.dim)]
    if isinstance(state.bipartition, tuple):
        N, M = state.bipartition
        return [(n, m) for n in range(N) for m in range(M)]
    raise InvalidParameterError("state has no pathway bipartition")


def _check_masks(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask) -> None:
    if state.bipartition == PATHWAY_DIAGONAL:
        if not mask_s.N == mask_i.N == state.dim:
            raise InvalidParameterError(
                f"mask slit counts ({mask_s.N}, {mask_i.N}) do not match symmetric state of dim {state.dim}"
            )
    elif isinstance(state.bipartition, tuple):
        if (mask_s.N, mask_i.N) != state.bipartition:
            raise InvalidParameterError(
                f"mask slit counts ({mask_s.N}, {mask_i.N}) do not match bipartition {state.bipartition}"
            )
    else:
        raise InvalidParameterError("state has no pathway bipartition")


def _autocorrelation(c: np.ndarray) -> dict:
    # W(d) = sum_l conj(c_l) c_{l+d}
    L = (c.size - 1) // 2
    return {d: complex(np.vdot(c[max(0, -d): c.size - max(0, d)], c[max(0, d): c.size - max(0, -d)]))
            for d in range(-2 * L, 2 * L + 1)}


def pathway_gram(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask,
                 spectrum: SpiralSpectrum) -> np.ndarray:
    """Exact inner products <psi_p|psi_q> of the untruncated OAM expansions of the pathway kets."""
    _check_masks(state, mask_s, mask_i)
    paths = pathways(state)
    W = _autocorrelation(spectrum.amplitudes)
    P = len(paths)
    G = np.zeros((P, P), dtype=np.complex128)
    for a, (n_p, m_p) in enumerate(paths):
        for b, (n_q, m_q) in enumerate(paths):
            if b < a:
                G[a, b] = np.conj(G[b, a])
                continue
            acc = 0j
            for d, w in W.items():
                if w == 0:
                    continue
                s = slit_overlap(mask_s, n_p, mask_s, n_q, d)
                if s == 0:
                    continue
                acc += w * s * slit_overlap(mask_i, m_p, mask_i, m_q, -d)
            G[a, b] = acc
    return G


def pathway_expansion(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask,
                      spectrum: SpiralSpectrum, L_out: int) -> np.ndarray:
    """Matrix whose column p is pathway ket p expanded on |l'>_s|l''>_i, |l'|, |l''| <= L_out."""
    _check_masks(state, mask_s, mask_i)
    c = spectrum.amplitudes
    l = spectrum.modes
    lo = np.arange(-L_out, L_out + 1)
    cols = []
    for n, m in pathways(state):
        As = slit_fourier(mask_s, n, lo[:, None] - l[None, :])
        Ai = slit_fourier(mask_i, m, lo[:, None] + l[None, :])
        cols.append(((As * c[None, :]) @ Ai.T).ravel())
    return np.stack(cols, axis=1)


def pathway_to_oam(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask,
                   spectrum: SpiralSpectrum, L_out: int | None = None,
                   min_captured: float = 0.5) -> DensityMatrix:
    """Expand a pathway-basis state onto the truncated OAM product basis.

    Each pathway ket |s,n>|i,m> becomes sum_l c_l A_{s,n}(l'-l) A_{i,m}(l''+l)
    |l'>|l''>. The result is renormalized to unit trace; ``metadata`` records
    the normalization constant of the untruncated expansion and the fraction
    of it captured inside |l'|, |l''| <= L_out.
    """
    if L_out is None:
        L_out = spectrum.L + 15
    if int(L_out) != L_out or L_out < spectrum.L:
        raise InvalidParameterError(f"L_out={L_out!r} must be an integer >= spectrum L={spectrum.L}")
    L_out = int(L_out)
    T = pathway_expansion(state, mask_s, mask_i, spectrum, L_out)
    rho = T @ state.entries @ T.conj().T
    trace_trunc = float(np.real(np.trace(rho)))
    G = pathway_gram(state, mask_s, mask_i, spectrum)
    trace_full = float(np.real(np.trace(state.entries @ G)))
    if trace_full <= 0:
        raise InvalidParameterError("state has zero weight after the slit masks")
    captured = trace_trunc / trace_full
    if captured < min_captured:
        raise TruncationError(
            f"L_out={L_out} keeps only {captured:.3f} of the state (< {min_captured}); increase L_out",
            captured=captured,
        )
    # T rho T^H is congruent to a P x P problem, so positivity is checked there
    sq = _psd_sqrt(state.entries)
    min_eig = float(np.linalg.eigvalsh(sq @ (T.conj().T @ T) @ sq)[0])
    if min_eig < -1e-10 * trace_trunc:
        raise InvalidStateError(f"expanded state is not positive (min eigenvalue {min_eig:.3g})", min_eig)
    rho = rho / trace_trunc
    rho = (rho + rho.conj().T) / 2
    labels = tuple((a, b) for a in range(-L_out, L_out + 1) for b in range(-L_out, L_out + 1))
    d = 2 * L_out + 1
    meta = {
        "normalization_constant": 1.0 / np.sqrt(trace_full),
        "captured_fraction": captured,
        "L_out": L_out,
        "source": dict(state.metadata),
    }
    out = DensityMatrix(rho, labels, (d, d), meta, check=False)
    report = validate_density(out, check_psd=False)
    if not report.passed:
        raise InvalidStateError(f"expanded state failed validation: {report}")
    return out


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
