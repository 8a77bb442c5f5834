"""Coincidence rates, fringe scans and visibility extraction."""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._backend import kernels
from .errors import InvalidParameterError, NumericalInconsistencyError
from .physics import AngularMask, SpiralSpectrum
from .states import PATHWAY_DIAGONAL, DensityMatrix, embed_symmetric, pathway_gram

NEGATIVE_TOL = 1e-9
NORMALIZATIONS = ("raw", "peak")


def envelope_amplitude(spectrum: SpiralSpectrum, alpha, l_s, l_i, alpha_i=None):
    """sum_l c_l sinc((l_s - l) alpha_s / 2) sinc((l_i + l) alpha_i / 2), broadcast over (l_s, l_i)."""
    alpha_i = alpha if alpha_i is None else alpha_i
    ls, li = np.broadcast_arrays(np.asarray(l_s, dtype=np.int64), np.asarray(l_i, dtype=np.int64))
    out = kernels.envelope_sum(
        np.ascontiguousarray(spectrum.amplitudes),
        float(alpha),
        float(alpha_i),
        np.ascontiguousarray(ls.ravel()),
        np.ascontiguousarray(li.ravel()),
    )
    out = np.asarray(out).reshape(ls.shape)
    return complex(out) if out.ndim == 0 else out


def diffraction_envelope(spectrum: SpiralSpectrum, alpha, l_s, l_i, alpha_i=None):
    """Squared magnitude of :func:`envelope_amplitude`."""
    amp = envelope_amplitude(spectrum, alpha, l_s, l_i, alpha_i)
    env = np.abs(amp) ** 2
    return float(env) if np.ndim(env) == 0 else env


def _as_matrix(state) -> np.ndarray:
    return np.asarray(state.entries if isinstance(state, DensityMatrix) else state, dtype=np.complex128)


def _clamp(values, what):
    values = np.asarray(values, dtype=float)
    if np.any(values < -NEGATIVE_TOL):
        raise NumericalInconsistencyError(f"{what} is negative ({values.min():.3g}); state is not positive")
    return np.maximum(values, 0.0)


def interference_factor(rho, beta: float, total_oam):
    """sum_{n,m} rho_nm e^{-i beta x (n - m)} at x = l_s + l_i (a quadratic form v^H rho v)."""
    rho = _as_matrix(rho)
    x = np.asarray(total_oam, dtype=float)
    n = np.arange(rho.shape[0])
    v = np.exp(1j * beta * x.reshape(-1, 1) * n)  # (points, N)
    vals = np.real(np.einsum("pn,nm,pm->p", v.conj(), rho, v))
    return vals.reshape(x.shape)


def asymmetric_interference_factor(rho, N: int, M: int, beta_s: float, beta_i: float, l_s, l_i):
    """sum rho_{nm,n'm'} e^{-i beta_s l_s (n-n')} e^{-i beta_i l_i (m-m')} as w^H rho w."""
    rho = _as_matrix(rho)
    ls, li = np.broadcast_arrays(np.asarray(l_s, dtype=float), np.asarray(l_i, dtype=float))
    n = np.repeat(np.arange(N), M)
    m = np.tile(np.arange(M), N)
    w = np.exp(1j * (beta_s * ls.reshape(-1, 1) * n + beta_i * li.reshape(-1, 1) * m))
    vals = np.real(np.einsum("pk,kj,pj->p", w.conj(), rho, w))
    return vals.reshape(ls.shape)


def raw_constant(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask,
                 spectrum: SpiralSpectrum) -> float:
    """Global prefactor C^2 (alpha_s alpha_i / 4 pi^2)^2 taking envelope x interference to a probability."""
    G = pathway_gram(state, mask_s, mask_i, spectrum)
    c2 = 1.0 / float(np.real(np.trace(state.entries @ G)))
    return c2 * (mask_s.alpha * mask_i.alpha / (4 * np.pi**2)) ** 2


def coincidence_rate(state, mask: AngularMask, spectrum: SpiralSpectrum, l_s, l_i, raw: bool = False):
    """Coincidence rate of a symmetric N-slit state, envelope x multi-path interference term.

    Without ``raw`` the global constant is dropped; with it the value is the
    joint detection probability for (l_s, l_i).
    """
    rho = _as_matrix(state)
    if isinstance(state, DensityMatrix) and state.bipartition not in (PATHWAY_DIAGONAL, None):
        raise InvalidParameterError("coincidence_rate needs a pathway-diagonal state; use coincidence_rate_asymmetric")
    if rho.shape[0] != mask.N:
        raise InvalidParameterError(f"state dim {rho.shape[0]} does not match mask N={mask.N}")
    ls, li = np.broadcast_arrays(np.asarray(l_s), np.asarray(l_i))
    factor = _clamp(interference_factor(rho, mask.beta, ls + li), "interference term")
    rate = diffraction_envelope(spectrum, mask.alpha, ls, li) * factor
    if raw:
        dm = state if isinstance(state, DensityMatrix) else DensityMatrix(rho, bipartition=PATHWAY_DIAGONAL)
        rate = rate * raw_constant(dm, mask, mask, spectrum)
    return float(rate) if np.ndim(rate) == 0 else rate


def coincidence_rate_asymmetric(state: DensityMatrix, mask_s: AngularMask, mask_i: AngularMask,
                                spectrum: SpiralSpectrum, l_s, l_i, raw: bool = False):
    """Coincidence rate for a general (N, M) pathway state.

    Uses the factorized form envelope x sum rho_{nm,n'm'} e^{-i beta_s l_s (n-n')}
    e^{-i beta_i l_i (m-m')}. It is exact for states supported on n = m
    pathways of identical masks; otherwise it neglects the dependence of the
    slit phases on the pump-mode index l.
    """
    if state.bipartition == PATHWAY_DIAGONAL:
        state = embed_symmetric(state)
    if not isinstance(state.bipartition, tuple):
        raise InvalidParameterError("coincidence_rate_asymmetric needs a state with bipartition (N, M)")
    N, M = state.bipartition
    if (mask_s.N, mask_i.N) != (N, M):
        raise InvalidParameterError(f"masks ({mask_s.N}, {mask_i.N}) do not match bipartition {(N, M)}")
    ls, li = np.broadcast_arrays(np.asarray(l_s), np.asarray(l_i))
    factor = asymmetric_interference_factor(state.entries, N, M, mask_s.beta, mask_i.beta, ls, li)
    factor = _clamp(factor, "interference term")
    rate = diffraction_envelope(spectrum, mask_s.alpha, ls, li, mask_i.alpha) * factor
    if raw:
        rate = rate * raw_constant(state, mask_s, mask_i, spectrum)
    return float(rate) if np.ndim(rate) == 0 else rate


@dataclass(frozen=True, eq=False)
class FringeGrid:
    """Coincidence rates on an (l_i, l_s) grid; ``rates[j, k]`` is at (l_s[k], l_i[j]).

    ``rates = scale * envelope * interference`` holds elementwise.
    """

    l_s: np.ndarray
    l_i: np.ndarray
    rates: np.ndarray
    envelope: np.ndarray
    interference: np.ndarray
    normalization: str = "peak"
    scale: float = 1.0
    params: dict = field(default_factory=dict)

    def corrected(self, rel_floor: float = 1e-12) -> np.ndarray:
        """Envelope-corrected fringe (the interference term); NaN where the envelope vanishes."""
        floor = rel_floor * float(np.max(self.envelope)) if self.envelope.size else 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.rates / (self.scale * self.envelope)
        return np.where(self.envelope > floor, out, np.nan)

    def peak(self, row: int = 0) -> int:
        return int(self.l_s[int(np.argmax(self.rates[row]))])

    def rows(self):
        for j, li in enumerate(self.l_i):
            for k, ls in enumerate(self.l_s):
                yield int(ls), int(li), float(self.rates[j, k])

    def metadata(self) -> dict:
        return {"version": __version__, "normalization": self.normalization, "scale": self.scale, **self.params}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {json.dumps(self.metadata(), sort_keys=True)}\n")
        buf.write("l_s,l_i,rate\n")
        for ls, li, r in self.rows():
            buf.write(f"{ls},{li},{r!r}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata(),
            "l_s": [int(x) for x in self.l_s],
            "l_i": [int(x) for x in self.l_i],
            "rates": [[float(x) for x in row] for row in self.rates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def read_fringe_csv(text: str) -> tuple[dict, np.ndarray]:
    """Parse :meth:`FringeGrid.to_csv` output into (metadata, rows of (l_s, l_i, rate))."""
    lines = text.splitlines()
    meta = json.loads(lines[0][2:]) if lines and lines[0].startswith("# ") else {}
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if body[0].strip() != "l_s,l_i,rate":
        raise InvalidParameterError(f"unexpected CSV header {body[0]!r}")
    data = np.array([[float(x) for x in ln.split(",")] for ln in body[1:]]).reshape(-1, 3)
    return meta, data


def fringe_scan(state: DensityMatrix, masks, spectrum: SpiralSpectrum, l_i, l_s_range,
                normalization: str = "peak") -> FringeGrid:
    """Scan the coincidence rate over integer l_s in ``l_s_range`` (inclusive) at fixed l_i.

    ``masks`` is one mask (symmetric state) or a ``(mask_s, mask_i)`` pair.
    ``l_i`` may be a single integer or a sequence.
    """
    if normalization not in NORMALIZATIONS:
        raise InvalidParameterError(f"normalization must be one of {NORMALIZATIONS}")
    lo, hi = (int(x) for x in l_s_range)
    if lo > hi:
        raise InvalidParameterError(f"l_s range [{lo}, {hi}] is empty")
    mask_s, mask_i = (masks, masks) if isinstance(masks, AngularMask) else masks
    ls = np.arange(lo, hi + 1)
    li = np.atleast_1d(np.asarray(l_i, dtype=np.int64))
    LS, LI = np.meshgrid(ls, li)
    env = diffraction_envelope(spectrum, mask_s.alpha, LS, LI, mask_i.alpha)
    if state.bipartition == PATHWAY_DIAGONAL and mask_s == mask_i:
        factor = interference_factor(state.entries, mask_s.beta, LS + LI)
        N, M = state.dim, state.dim
        if mask_s.N != N:
            raise InvalidParameterError(f"state dim {N} does not match mask N={mask_s.N}")
    else:
        st = embed_symmetric(state) if state.bipartition == PATHWAY_DIAGONAL else state
        if not isinstance(st.bipartition, tuple) or (mask_s.N, mask_i.N) != st.bipartition:
            raise InvalidParameterError(f"masks ({mask_s.N}, {mask_i.N}) do not match state {st.bipartition}")
        N, M = st.bipartition
        factor = asymmetric_interference_factor(st.entries, N, M, mask_s.beta, mask_i.beta, LS, LI)
    factor = _clamp(factor, "interference term")
    product = env * factor
    if normalization == "raw":
        scale = raw_constant(state, mask_s, mask_i, spectrum)
    else:
        peak = float(product.max())
        scale = 1.0 / peak if peak > 0 else 1.0
    params = {
        "N": N,
        "M": M,
        "alpha": mask_s.alpha,
        "alpha_i": mask_i.alpha,
        "beta": mask_s.beta,
        "beta_i": mask_i.beta,
        "V": state.metadata.get("V"),
        "theta": state.metadata.get("theta"),
        "L": spectrum.L,
        "spectrum": spectrum.kind,
        "sigma": spectrum.sigma,
    }
    return FringeGrid(ls, li, product * scale, env, factor, normalization, scale, params)


def visibility_from_fringes(grid: FringeGrid, row: int | None = None) -> float:
    """(R_max - R_min)/(R_max + R_min) over envelope-corrected samples."""
    corr = grid.corrected()
    vals = corr[row] if row is not None else corr.ravel()
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        warnings.warn("fringe grid has no samples with a non-vanishing envelope")
        return 0.0
    hi, lo = float(vals.max()), float(vals.min())
    if hi + lo <= 0 or hi - lo <= 1e-12 * hi:
        warnings.warn("fringe grid is flat; visibility set to 0")
        return 0.0
    return float(np.clip((hi - lo) / (hi + lo), 0.0, 1.0))


def fringe_frequency(grid: FringeGrid, row: int = 0, pad: int = 16) -> tuple[float, float]:
    """Fundamental frequency (cycles per unit l_s) of the corrected scan, and the DFT bin width 1/n.

    The mean-removed scan is Hann-windowed and zero-padded ``pad`` times; the
    fundamental is the lowest-frequency local maximum reaching half the
    largest peak, so strong harmonics of multi-slit fringes are not mistaken
    for it.
    """
    vals = grid.corrected()[row]
    if not np.all(np.isfinite(vals)):
        raise InvalidParameterError("envelope vanishes inside the scan; cannot correct it")
    n = vals.size
    if n < 4:
        raise InvalidParameterError("need at least 4 samples for a frequency estimate")
    x = (vals - vals.mean()) * np.hanning(n)
    spec = np.abs(np.fft.rfft(x, n * pad))
    freqs = np.fft.rfftfreq(n * pad)
    if spec.max() <= 0:
        return 0.0, 1.0 / n
    inner = (spec[1:-1] >= spec[:-2]) & (spec[1:-1] >= spec[2:]) & (spec[1:-1] >= 0.5 * spec.max())
    peaks = np.flatnonzero(inner) + 1
    k = int(peaks[0]) if peaks.size else int(np.argmax(spec))
    return float(freqs[k]), 1.0 / n


def fringe_amplitude(grid: FringeGrid, row: int | None = None) -> float:
    """Peak-to-trough height of the corrected fringe, in units of ``scale``."""
    corr = grid.corrected()
    vals = corr[row] if row is not None else corr.ravel()
    vals = vals[np.isfinite(vals)]
    return float(vals.max() - vals.min())
