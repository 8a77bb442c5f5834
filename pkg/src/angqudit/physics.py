"""Source spectra, angular slit masks, their Fourier transforms and SLM limits.

Angles are in radians. OAM indices are integers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi


def wrap_angle(phi):
    """Reduce angles into (-pi, pi]."""
    w = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), TWO_PI)
    return float(w) if np.ndim(w) == 0 else w


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class SpiralSpectrum:
    """OAM amplitudes c_l of the down-converted pair for l in [-L, L].

    The pair state is sum_l c_l |l>_s |-l>_i; ``amplitudes[k]`` holds c_{k-L}.
    """

    amplitudes: np.ndarray
    kind: str = "custom"
    sigma: float | None = None

    def __post_init__(self):
        c = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if c.size % 2 != 1:
            raise InvalidParameterError("spectrum must have odd length 2L+1")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidParameterError(f"spectrum not normalized: sum |c_l|^2 = {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @property
    def L(self) -> int:
        return (self.amplitudes.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.L, self.L + 1)

    def amplitude(self, l: int) -> complex:
        if abs(l) > self.L:
            return 0j
        return complex(self.amplitudes[l + self.L])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "L": self.L, "sigma": self.sigma}


def _normalized(c):
    c = np.asarray(c, dtype=np.complex128)
    return c / np.sqrt(np.sum(np.abs(c) ** 2))


def uniform_spectrum(L: int) -> SpiralSpectrum:
    """Flat spectrum, c_l = 1/sqrt(2L+1)."""
    if int(L) != L or L < 0:
        raise InvalidParameterError(f"L must be a non-negative integer, got {L!r}")
    L = int(L)
    return SpiralSpectrum(_normalized(np.ones(2 * L + 1)), kind="uniform")


def gaussian_spectrum(L: int, sigma: float) -> SpiralSpectrum:
    """Real positive c_l proportional to exp(-l^2 / (2 sigma^2))."""
    if int(L) != L or L < 0:
        raise InvalidParameterError(f"L must be a non-negative integer, got {L!r}")
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma!r}")
    L = int(L)
    l = np.arange(-L, L + 1)
    return SpiralSpectrum(_normalized(np.exp(-(l**2) / (2.0 * sigma**2))), kind="gaussian", sigma=float(sigma))


@dataclass(frozen=True)
class AngularMask:
    """N angular slits of width ``alpha``; slit n is centered at n * ``beta``.

    With ``strict=True`` (default) the mask must satisfy beta >= alpha and
    N (alpha + beta) <= 2 pi. ``strict=False`` accepts any positive alpha and
    beta and only warns when slits overlap on the circle; it exists so that
    parameter sets quoted for published fringe plots can be reproduced.
    """

    N: int
    alpha: float
    beta: float
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        a, b, N = self.alpha, self.beta, self.N
        if not a > 0:
            raise InvalidParameterError(f"alpha must be > 0, got {a!r}")
        if a > TWO_PI:
            raise InvalidParameterError(f"alpha must be <= 2 pi, got {a!r}")
        if N > 1 and not b > 0:
            raise InvalidParameterError(f"beta must be > 0, got {b!r}")
        tol = 1e-12
        if self.strict:
            if N > 1 and b < a - tol:
                raise InvalidParameterError(f"beta={b!r} < alpha={a!r}: slits overlap")
            if N * (a + b) > TWO_PI + tol:
                raise InvalidParameterError(
                    f"N(alpha + beta) = {N * (a + b)!r} exceeds 2 pi for N={N}, alpha={a!r}, beta={b!r}"
                )
        elif N > 1 and (b < a - tol or (N - 1) * b + a > TWO_PI + tol):
            warnings.warn(f"angular mask N={N}, alpha={a!r}, beta={b!r} has overlapping slits", stacklevel=3)

    def centers(self) -> np.ndarray:
        return np.arange(self.N) * self.beta

    def to_dict(self) -> dict:
        return {"N": self.N, "alpha": self.alpha, "beta": self.beta}


def _check_slit(mask: AngularMask, n) -> None:
    n_arr = np.asarray(n)
    if np.any(n_arr < 0) or np.any(n_arr > mask.N - 1) or np.any(n_arr != np.round(n_arr)):
        raise InvalidParameterError(f"slit index {n!r} out of range 0..{mask.N - 1}")


def slit_transmission(mask: AngularMask, n: int, phi) -> int | np.ndarray:
    """Amplitude transmission (0 or 1) of slit n at angle phi.

    The comparison is done on phi - n*beta wrapped into (-pi, pi], so slits
    straddling the branch cut behave like any other slit.
    """
    _check_slit(mask, n)
    offset = wrap_angle(np.asarray(phi, dtype=float) - n * mask.beta)
    out = (np.abs(offset) <= mask.alpha / 2 + 1e-15).astype(int)
    return int(out) if out.ndim == 0 else out


def slit_fourier(mask: AngularMask, n: int, l):
    """Closed-form OAM amplitude of slit n, (alpha/2pi) e^{-i l beta n} sinc(alpha l / 2)."""
    _check_slit(mask, n)
    l = np.asarray(l, dtype=float)
    out = mask.alpha / TWO_PI * np.exp(-1j * l * mask.beta * n) * sinc(mask.alpha * l / 2)
    return complex(out) if out.ndim == 0 else out


def slit_arcs(mask: AngularMask, n: int) -> list[tuple[float, float]]:
    """Support of slit n as sub-intervals of [-pi, pi]."""
    _check_slit(mask, n)
    c = wrap_angle(n * mask.beta)
    lo, hi = c - mask.alpha / 2, c + mask.alpha / 2
    if mask.alpha >= TWO_PI:
        return [(-np.pi, np.pi)]
    if lo < -np.pi:
        return [(lo + TWO_PI, np.pi), (-np.pi, hi)]
    if hi > np.pi:
        return [(lo, np.pi), (-np.pi, hi - TWO_PI)]
    return [(lo, hi)]


def slit_fourier_numeric(mask: AngularMask, n: int, l: int, quadrature_points: int = 10_000) -> complex:
    """(1/2pi) times the integral of A_n(phi) e^{-i l phi} over (-pi, pi], by quadrature.

    The slit support is located by wrapping, then each arc is integrated with
    composite Gauss-Legendre. Independent of :func:`slit_fourier`.
    """
    if quadrature_points < 64:
        raise InvalidParameterError(f"quadrature_points must be >= 64, got {quadrature_points}")
    arcs = slit_arcs(mask, n)
    total = sum(hi - lo for lo, hi in arcs)
    acc = 0j
    for lo, hi in arcs:
        pts = max(64, int(round(quadrature_points * (hi - lo) / total)))
        acc += kernels.arc_quadrature(float(lo), float(hi), int(l), pts)
    return acc


def slit_overlap(mask_a: AngularMask, n: int, mask_b: AngularMask, m: int, q: int) -> complex:
    """(1/2pi) times the integral of A_{a,n} A_{b,m} e^{i q phi}, exact.

    This is the Parseval inner product of two shifted slit spectra; it is
    alpha/2pi e^{i q n beta} sinc(q alpha/2) for a slit with itself and zero
    for disjoint slits.
    """
    acc = 0j
    for lo_a, hi_a in slit_arcs(mask_a, n):
        for lo_b, hi_b in slit_arcs(mask_b, m):
            lo, hi = max(lo_a, lo_b), min(hi_a, hi_b)
            if hi <= lo:
                continue
            if q == 0:
                acc += hi - lo
            else:
                acc += (np.exp(1j * q * hi) - np.exp(1j * q * lo)) / (1j * q)
    return complex(acc / TWO_PI)


@dataclass(frozen=True)
class SlmSpec:
    pixel_diameter: float
    pixel_size_um: float

    def __post_init__(self):
        if not (self.pixel_diameter > 0 and self.pixel_size_um > 0):
            raise InvalidParameterError("SLM pixel diameter and pixel size must be positive")


class SlmCapacity(NamedTuple):
    alpha_min: float
    beta: float
    n_max: int
    d_max: int


def slm_capacity(spec: SlmSpec) -> SlmCapacity:
    """Smallest slit, largest slit count and qudit dimension an SLM supports.

    alpha_min / 2 = arctan(2 d / D) with D the physical aperture diameter; the
    slit count assumes equal width and spacing, N = 2 pi / (alpha + beta).
    """
    diameter = spec.pixel_diameter * spec.pixel_size_um
    alpha_min = 2.0 * math.atan(2.0 * spec.pixel_size_um / diameter)
    n_max = int(math.floor(TWO_PI / (2.0 * alpha_min) + 1e-9))
    return SlmCapacity(alpha_min=alpha_min, beta=alpha_min, n_max=n_max, d_max=n_max * n_max)
