"""Scenario files and built-in presets for the command-line front end.

A scenario is a JSON document (``schema_version`` 1)::

    {
      "schema_version": 1,
      "name": "fig6a",
      "kind": "fringe" | "density" | "witness",
      "mask": {"N": 2, "M": null, "alpha": "pi/10", "beta": "pi/4", "strict": true},
      "state": {"V": 0.875, "theta": 0, "weights": null, "phase_convention": "ladder"},
      "spectrum": {"kind": "uniform", "L": 10, "sigma": null},
      "scan": {"l_i": [2], "l_s": [-12, 12], "normalization": "peak"},
      "sweep": {"beta": ["pi/6", "pi/4"]},
      "witness": {"measurements": "superposition", "basis": "pathway", "L_out": 1}
    }

Angles may be numbers (radians) or strings such as ``"pi/10"``, ``"3*pi/4"``
or ``"-pi"``. Validation happens entirely in :func:`parse_scenario`, before any
numerical work, and every error names the offending parameter.
"""

from __future__ import annotations

import copy
import json
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError
from .physics import AngularMask, SpiralSpectrum, gaussian_spectrum, uniform_spectrum
from .states import (
    PHASE_CONVENTIONS,
    DensityMatrix,
    PathwayStateParams,
    asymmetric_mixed_state,
    pure_qudit_state,
)

SCHEMA_VERSION = 1
KINDS = ("fringe", "density", "witness")
MEASUREMENT_SETS = ("diagonal", "superposition", "complete")
WITNESS_BASES = ("pathway", "oam")

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<num>\d+(?:\.\d+)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d+)?))?\s*$"
)


def parse_angle(value, name: str = "angle") -> float:
    """Radians from a number or an exact multiple of pi written as text."""
    if isinstance(value, bool):
        raise InvalidParameterError(f"{name}: expected an angle, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        match = _ANGLE_RE.match(value.lower())
        if match:
            coef = Fraction(match["num"] or "1")
            if match["den"]:
                den = Fraction(match["den"])
                if den == 0:
                    raise InvalidParameterError(f"{name}: division by zero in {value!r}")
                coef /= den
            if match["sign"] == "-":
                coef = -coef
            return float(coef) * np.pi
        try:
            return float(value)
        except ValueError:
            pass
    raise InvalidParameterError(f"{name}: cannot read {value!r} as an angle (use e.g. 'pi/10' or 0.314)")


def _angle_tag(value) -> str:
    text = str(value).lower().replace(" ", "").replace("*", "")
    return re.sub(r"[^0-9a-z.+-]", "_", text)


def _int(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
        raise InvalidParameterError(f"{name}: expected an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise InvalidParameterError(f"{name}: must be >= {minimum}, got {value}")
    return value


def _real(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParameterError(f"{name}: expected a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidParameterError(f"{name}: must be finite")
    return value


@dataclass
class Scenario:
    """A fully validated scenario.  ``raw`` keeps the document as given."""

    name: str
    kind: str
    N: int
    M: int | None
    alpha: float
    beta: float
    strict: bool
    V: float
    theta: float
    weights: tuple | None
    phase_convention: str
    spectrum_kind: str
    L: int
    sigma: float | None
    l_i: tuple = (0,)
    l_s_range: tuple = (-12, 12)
    normalization: str = "peak"
    sweep_beta: tuple = ()
    measurements: str = "superposition"
    witness_basis: str = "pathway"
    witness_L_out: int = 1
    raw: dict = field(default_factory=dict)

    @property
    def asymmetric(self) -> bool:
        return self.M is not None

    def spectrum(self) -> SpiralSpectrum:
        if self.spectrum_kind == "gaussian":
            return gaussian_spectrum(self.L, self.sigma)
        return uniform_spectrum(self.L)

    def masks(self, beta: float | None = None):
        beta = self.beta if beta is None else beta
        with warnings.catch_warnings():
            if not self.strict:
                warnings.simplefilter("ignore")
            mask_s = AngularMask(self.N, self.alpha, beta, strict=self.strict)
            mask_i = AngularMask(self.M, self.alpha, beta, strict=self.strict) if self.asymmetric else mask_s
        return mask_s, mask_i

    def state(self) -> DensityMatrix:
        if self.asymmetric:
            return asymmetric_mixed_state(self.N, self.M, self.V, self.theta)
        params = PathwayStateParams(self.N, self.V, self.theta, self.weights)
        return pure_qudit_state(params, phase_convention=self.phase_convention)

    def betas(self) -> list[tuple[str, float]]:
        """(tag, beta) for every run; a single untagged run without a sweep."""
        if not self.sweep_beta:
            return [("", self.beta)]
        return [(f"beta_{_angle_tag(text)}", value) for text, value in self.sweep_beta]


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise InvalidParameterError(f"{key}: expected an object")
    return sec


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document and build a :class:`Scenario`.

    Every module precondition is checked here, including mask geometry for
    each swept beta, so that no output is written for an invalid scenario.
    """
    if not isinstance(doc, dict):
        raise InvalidParameterError("scenario: expected a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InvalidParameterError(f"schema_version: unsupported value {version!r} (expected {SCHEMA_VERSION})")
    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        raise InvalidParameterError(f"name: must be a non-empty file-safe string, got {name!r}")
    kind = doc.get("kind", "fringe")
    if kind not in KINDS:
        raise InvalidParameterError(f"kind: must be one of {KINDS}, got {kind!r}")

    mask = _section(doc, "mask")
    if "N" not in mask:
        raise InvalidParameterError("mask.N: required")
    N = _int(mask["N"], "mask.N", 1)
    M = mask.get("M")
    M = None if M is None else _int(M, "mask.M", 1)
    alpha = parse_angle(mask.get("alpha", "pi/10"), "mask.alpha")
    beta = parse_angle(mask.get("beta", "pi/4"), "mask.beta")
    strict = mask.get("strict", True)
    if not isinstance(strict, bool):
        raise InvalidParameterError("mask.strict: expected true or false")

    st = _section(doc, "state")
    V = _real(st.get("V", 1.0), "state.V")
    if not 0.0 <= V <= 1.0:
        raise InvalidParameterError(f"state.V: must lie in [0, 1], got {V}")
    theta = parse_angle(st.get("theta", 0.0), "state.theta")
    weights = st.get("weights")
    if weights is not None:
        if M is not None:
            raise InvalidParameterError("state.weights: not supported for asymmetric (N, M) states")
        if not isinstance(weights, list) or len(weights) != N:
            raise InvalidParameterError(f"state.weights: expected a list of {N} numbers")
        weights = tuple(_real(w, f"state.weights[{k}]") for k, w in enumerate(weights))
    convention = st.get("phase_convention", "ladder")
    if convention not in PHASE_CONVENTIONS:
        raise InvalidParameterError(f"state.phase_convention: must be one of {PHASE_CONVENTIONS}")

    sp = _section(doc, "spectrum")
    sp_kind = sp.get("kind", "uniform")
    if sp_kind not in ("uniform", "gaussian"):
        raise InvalidParameterError(f"spectrum.kind: must be 'uniform' or 'gaussian', got {sp_kind!r}")
    L = _int(sp.get("L", 10), "spectrum.L", 0)
    sigma = sp.get("sigma")
    if sp_kind == "gaussian":
        if sigma is None:
            raise InvalidParameterError("spectrum.sigma: required for a gaussian spectrum")
        sigma = _real(sigma, "spectrum.sigma")
        if sigma <= 0:
            raise InvalidParameterError(f"spectrum.sigma: must be positive, got {sigma}")

    scan = _section(doc, "scan")
    l_i = scan.get("l_i", [0])
    l_i = [l_i] if not isinstance(l_i, list) else l_i
    if not l_i:
        raise InvalidParameterError("scan.l_i: at least one value required")
    l_i = tuple(_int(x, f"scan.l_i[{k}]") for k, x in enumerate(l_i))
    rng = scan.get("l_s", [-12, 12])
    if not isinstance(rng, list) or len(rng) != 2:
        raise InvalidParameterError("scan.l_s: expected [l_min, l_max]")
    lo, hi = _int(rng[0], "scan.l_s[0]"), _int(rng[1], "scan.l_s[1]")
    if lo > hi:
        raise InvalidParameterError(f"scan.l_s: l_min {lo} exceeds l_max {hi}")
    normalization = scan.get("normalization", "peak")
    if normalization not in ("peak", "raw"):
        raise InvalidParameterError(f"scan.normalization: must be 'peak' or 'raw', got {normalization!r}")

    sweep = _section(doc, "sweep")
    unknown = set(sweep) - {"beta"}
    if unknown:
        raise InvalidParameterError(f"sweep: only 'beta' can be swept, got {sorted(unknown)}")
    sweep_beta = sweep.get("beta", [])
    if not isinstance(sweep_beta, list):
        raise InvalidParameterError("sweep.beta: expected a list of angles")
    sweep_beta = tuple((str(b), parse_angle(b, f"sweep.beta[{k}]")) for k, b in enumerate(sweep_beta))

    wit = _section(doc, "witness")
    measurements = wit.get("measurements", "superposition")
    if measurements not in MEASUREMENT_SETS:
        raise InvalidParameterError(f"witness.measurements: must be one of {MEASUREMENT_SETS}")
    basis = wit.get("basis", "pathway")
    if basis not in WITNESS_BASES:
        raise InvalidParameterError(f"witness.basis: must be one of {WITNESS_BASES}")
    L_out = _int(wit.get("L_out", 1), "witness.L_out", 0)
    if kind == "witness":
        side = 2 * L_out + 1 if basis == "oam" else N
        side_i = side if basis == "oam" or M is None else M
        if side * side_i > 36:
            raise InvalidParameterError(
                f"witness: total dimension {side * side_i} exceeds the budget of 36 "
                "(reduce N or witness.L_out)")

    scen = Scenario(
        name=name, kind=kind, N=N, M=M, alpha=alpha, beta=beta, strict=strict,
        V=V, theta=theta, weights=weights, phase_convention=convention,
        spectrum_kind=sp_kind, L=L, sigma=sigma, l_i=l_i, l_s_range=(lo, hi),
        normalization=normalization, sweep_beta=sweep_beta, measurements=measurements,
        witness_basis=basis, witness_L_out=L_out, raw=copy.deepcopy(doc),
    )
    # exercise every constructor once so geometry and state errors surface now
    for tag, b in scen.betas():
        try:
            scen.masks(b)
        except InvalidParameterError as exc:
            label = "mask.beta" if not tag else f"sweep.beta ({tag})"
            raise InvalidParameterError(f"{label}: {exc}") from None
    try:
        scen.spectrum()
        scen.state()
    except InvalidParameterError as exc:
        raise InvalidParameterError(f"state: {exc}") from None
    return scen


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"scenario: not valid JSON ({exc})") from None
    except OSError as exc:
        raise InvalidParameterError(f"scenario: cannot read {path} ({exc.strerror})") from None
    return parse_scenario(doc)


def _fringe(name, N, beta, l_i, V=0.875, M=None, sweep=None, strict=True, l_s=(-12, 12)):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "kind": "fringe",
        "mask": {"N": N, "M": M, "alpha": "pi/10", "beta": beta, "strict": strict},
        "state": {"V": V, "theta": 0},
        "spectrum": {"kind": "uniform", "L": 10},
        "scan": {"l_i": l_i, "l_s": list(l_s), "normalization": "peak"},
    }
    if sweep:
        doc["sweep"] = {"beta": list(sweep)}
    return doc


def _density(name, N, V, theta):
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "kind": "density",
        "mask": {"N": N, "alpha": "pi/10", "beta": "pi/4", "strict": False},
        "state": {"V": V, "theta": theta},
        "spectrum": {"kind": "uniform", "L": 10},
    }


def _witness(name, N, V, measurements):
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "kind": "witness",
        "mask": {"N": N, "alpha": "pi/10", "beta": "pi/4", "strict": False},
        "state": {"V": V, "theta": 0},
        "spectrum": {"kind": "uniform", "L": 10},
        "witness": {"measurements": measurements, "basis": "pathway"},
    }


# Several figure parameter sets overlap slits (beta < alpha) or exceed one turn
# (N(alpha + beta) > 2 pi); those presets build their masks non-strictly.
PRESETS = {
    "fig6a": _fringe("fig6a", 2, "pi/4", [2]),
    "fig6b": _fringe("fig6b", 2, "pi/4", [-2]),
    "fig6ab": _fringe("fig6ab", 2, "pi/4", [2, -2, 0]),
    "fig6": _fringe("fig6", 2, "pi/4", [0], sweep=["pi/6", "pi/4", "pi/2", "pi"], strict=False,
                    l_s=(-24, 24)),
    "fig7ab": _fringe("fig7ab", 6, "pi/4", [2, -2], strict=False),
    "fig7": _fringe("fig7", 6, "pi/4", [0], sweep=["pi/4", "pi/7", "pi/11", "pi/14"], strict=False,
                    l_s=(-28, 28)),
    "fig8": _fringe("fig8", 6, "pi/4", [0], M=3, sweep=["pi/4", "pi/7"], strict=False, l_s=(-28, 28)),
    "fig2": _density("fig2", 2, 1.0, 0),
    "fig2-mixed": _density("fig2-mixed", 2, 0.875, 0),
    "fig3": _density("fig3", 4, 1.0, "pi/4"),
    "fig4": _density("fig4", 5, 1.0, "pi/4"),
    "fig5": _density("fig5", 10, 1.0, "pi/4"),
    "witness-bell-complete": _witness("witness-bell-complete", 2, 1.0, "complete"),
    "witness-bell-superposition": _witness("witness-bell-superposition", 2, 1.0, "superposition"),
    "witness-bell-diagonal": _witness("witness-bell-diagonal", 2, 1.0, "diagonal"),
    "witness-qutrit-complete": _witness("witness-qutrit-complete", 3, 0.875, "complete"),
}


def preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise InvalidParameterError(f"--preset: unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return parse_scenario(copy.deepcopy(PRESETS[name]))
