"""Command-line front end: ``angqudit <subcommand> [options]``.

Exit codes: 0 success, 2 invalid parameters, 3 numerical inconsistency,
4 certificate verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .entanglement import logarithmic_negativity
from .errors import AngQuditError, InvalidParameterError, VerificationError
from .interference import fringe_frequency, fringe_scan, visibility_from_fringes
from .physics import SlmSpec, slm_capacity
from .scenario import PRESETS, Scenario, load_scenario, preset
from .states import embed_symmetric, pathway_to_oam
from .witness import (
    WitnessCertificate,
    complete_product_set,
    correlated_superposition_set,
    diagonal_product_set,
    expectation_values,
    negativity_lower_bound,
    oam_projectors,
    superposition_projectors,
    verify_certificate,
)

log = logging.getLogger("angqudit")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps identical bytes across platforms
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _scenario(args) -> Scenario:
    if bool(args.scenario) == bool(args.preset):
        raise InvalidParameterError("give exactly one of --scenario or --preset")
    return preset(args.preset) if args.preset else load_scenario(args.scenario)


def _finite(x):
    return None if x is None or not np.isfinite(x) else float(x)


def simulate(scen: Scenario, out: Path, fmt: str = "csv") -> dict:
    """Run a fringe scenario; writes one grid per swept beta plus a summary."""
    if scen.kind != "fringe":
        raise InvalidParameterError(f"kind: 'simulate' needs a fringe scenario, got {scen.kind!r}")
    state = scen.state()
    spectrum = scen.spectrum()
    runs = []
    for tag, beta in scen.betas():
        mask_s, mask_i = scen.masks(beta)
        masks = (mask_s, mask_i) if scen.asymmetric else mask_s
        grid = fringe_scan(state, masks, spectrum, list(scen.l_i), scen.l_s_range, scen.normalization)
        stem = scen.name if not tag else f"{scen.name}_{tag}"
        path = out / f"{stem}.{fmt}"
        _write(path, grid.to_csv() if fmt == "csv" else grid.to_json() + "\n")
        rows = []
        for j, li in enumerate(grid.l_i):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                v_est = visibility_from_fringes(grid, row=j)
            try:
                freq, width = fringe_frequency(grid, row=j)
            except InvalidParameterError:
                freq, width = float("nan"), float("nan")
            rows.append({
                "l_i": int(li),
                "peak_l_s": grid.peak(j),
                "V_est": v_est,
                "frequency": _finite(freq),
                "frequency_bin": _finite(width),
                "period": _finite(1.0 / freq) if freq and np.isfinite(freq) else None,
                "expected_frequency": beta / (2 * np.pi),
            })
        runs.append({"file": path.name, "beta": beta, "rows": rows})
    summary = {"version": __version__, "scenario": scen.name, "runs": runs}
    _write(out / f"{scen.name}_summary.json", _dump(summary))
    return summary


def export_density(scen: Scenario, out: Path) -> dict:
    """Write real and imaginary parts of the pathway-basis density matrix."""
    rho = scen.state()
    files = []
    base = {
        "version": __version__,
        "scenario": scen.name,
        "dim": rho.dim,
        "bipartition": rho.bipartition if isinstance(rho.bipartition, str) else list(rho.bipartition),
        "basis_labels": [list(x) if isinstance(x, tuple) else x for x in rho.basis_labels],
        "params": {"N": scen.N, "M": scen.M, "V": scen.V, "theta": scen.theta,
                   "phase_convention": scen.phase_convention},
    }
    for part, values in (("real", rho.entries.real), ("imag", rho.entries.imag)):
        doc = dict(base, part=part, entries=[[float(x) + 0.0 for x in row] for row in values])
        path = _write(out / f"{scen.name}_{part}.json", _dump(doc))
        files.append(path.name)
    return {"version": __version__, "scenario": scen.name, "files": files, "purity": rho.purity()}


def _oam_superposition_set(L: int):
    """OAM projectors plus superpositions on anti-correlated mode pairs (l, l') x (-l, -l')."""
    modes = range(-L, L + 1)
    ops = oam_projectors(L, [(a, b) for a in modes for b in modes])
    pairs = []
    for l1, l2 in combinations(modes, 2):
        for ps, pi in ((0.0, 0.0), (np.pi / 2, -np.pi / 2)):
            pairs.append(((l1, l2, ps), (-l1, -l2, pi)))
    return ops + superposition_projectors(L, pairs)


def witness_problem(scen: Scenario):
    """Return (state matrix, dims, operators) for a witness scenario."""
    state = scen.state()
    if scen.witness_basis == "oam":
        mask_s, mask_i = scen.masks()
        rho = pathway_to_oam(state, mask_s, mask_i, scen.spectrum(), scen.witness_L_out)
        L = scen.witness_L_out
        d = 2 * L + 1
        dims = (d, d)
        if scen.measurements == "diagonal":
            ops = oam_projectors(L, [(a, b) for a in range(-L, L + 1) for b in range(-L, L + 1)])
        elif scen.measurements == "superposition":
            ops = _oam_superposition_set(L)
        else:
            ops = complete_product_set(d, d)
    else:
        rho = embed_symmetric(state) if not scen.asymmetric else state
        dims = rho.bipartition
        builder = {"diagonal": diagonal_product_set, "superposition": correlated_superposition_set,
                   "complete": complete_product_set}[scen.measurements]
        ops = builder(*dims)
    return rho, dims, ops


def run_witness(scen: Scenario, out: Path) -> dict:
    if scen.kind != "witness":
        raise InvalidParameterError(f"kind: 'witness' needs a witness scenario, got {scen.kind!r}")
    rho, dims, ops = witness_problem(scen)
    if scen.measurements == "diagonal":
        log.warning("diagonal-only measurements cannot certify entanglement; expect bound 0")
    m = expectation_values(rho, ops)
    cert = negativity_lower_bound(ops, m, dims)
    report = verify_certificate(cert, ops, m)
    path = _write(out / f"{scen.name}_certificate.json", cert.to_json(ops, m) + "\n")
    summary = {
        "version": __version__,
        "scenario": scen.name,
        "file": path.name,
        "dims": list(dims),
        "measurements": scen.measurements,
        "operators": len(ops),
        "bound": cert.bound,
        "exact_log_negativity": logarithmic_negativity(rho, dims),
        "status": cert.solver_status,
        "iterations": cert.iterations,
        "verified": report.passed,
        "verification": report.as_dict(),
    }
    _write(out / f"{scen.name}_witness_summary.json", _dump(summary))
    if not report.passed:
        raise VerificationError(f"certificate failed verification: {report.as_dict()}")
    return summary


def verify_file(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"certificate: cannot read {path} ({exc})") from None
    try:
        cert, ops, m = WitnessCertificate.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameterError(f"certificate: malformed document ({exc})") from None
    if ops is None or m is None:
        raise InvalidParameterError("certificate: file lacks 'operators' and 'data', nothing to verify against")
    report = verify_certificate(cert, ops, m)
    result = {"file": str(path), "bound": cert.bound, **report.as_dict()}
    if not report.passed:
        raise VerificationError(f"certificate failed verification: {report.as_dict()}")
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="angqudit", description="Angular-slit qudit simulations")
    parser.add_argument("--version", action="version", version=f"angqudit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--scenario", help="path to a scenario JSON file")
        p.add_argument("--preset", help=f"built-in scenario: {', '.join(sorted(PRESETS))}")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, default=None,
                       help="accepted for reproducible randomized runs; presets are deterministic")

    p = sub.add_parser("simulate", help="coincidence-rate fringe scans")
    scenario_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p = sub.add_parser("witness", help="certified negativity lower bound from measurements")
    scenario_args(p)
    p = sub.add_parser("export-density", help="pathway density matrix as real/imag JSON")
    scenario_args(p)
    p = sub.add_parser("slm-capacity", help="slit budget of a pixelated modulator")
    p.add_argument("--pixels", type=float, default=2643, help="aperture diameter in pixels")
    p.add_argument("--pixel-size-um", type=float, default=3.74, help="pixel pitch in micrometres")
    p.add_argument("--out", default=None, help="optional directory for slm_capacity.json")
    p = sub.add_parser("verify-certificate", help="re-check a certificate JSON file")
    p.add_argument("certificate", help="certificate file written by 'witness'")
    return parser


def _print_summary(command: str, summary: dict) -> None:
    if command == "simulate":
        for run in summary["runs"]:
            for row in run["rows"]:
                period = f"{row['period']:.3f}" if row["period"] else "n/a"
                print(f"{run['file']}: l_i={row['l_i']:+d} peak l_s={row['peak_l_s']:+d} "
                      f"V_est={row['V_est']:.4f} period={period} "
                      f"(expected {1 / row['expected_frequency']:.3f})")
    elif command == "witness":
        print(f"{summary['file']}: bound={summary['bound']:.6f} exact={summary['exact_log_negativity']:.6f} "
              f"status={summary['status']} verified={summary['verified']}")
    else:
        print(_dump(summary), end="")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "slm-capacity":
            cap = slm_capacity(SlmSpec(args.pixels, args.pixel_size_um))
            summary = {"version": __version__, **cap._asdict()}
            if args.out:
                _write(Path(args.out) / "slm_capacity.json", _dump(summary))
        elif args.command == "verify-certificate":
            summary = verify_file(args.certificate)
        else:
            scen = _scenario(args)
            out = Path(args.out)
            if args.command == "simulate":
                summary = simulate(scen, out, args.format)
            elif args.command == "witness":
                summary = run_witness(scen, out)
            else:
                summary = export_density(scen, out)
    except AngQuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    _print_summary(args.command, summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
