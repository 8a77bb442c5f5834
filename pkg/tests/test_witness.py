import numpy as np
import pytest

from angqudit.entanglement import logarithmic_negativity, partial_transpose
from angqudit.errors import InvalidParameterError
from angqudit.interference import coincidence_rate
from angqudit.physics import AngularMask, uniform_spectrum
from angqudit.sdp import solve_sdp
from angqudit.states import PathwayStateParams, embed_symmetric, pathway_to_oam, pure_qudit_state
from angqudit.witness import (
    MeasurementOperator,
    SolverConfig,
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

from conftest import random_density


def bell(N=2, V=1.0):
    return embed_symmetric(pure_qudit_state(PathwayStateParams(N, V))).entries


def consistent_samples(rho0, ops, rng, count):
    """States with the same data as rho0: rho0 + t D with D orthogonal to span(ops, I), pushed to the PSD boundary."""
    n = rho0.shape[0]
    mats = np.array([np.eye(n)] + [op.matrix for op in ops])
    flat = np.concatenate([mats.reshape(len(mats), -1).real, mats.reshape(len(mats), -1).imag], axis=1)
    u, sv, _ = np.linalg.svd(flat.T, full_matrices=False)
    q = u[:, sv > 1e-10 * sv[0]]
    out = []
    for _ in range(count):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        d = (g + g.conj().T).ravel()
        vec = np.concatenate([d.real, d.imag])
        vec -= q @ (q.T @ vec)
        D = (vec[: n * n] + 1j * vec[n * n:]).reshape(n, n)
        D = (D + D.conj().T) / 2
        if np.linalg.norm(D) < 1e-12:
            out.append(rho0)
            continue
        # largest t with rho0 + t D >= 0
        L = np.linalg.cholesky(rho0 + 1e-15 * np.eye(n))
        Li = np.linalg.inv(L)
        lam = np.linalg.eigvalsh(Li @ D @ Li.conj().T)
        t_max = -1 / lam[0] if lam[0] < 0 else 1.0
        out.append(rho0 + rng.uniform(0.5, 1.0) * t_max * D)
    return out


def test_sdp_eigenvalue_problem(rng):
    # max y s.t. C - y I >= 0 has optimum lambda_min(C)
    g = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    C = g + g.conj().T
    res = solve_sdp([C], [np.eye(5)[None]], np.array([1.0]))
    assert res.status == "optimal"
    assert res.y[0] == pytest.approx(np.linalg.eigvalsh(C)[0], abs=1e-8)
    assert res.primal_objective == pytest.approx(res.dual_objective, abs=1e-8)


def test_sdp_two_blocks(rng):
    # max y1 + y2 s.t. I - y1 A >= 0, I - y2 B >= 0
    A = np.diag([1.0, 2.0, 4.0])
    B = np.diag([0.5, 0.25])
    res = solve_sdp([np.eye(3), np.eye(2)],
                    [np.array([A, np.zeros((3, 3))]), np.array([np.zeros((2, 2)), B])],
                    np.array([1.0, 1.0]))
    assert res.y == pytest.approx([0.25, 2.0], abs=1e-8)


def test_oam_projectors():
    (p,) = oam_projectors(1, [(0, 0)])
    assert p.matrix.shape == (9, 9)
    assert np.count_nonzero(p.matrix) == 1 and p.matrix[4, 4] == 1
    assert np.array_equal(p.matrix @ p.matrix, p.matrix)
    allp = oam_projectors(1, [(a, b) for a in range(-1, 2) for b in range(-1, 2)])
    assert np.array_equal(sum(op.matrix for op in allp), np.eye(9))
    with pytest.raises(InvalidParameterError):
        oam_projectors(1, [(2, 0)])


def test_superposition_projectors():
    (op,) = superposition_projectors(1, [((-1, 1, 0.0), (-1, 1, 0.0))])
    s, i = op.locality
    v = np.array([1, 0, 1]) / np.sqrt(2)
    assert np.allclose(s, np.outer(v, v))
    assert np.trace(s) == pytest.approx(1) and np.trace(i) == pytest.approx(1)
    assert np.allclose(op.matrix, np.kron(s, i))
    with pytest.raises(InvalidParameterError):
        superposition_projectors(1, [((1, 1, 0.0), (-1, 1, 0.0))])


def test_superposition_signal_distinguishes_coherence():
    ops = correlated_superposition_set(2, 2)
    coh = expectation_values(bell(), ops)
    dep = expectation_values(bell(V=0.0), ops)
    assert np.allclose(coh[:4], dep[:4])
    assert np.max(np.abs(coh[4:] - dep[4:])) > 0.1


def test_expectation_values_basic():
    rho = bell()
    ident = MeasurementOperator(np.eye(4), "I")
    assert expectation_values(rho, [ident])[0] == pytest.approx(1)
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert expectation_values(rho, [MeasurementOperator(np.outer(v, v), "perp")])[0] == pytest.approx(0)
    with pytest.raises(InvalidParameterError):
        expectation_values(np.eye(9) / 9, [ident])


def test_oam_projector_expectation_tracks_coincidence_rate():
    mask = AngularMask(2, np.pi / 10, np.pi / 4)
    spec = uniform_spectrum(2)
    state = pure_qudit_state(PathwayStateParams(2, 0.875))
    L = 22
    oam = pathway_to_oam(state, mask, mask, spec, L)
    pairs = [(0, 0), (-2, 2), (3, -1), (5, 4)]
    m = expectation_values(oam, oam_projectors(L, pairs))
    rates = np.array([coincidence_rate(state, mask, spec, a, b) for a, b in pairs])
    ratio = m / rates
    assert np.allclose(ratio, ratio[0], rtol=1e-9)


def test_complete_set_on_bell_is_exact():
    ops = complete_product_set(2, 2)
    m = expectation_values(bell(), ops)
    cert = negativity_lower_bound(ops, m, (2, 2))
    assert cert.bound == pytest.approx(1.0, abs=1e-4)
    assert cert.solver_status == "optimal"
    assert verify_certificate(cert, ops, m).passed


def test_diagonal_set_gives_zero():
    for N in (2, 3):
        ops = diagonal_product_set(N, N)
        m = expectation_values(bell(N), ops)
        cert = negativity_lower_bound(ops, m, (N, N))
        assert cert.bound == 0.0
        assert verify_certificate(cert, ops, m).passed


def test_separable_state_gives_zero(rng):
    rho = np.kron(random_density(rng, 2), random_density(rng, 2))
    ops = complete_product_set(2, 2)
    m = expectation_values(rho, ops)
    cert = negativity_lower_bound(ops, m, (2, 2))
    assert cert.bound == pytest.approx(0.0, abs=1e-6)


def test_dephased_feasible_state_explains_zero_bound():
    # the dephased state reproduces diagonal data and is PPT
    rho = bell(3)
    deph = np.diag(np.diag(rho))
    ops = diagonal_product_set(3, 3)
    assert np.allclose(expectation_values(deph, ops), expectation_values(rho, ops))
    assert np.linalg.eigvalsh(partial_transpose(deph, (3, 3)))[0] >= 0


def test_appending_measurements_never_lowers_bound(rng):
    rho = random_density(rng, 9, 2)
    small = correlated_superposition_set(3, 3)
    big = small + complete_product_set(3, 3)[::3]
    b_small = negativity_lower_bound(small, expectation_values(rho, small), (3, 3)).bound
    b_big = negativity_lower_bound(big, expectation_values(rho, big), (3, 3)).bound
    assert b_big >= b_small - 1e-6


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_exactness_random_states(rng, dims):
    n = dims[0] * dims[1]
    ops = complete_product_set(*dims)
    for rank in (1, 2, n):
        rho = random_density(rng, n, rank)
        m = expectation_values(rho, ops)
        cert = negativity_lower_bound(ops, m, dims)
        assert cert.bound == pytest.approx(logarithmic_negativity(rho, dims), abs=1e-4)
        assert verify_certificate(cert, ops, m).passed


def test_soundness_against_consistent_states(rng):
    for trial in range(6):
        dims = (2, 2) if trial % 2 == 0 else (2, 3)
        n = dims[0] * dims[1]
        rho0 = random_density(rng, n)
        ops = correlated_superposition_set(*dims)
        m = expectation_values(rho0, ops)
        cert = negativity_lower_bound(ops, m, dims)
        assert verify_certificate(cert, ops, m).passed
        for rho in consistent_samples(rho0, ops, rng, 10):
            assert np.allclose(expectation_values(rho, ops), m, atol=1e-9)
            assert cert.bound <= logarithmic_negativity(rho, dims) + 1e-6


def test_inconsistent_data_is_infeasible():
    ops = diagonal_product_set(2, 2)
    m = np.array([0.9, 0.9, 0.9, 0.9])  # sums to 3.6, no state matches
    cert = negativity_lower_bound(ops, m, (2, 2))
    assert cert.solver_status == "infeasible"
    assert verify_certificate(cert, ops, m).passed


def test_truncated_run_is_still_sound(rng):
    rho = random_density(rng, 4)
    ops = complete_product_set(2, 2)
    m = expectation_values(rho, ops)
    cert = negativity_lower_bound(ops, m, (2, 2), SolverConfig(max_iter=3))
    assert cert.solver_status == "max-iterations"
    assert verify_certificate(cert, ops, m).passed
    assert cert.bound <= logarithmic_negativity(rho, (2, 2)) + 1e-9


def test_verify_rejects_corruption():
    ops = complete_product_set(2, 2)
    m = expectation_values(bell(), ops)
    cert = negativity_lower_bound(ops, m, (2, 2))
    cert.nu = cert.nu * 2
    rep = verify_certificate(cert, ops, m)
    assert not rep.passed and rep.min_slack_eigenvalue < -1e-3


def test_vacuous_certificate():
    ops = diagonal_product_set(2, 2)
    m = expectation_values(bell(), ops)
    cert = WitnessCertificate(np.zeros((4, 4)), np.zeros(4), 0.0, 0.0, "feasible", (2, 2))
    rep = verify_certificate(cert, ops, m)
    assert rep.passed and rep.recomputed_bound == 0.0


def test_certificate_json_round_trip():
    ops = correlated_superposition_set(2, 2)
    m = expectation_values(bell(V=0.8), ops)
    cert = negativity_lower_bound(ops, m, (2, 2))
    back, ops2, m2 = WitnessCertificate.from_dict(__import__("json").loads(cert.to_json(ops, m)))
    assert np.array_equal(back.H, cert.H)
    assert np.array_equal(m2, m)
    assert verify_certificate(back, ops2, m2).passed
    assert back.bound == cert.bound


def test_operator_validation():
    with pytest.raises(InvalidParameterError):
        MeasurementOperator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(InvalidParameterError):
        negativity_lower_bound(diagonal_product_set(2, 2), [0.25] * 3, (2, 2))
