import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from angqudit.entanglement import (
    concurrence_two_qubit,
    hermitian_eigenvalues,
    logarithmic_negativity,
    partial_transpose,
    trace_norm,
)
from angqudit.errors import InvalidParameterError
from angqudit.states import DensityMatrix, PathwayStateParams, embed_symmetric, pure_qudit_state

from conftest import random_density


def cubic_eigenvalues(a):
    """Eigenvalues of a 3x3 Hermitian matrix from the trigonometric root formula."""
    q = np.trace(a).real / 3
    b = a - q * np.eye(3)
    p = np.sqrt(np.trace(b @ b).real / 6)
    if p < 1e-300:
        return np.array([q, q, q])
    r = np.clip(np.linalg.det(b / p).real / 2, -1, 1)
    phi = np.arccos(r) / 3
    e1 = q + 2 * p * np.cos(phi)
    e3 = q + 2 * p * np.cos(phi + 2 * np.pi / 3)
    return np.array([e1, 3 * q - e1 - e3, e3])


def quadratic_eigenvalues(a):
    m = (a[0, 0] + a[1, 1]).real / 2
    d = np.sqrt(((a[0, 0] - a[1, 1]).real / 2) ** 2 + abs(a[0, 1]) ** 2)
    return np.array([m + d, m - d])


def maximally_entangled(N):
    return embed_symmetric(pure_qudit_state(PathwayStateParams(N, 1.0)))


@given(st.integers(0, 2**32 - 1))
def test_eigenvalues_match_closed_forms(seed):
    rng = np.random.default_rng(seed)
    for n, oracle in ((2, quadratic_eigenvalues), (3, cubic_eigenvalues)):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = g + g.conj().T
        w = hermitian_eigenvalues(a, method="jacobi")
        assert np.allclose(w, oracle(a), atol=1e-12)


@pytest.mark.parametrize("n", [1, 4, 17, 40])
def test_jacobi_residual_and_orthogonality(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = g + g.conj().T
    w, v = hermitian_eigenvalues(a, vectors=True, method="jacobi")
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(a @ v - v * w) < 1e-12 * n * np.linalg.norm(a)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert np.allclose(w, hermitian_eigenvalues(a, method="lapack"), atol=1e-12)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(InvalidParameterError):
        hermitian_eigenvalues(np.array([[1, 2], [0, 1]]))
    with pytest.raises(InvalidParameterError):
        hermitian_eigenvalues(np.eye(2), method="qr")


def test_partial_transpose_index_map():
    a = np.arange(16).reshape(4, 4).astype(complex)
    expected = np.array([[0, 1, 8, 9], [4, 5, 12, 13], [2, 3, 10, 11], [6, 7, 14, 15]])
    assert np.array_equal(partial_transpose(a, (2, 2)), expected)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_partial_transpose_properties(ds, di, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, ds * di)
    pt = partial_transpose(rho, (ds, di))
    assert np.allclose(partial_transpose(pt, (ds, di)), rho)
    assert np.allclose(pt, pt.conj().T)
    assert abs(np.trace(pt) - 1) < 1e-12
    # explicit entry map ((j,a),(k,b)) -> ((k,a),(j,b))
    j, a, k, b = rng.integers(ds), rng.integers(di), rng.integers(ds), rng.integers(di)
    assert pt[k * di + a, j * di + b] == rho[j * di + a, k * di + b]


def test_partial_transpose_needs_bipartition():
    with pytest.raises(InvalidParameterError):
        partial_transpose(np.eye(4) / 4)
    with pytest.raises(InvalidParameterError):
        partial_transpose(np.eye(6) / 6, (2, 2))


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_negativity_maximally_entangled(N):
    assert logarithmic_negativity(maximally_entangled(N)) == pytest.approx(np.log2(N), abs=1e-9)
    # the reduced representation is lifted automatically
    red = pure_qudit_state(PathwayStateParams(N, 1.0))
    assert logarithmic_negativity(red) == pytest.approx(np.log2(N), abs=1e-9)


@pytest.mark.parametrize("N", [2, 4, 5])
def test_negativity_closed_form_for_partial_coherence(N):
    # sum of |eigenvalues| of the PT of the symmetric state is 1 + (N - 1) V
    for V in (0.0, 0.25, 0.875):
        rho = pure_qudit_state(PathwayStateParams(N, V, 0.3))
        assert logarithmic_negativity(rho) == pytest.approx(np.log2(1 + (N - 1) * V), abs=1e-10)


def test_separable_mixtures_have_zero_negativity(rng):
    for _ in range(30):
        ds, di = rng.integers(2, 4, size=2)
        rho = np.zeros((ds * di, ds * di), dtype=complex)
        weights = rng.dirichlet(np.ones(4))
        for w in weights:
            rho += w * np.kron(random_density(rng, ds, 1), random_density(rng, di, 1))
        assert logarithmic_negativity(rho, (ds, di)) == pytest.approx(0, abs=1e-9)


def test_trace_norm():
    assert trace_norm(np.diag([1.0, -2.0, 0.5])) == pytest.approx(3.5)


def wootters_oracle(rho):
    """Concurrence from the Hermitian matrix R = sqrt(sqrt(rho) rho~ sqrt(rho))."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    r = sq @ yy @ rho.conj() @ yy @ sq
    lam = np.sort(np.sqrt(np.clip(np.linalg.eigvalsh((r + r.conj().T) / 2), 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def test_concurrence_against_oracle(rng):
    for _ in range(100):
        rho = random_density(rng, 4)
        assert concurrence_two_qubit(rho) == pytest.approx(wootters_oracle(rho), abs=1e-9)
    # near rank deficiency the concurrence is only Hoelder-1/2 in rho, so the
    # oracle's own square roots of rounding noise limit the comparison
    for _ in range(100):
        rho = random_density(rng, 4, rng.integers(1, 4))
        assert concurrence_two_qubit(rho) == pytest.approx(wootters_oracle(rho), abs=1e-7)


def test_concurrence_pure_state_formula(rng):
    # for a pure state |psi>, C = |psi^T (sigma_y x sigma_y) psi|
    sy = np.array([[0, -1j], [1j, 0]])
    for _ in range(100):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        expected = abs(psi @ np.kron(sy, sy) @ psi)
        assert concurrence_two_qubit(np.outer(psi, psi.conj())) == pytest.approx(expected, abs=1e-12)


def test_concurrence_bell_and_product():
    assert concurrence_two_qubit(maximally_entangled(2)) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_two_qubit(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)
    red = pure_qudit_state(PathwayStateParams(2, 0.875))
    assert concurrence_two_qubit(red) == pytest.approx(0.875, abs=1e-9)


def test_concurrence_shape_checks():
    with pytest.raises(InvalidParameterError):
        concurrence_two_qubit(np.eye(3) / 3)
    with pytest.raises(InvalidParameterError):
        concurrence_two_qubit(pure_qudit_state(PathwayStateParams(3, 1.0)))
    with pytest.raises(InvalidParameterError):
        concurrence_two_qubit(DensityMatrix(np.eye(4) / 4, bipartition=(1, 4)))
