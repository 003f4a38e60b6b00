import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udrand import linalg
from udrand.errors import DomainError, ValidationError
from udrand.quantum import (
    BlochQubit,
    Decomposition,
    DensityMatrix,
    Povm,
    bloch_to_density,
    born,
    computational_measurement,
    depolarize_povm,
    noisy_state,
    random_basis,
    random_density,
    unbiased_basis,
    validate_decomposition,
)


@pytest.mark.parametrize(
    "m, p, expected",
    [
        (0.0, 0.0, np.eye(2) / 2),
        (0.6, 0.0, np.diag([0.8, 0.2])),
        (0.0, 0.5, np.array([[0.5, 0.25], [0.25, 0.5]])),
    ],
)
def test_bloch_to_density(m, p, expected):
    np.testing.assert_allclose(bloch_to_density(BlochQubit(m, p)).mat, expected, atol=1e-15)


def test_bloch_rejects_pure_and_negative():
    with pytest.raises(ValidationError):
        BlochQubit(0.6, 0.8)
    with pytest.raises(ValidationError):
        BlochQubit(-0.1, 0.2)


def test_density_validation():
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.6, 0.6]))
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.2, -0.2]))


def test_noisy_state_spectra():
    np.testing.assert_allclose(noisy_state(2, 0.5).eig.eigenvalues, [0.25, 0.75], atol=1e-14)
    np.testing.assert_allclose(noisy_state(3, 0.3).eig.eigenvalues, [0.1, 0.1, 0.8], atol=1e-14)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.2, 1.5])
def test_noisy_state_domain(eps):
    with pytest.raises(DomainError):
        noisy_state(3, eps)


def test_depolarize_povm():
    M = computational_measurement(2)
    assert all(np.allclose(a, b) for a, b in zip(depolarize_povm(M, 0.0).elements, M.elements))
    N = depolarize_povm(M, 0.5)
    np.testing.assert_allclose(N.elements[0], np.diag([0.75, 0.25]))
    np.testing.assert_allclose(N.elements[1], np.diag([0.25, 0.75]))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.floats(0.0, 0.999))
def test_depolarized_elements_sum_to_identity(d, eps):
    N = depolarize_povm(unbiased_basis(d), eps)
    np.testing.assert_allclose(sum(N.elements), np.eye(d), atol=1e-12)


def test_povm_validation():
    with pytest.raises(ValidationError):
        Povm((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])))


def test_born_on_noisy_state_is_uniform():
    for d in range(2, 7):
        np.testing.assert_allclose(born(noisy_state(d, 0.37), computational_measurement(d)), np.ones(d) / d, atol=1e-14)


def test_born_on_basis_state():
    M = computational_measurement(3)
    np.testing.assert_allclose(born(DensityMatrix.pure([1, 0, 0]), M), [1, 0, 0], atol=1e-15)


def test_hadamard_basis():
    B = unbiased_basis(2).basis
    for j, s in enumerate((1, -1)):
        v = np.array([1, s]) / np.sqrt(2)
        assert abs(abs(np.vdot(v, B[:, j])) - 1) < 1e-14


def test_fourier_basis_unbiased_to_computational():
    for d in range(2, 8):
        B = unbiased_basis(d).basis
        np.testing.assert_allclose(np.abs(B) ** 2, np.ones((d, d)) / d, atol=1e-14)


def test_validate_decomposition_examples(rng):
    rho = random_density(3, rng)
    assert validate_decomposition(rho, Decomposition(np.array([1.0]), [rho]))
    rep = validate_decomposition(rho, Decomposition(np.array([0.5, 0.6]), [rho, rho]))
    assert not rep and "sum" in rep.failures[0]


def test_lowest_eigenvalue_decomposition_validates(rng):
    for d in (2, 3, 4):
        rho = random_density(d, rng)
        V = random_basis(d, rng)
        lam = rho.lambda_min
        p0 = 1 - d * lam
        states = [DensityMatrix((rho.mat - lam * np.eye(d)) / p0)]
        states += [DensityMatrix.pure(V[:, j]) for j in range(d)]
        D = Decomposition(np.array([p0] + [lam] * d), states)
        assert validate_decomposition(rho, D)


def test_random_basis_is_unitary(rng):
    V = random_basis(5, rng)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(5), atol=1e-12)
    assert linalg.is_psd(random_density(4, rng).mat)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_born_is_distribution(d, seed):
    g = np.random.default_rng(seed)
    probs = born(random_density(d, g), Povm.from_basis(random_basis(d, g)))
    assert probs.min() >= -1e-12
    assert abs(probs.sum() - 1) <= 1e-10
