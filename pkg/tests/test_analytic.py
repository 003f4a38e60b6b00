import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from udrand import analytic as A
from udrand.errors import DomainError
from udrand.quantum import (
    BlochQubit,
    DensityMatrix,
    Povm,
    bloch_state,
    computational_measurement,
    noisy_state,
    noisy_trace_sqrt,
    random_density,
    unbiased_basis,
    validate_decomposition,
)
from udrand.sdp import QutritDegenerate

qubits = st.tuples(st.floats(0, 0.99), st.floats(0, 0.99)).filter(lambda t: t[0] ** 2 + t[1] ** 2 < 0.998)


def test_max_unambiguous_examples():
    assert A.max_unambiguous(DensityMatrix.maximally_mixed(4)).value == pytest.approx(1.0, abs=1e-14)
    assert A.max_unambiguous(noisy_state(3, 0.3)).value == pytest.approx(0.3, abs=1e-14)
    assert A.max_unambiguous(bloch_state(0.0, 0.6)).value == pytest.approx(0.4, abs=1e-14)


def test_max_unambiguous_rank_deficient_is_zero():
    res = A.max_unambiguous(DensityMatrix(np.diag([0.5, 0.5, 0.0])))
    assert res.value == 0.0 and res.inconclusive == 1.0


def test_max_unambiguous_witness_reproduces_state(rng):
    for d in (2, 3, 5):
        res = A.max_unambiguous(random_density(d, rng))
        assert validate_decomposition(res.state, res.decomposition)
        assert res.decomposition.error_mass(res.measurement) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "m, p, value, branch",
    [(0.9, 0.05, 0.95, "ConvexHull"), (0.8, 0.4, 0.5, "EdgeCase"), (0.0, 0.3, 0.7, "ConvexHull")],
)
def test_qubit_unambiguous_examples(m, p, value, branch):
    res = A.qubit_unambiguous(BlochQubit(m, p))
    assert res.value == pytest.approx(value, abs=1e-14)
    assert str(res.branch) == branch


def test_qubit_unambiguous_edge_witness():
    res = A.qubit_unambiguous(BlochQubit(0.8, 0.4))
    np.testing.assert_allclose(res.decomposition.weights, [0.5, 0.5, 0.0], atol=1e-14)
    np.testing.assert_allclose(res.decomposition.states[0].mat, bloch_state(0.6, 0.8).mat, atol=1e-14)


def test_qubit_unambiguous_unbiased_limit():
    for p in (0.1, 0.5, 0.9):
        b = BlochQubit(0.0, p)
        assert A.qubit_unambiguous(b).value == pytest.approx(A.max_unambiguous(bloch_state(0, p)).value, abs=1e-14)


def test_qubit_thresholds():
    th = A.qubit_thresholds(BlochQubit(0.0, 0.5))
    assert (th.q_max, th.q_crit, th.t_crit) == pytest.approx((0.5, 0.75, 0.125))
    assert th.t_max == pytest.approx(0.5 * (1 - np.sqrt(0.75)))


def test_qubit_frio_examples():
    assert A.qubit_frio(BlochQubit(0.0, 0.5), 0.25).value == pytest.approx((0.75 + np.sqrt(0.5)) / 2, abs=1e-12)
    res = A.qubit_frio(BlochQubit(0.8, 0.4), 0.3)
    assert res.value == pytest.approx(0.6947213595, abs=1e-9)
    assert res.branch is A.Branch.EDGE_CASE


def test_qubit_frio_domain():
    with pytest.raises(DomainError, match=r"\[0, 0.5\]"):
        A.qubit_frio(BlochQubit(0.0, 0.5), 0.6)


@settings(max_examples=200, deadline=None)
@given(qubits)
def test_qubit_frio_endpoints(mp):
    b = BlochQubit(*mp)
    th = A.qubit_thresholds(b)
    assert A.qubit_frio(b, th.q_max).value == pytest.approx(A.qubit_unambiguous(b).value, abs=1e-9)
    assert A.qubit_frio(b, 0.0).value == pytest.approx(0.5 * (1 + np.sqrt(1 - b.p**2)), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(qubits, st.floats(0, 1), st.floats(0, 1))
def test_qubit_frio_witness_and_monotone(mp, f1, f2):
    b = BlochQubit(*mp)
    th = A.qubit_thresholds(b)
    lo, hi = sorted((f1 * th.q_max, f2 * th.q_max))
    assume(hi - lo > 1e-6)
    r_lo, r_hi = A.qubit_frio(b, lo), A.qubit_frio(b, hi)
    assert r_lo.value > r_hi.value
    for r in (r_lo, r_hi):
        assert validate_decomposition(r.state, r.decomposition)
        assert r.decomposition.correct_mass(r.measurement) == pytest.approx(r.value, abs=1e-9)


def test_qubit_fixed_error_first_branch():
    # (sqrt(0.4) + sqrt(0.04))^2
    res = A.qubit_fixed_error(BlochQubit(0.0, 0.6), 0.04)
    assert res.value == pytest.approx((np.sqrt(0.4) + 0.2) ** 2, abs=1e-12)
    assert res.value == pytest.approx(0.692982, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(qubits, st.floats(0, 1))
def test_qubit_fixed_error_consistent(mp, f):
    b = BlochQubit(*mp)
    th = A.qubit_thresholds(b)
    T = f * th.t_max
    res = A.qubit_fixed_error(b, T)
    D, M = res.decomposition, res.measurement
    assert D.error_mass(M) == pytest.approx(T, abs=1e-9)
    assert D.correct_mass(M) == pytest.approx(res.value, abs=1e-9)
    assert res.value + T + res.inconclusive == pytest.approx(1.0, abs=1e-9)


def test_qubit_fixed_error_endpoints():
    b = BlochQubit(0.8, 0.4)
    assert A.qubit_fixed_error(b, 0.0).value == pytest.approx(A.qubit_unambiguous(b).value, abs=1e-12)
    th = A.qubit_thresholds(b)
    assert A.qubit_fixed_error(b, th.t_max).value == pytest.approx(A.qubit_frio(b, 0.0).value, abs=1e-9)


def test_noisy_examples():
    assert A.noisy_frio(2, 0.5, 0.25).value == pytest.approx(0.728553, abs=1e-6)
    assert A.noisy_fixed_error(2, 0.25, 0.05).value == pytest.approx((np.sqrt(0.05) + 0.5) ** 2, abs=1e-12)
    assert A.noisy_t_max(2, 0.5) == pytest.approx(0.066987, abs=1e-6)
    assert A.noisy_fixed_error(2, 0.5, A.noisy_t_max(2, 0.5)).value == pytest.approx(0.933013, abs=1e-6)


@pytest.mark.parametrize("d", range(2, 9))
def test_noisy_frio_endpoints(d):
    for eps in (0.1, 0.45, 0.8):
        assert A.noisy_frio(d, eps, 0.0).value == pytest.approx(noisy_trace_sqrt(d, eps) ** 2 / d, abs=1e-12)
        assert A.noisy_frio(d, eps, 1 - eps).value == pytest.approx(eps, abs=1e-12)


def test_noisy_frio_witness(rng):
    for d in (2, 3, 6):
        for _ in range(5):
            eps = rng.uniform(0.05, 0.95)
            res = A.noisy_frio(d, eps, rng.uniform(0, 1 - eps))
            assert validate_decomposition(res.state, res.decomposition)
            assert res.decomposition.correct_mass(res.measurement) == pytest.approx(res.value, abs=1e-10)


def test_noisy_fixed_error_witness(rng):
    for d in (2, 4):
        eps = 0.3
        T = 0.7 * A.noisy_t_max(d, eps)
        res = A.noisy_fixed_error(d, eps, T)
        assert res.decomposition.error_mass(res.measurement) == pytest.approx(T, abs=1e-10)


def test_sufficient_condition_noisy_state():
    rho = noisy_state(4, 0.3)
    assert A.sufficient_condition_holds(rho, computational_measurement(4))
    # the uniform superposition is itself a Fourier vector, so no lowest
    # eigenvector can be unbiased to that basis
    assert not A.sufficient_condition_holds(rho, unbiased_basis(4))


def test_sufficient_condition_qubit_z():
    assert not A.sufficient_condition_holds(bloch_state(0.3, 0.2), computational_measurement(2))
    assert A.sufficient_condition_holds(bloch_state(0.0, 0.2), computational_measurement(2))


def test_degenerate_qutrit_real_versus_complex():
    inst = QutritDegenerate()
    rho, M = inst.state(), inst.measurement()
    real = A.sufficient_condition_holds(rho, M, real=True)
    assert not real.holds and real.deviation > 0.1
    # complex amplitudes in the degenerate eigenspace do reach uniform overlaps
    cplx = A.sufficient_condition_holds(rho, M)
    assert cplx.holds and cplx.eigenspace_dim == 2
    np.testing.assert_allclose(np.abs(M.basis.conj().T @ cplx.witness) ** 2, np.ones(3) / 3, atol=1e-9)
    assert A.max_unambiguous(rho, M).value == pytest.approx(0.75, abs=1e-14)


def test_unbiased_measurement_for_random_state(rng):
    rho = random_density(3, rng)
    M = A.unbiased_measurement_for(rho)
    assert A.sufficient_condition_holds(rho, M)
    assert isinstance(M, Povm)
