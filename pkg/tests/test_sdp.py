import numpy as np
import pytest

from udrand import analytic, linalg, sdp
from udrand.errors import FeasibilityError, UnsupportedInstanceError, ValidationError
from udrand.quantum import (
    PAULI_X,
    BlochQubit,
    DensityMatrix,
    Povm,
    bloch_state,
    computational_measurement,
    noisy_state,
    random_basis,
    random_density,
)


def test_ud_primal_examples(rng):
    rho = random_density(3, rng)
    M = Povm.from_basis(random_basis(3, rng))
    assert sdp.ud_primal_value(rho, M, np.zeros(3)) == 0.0
    lam = rho.lambda_min
    assert sdp.ud_primal_value(rho, M, [lam] * 3) == pytest.approx(3 * lam, abs=1e-14)


def test_ud_primal_infeasible_names_slack():
    rho = DensityMatrix.maximally_mixed(2)
    with pytest.raises(FeasibilityError, match="lambda_min"):
        sdp.ud_primal_value(rho, computational_measurement(2), [0.51, 0.51])


def test_trivial_ud_dual():
    rho = bloch_state(0.3, 0.4)
    cert = sdp.UdDualCertificate(np.eye(2), np.zeros((2, 2)))
    assert sdp.ud_dual_value(rho, computational_measurement(2), cert) == pytest.approx(1.0)


def test_unbiased_ud_dual(rng):
    for d in (2, 3, 4):
        rho = random_density(d, rng)
        M = analytic.unbiased_measurement_for(rho)
        u = rho.eig.eigenvectors[:, 0]
        B = M.basis
        a = B.conj().T @ u
        # y_ij = -d <m_j|u><u|m_i>
        y = -d * np.outer(a.conj(), a)
        cert = sdp.UdDualCertificate(d * linalg.ketbra(u), y)
        assert sdp.ud_dual_value(rho, M, cert) == pytest.approx(d * rho.lambda_min, abs=1e-12)


def test_qubit_plane_dual():
    p = 0.3
    rho = bloch_state(0.2, p)
    cert = sdp.UdDualCertificate(np.eye(2) - PAULI_X, np.array([[0, 1], [1, 0]]))
    assert sdp.ud_dual_value(rho, computational_measurement(2), cert) == pytest.approx(1 - p, abs=1e-14)


def test_y_table_must_pair():
    with pytest.raises(ValidationError):
        sdp.UdDualCertificate(np.eye(2), np.array([[0, 1j], [1j, 0]]))


def test_infeasible_dual_rejected():
    cert = sdp.UdDualCertificate(0.5 * np.eye(2), np.zeros((2, 2)))
    with pytest.raises(FeasibilityError, match="Z - \\(I - Y\\)"):
        sdp.ud_dual_value(bloch_state(0, 0), computational_measurement(2), cert)


def test_trivial_frio_dual():
    rho = bloch_state(0.1, 0.2)
    cert = sdp.FrioDualCertificate((1 + 1e-6) * np.eye(2), 0.0)
    assert sdp.frio_dual_value(rho, computational_measurement(2), 0.3, cert) == pytest.approx(1 + 1e-6)


def test_noisy_frio_certificate_value():
    inst = sdp.NoisyFrio(4, 0.2, 0.3)
    cert = sdp.build_analytic_certificates(inst)
    value = sdp.frio_dual_value(inst.state(), inst.measurement(), inst.Q, cert)
    assert value == pytest.approx(analytic.noisy_frio(4, 0.2, 0.3).value, abs=1e-12)


def test_qubit_frio_branch_one_weight():
    b, Q = BlochQubit(0.0, 0.5), 0.25
    cert = sdp.build_analytic_certificates(sdp.QubitFrio(b, Q))
    q = (b.p - Q) / (1 - Q)
    assert cert.w == pytest.approx(0.5 * (1 + np.sqrt((1 - q) / (1 + q))), abs=1e-12)
    assert sdp.certify_instance(sdp.QubitFrio(b, Q)).dual_value == pytest.approx(0.728553, abs=1e-6)


def test_qubit_ud_dual_value():
    assert sdp.certify_instance(sdp.QubitUd(BlochQubit(0.8, 0.4))).dual_value == pytest.approx(0.5, abs=1e-12)


def test_certify_examples():
    assert sdp.certify(0.5, 0.5).certified
    assert sdp.certify(0.5, 0.5).gap == 0.0
    assert not sdp.certify(0.5, 0.5 + 1e-6, 1e-9).certified


def test_unsupported_instance():
    with pytest.raises(UnsupportedInstanceError):
        sdp.build_analytic_certificates(object())


def test_lowest_eigenvalue_certificate_needs_unbiased_basis(rng):
    rho = bloch_state(0.4, 0.2)
    with pytest.raises(UnsupportedInstanceError):
        sdp.build_analytic_certificates(sdp.UnbiasedUd(rho, computational_measurement(2)))


def test_qutrit_certified():
    cv = sdp.certify_instance(sdp.QutritDegenerate())
    assert cv.certified and cv.primal_value == pytest.approx(0.75)


def test_slackness_qubit(rng):
    worst = 0.0
    for _ in range(200):
        r, t = np.sqrt(rng.uniform(0, 0.99)), rng.uniform(0, np.pi / 2)
        b = BlochQubit(r * np.cos(t), r * np.sin(t))
        Q = rng.uniform(0, analytic.qubit_thresholds(b).q_max)
        for inst, res in (
            (sdp.QubitUd(b), analytic.qubit_unambiguous(b)),
            (sdp.QubitFrio(b, Q), analytic.qubit_frio(b, Q)),
        ):
            cert = sdp.build_analytic_certificates(inst)
            rep = sdp.slackness_report(inst.state(), inst.measurement(), res.decomposition, cert)
            worst = max(worst, rep.max_residual)
    assert worst < 1e-8


def test_slackness_noisy():
    inst = sdp.NoisyFrio(3, 0.4, 0.2)
    res = analytic.noisy_frio(3, 0.4, 0.2)
    rep = sdp.slackness_report(inst.state(), inst.measurement(), res.decomposition, sdp.build_analytic_certificates(inst))
    assert rep.ok()


def test_coarse_graining_keeps_value(rng):
    rho = noisy_state(4, 0.3)
    res = analytic.max_unambiguous(rho, computational_measurement(4))
    merged, coarse = sdp.coarse_grain(res.decomposition, res.measurement, [[0, 1], [2, 3]])
    assert merged.correct_mass(coarse) == pytest.approx(res.value, abs=1e-12)
    assert merged.error_mass(coarse) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValidationError):
        sdp.coarse_grain(res.decomposition, res.measurement, [[0, 1], [2]])
