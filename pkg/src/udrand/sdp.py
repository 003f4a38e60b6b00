"""Primal and dual objects for the unambiguous and fixed-inconclusive SDPs.

No solver lives here.  Optimality is shown by pairing an explicit primal
witness with an explicit dual certificate and checking that both are
feasible and their objectives agree.

Unambiguous SDP, for a projective measurement {|m_j>}::

    max  sum_j p_j        s.t.  rho - sum_j p_j |m_j><m_j|  >= 0
    min  tr(Z rho)        s.t.  Z >= 0,  Z >= I - sum_{i != j} y_ij |m_j><m_i|

Fixed inconclusive rate Q::

    max  sum_j p_j <m_j|rho_j|m_j>   over decompositions with p_0 = Q
    min  tr(G rho) - w Q             s.t.  G >= w I,  G >= |m_j><m_j|
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analytic, linalg
from .errors import FeasibilityError, UnsupportedInstanceError, ValidationError
from .quantum import (
    BlochQubit,
    Decomposition,
    DensityMatrix,
    Povm,
    PAULI_X,
    PAULI_Z,
    bloch_to_density,
    computational_measurement,
    noisy_matrix,
    noisy_state,
    validate_decomposition,
)

FEAS_TOL = 1e-9
GAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class UdDualCertificate:
    """Dual variables ``(Z, y)`` of the unambiguous SDP.

    ``y`` is a d x d table whose diagonal is ignored.  For the constraint
    operator to be Hermitian, ``y[j, i]`` must equal ``conj(y[i, j])``; real
    symmetric tables are the special case of real measurement vectors.
    """

    Z: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        Z = linalg.hermitize(self.Z, 1e-10)
        y = np.array(self.y, dtype=complex)
        if y.shape != Z.shape:
            raise ValidationError(f"y table has shape {y.shape}, expected {Z.shape}")
        np.fill_diagonal(y, 0.0)
        if linalg.max_abs(y - y.conj().T) > 1e-10 * max(1.0, linalg.max_abs(y)):
            raise ValidationError("y table must satisfy y[j, i] = conj(y[i, j])")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "y", y)

    def constraint_operator(self, basis: np.ndarray) -> np.ndarray:
        """I - sum_{i != j} y_ij |m_j><m_i|."""
        # sum_{i,j} y_ij |m_j><m_i| = B y^T B^dagger
        d = basis.shape[0]
        return np.eye(d) - basis @ self.y.T @ basis.conj().T

    def slack(self, basis: np.ndarray) -> np.ndarray:
        return self.Z - self.constraint_operator(basis)


@dataclass(frozen=True, eq=False)
class FrioDualCertificate:
    """Dual variables ``(G, w)`` of the fixed-inconclusive-rate SDP."""

    G: np.ndarray
    w: float

    def __post_init__(self):
        object.__setattr__(self, "G", linalg.hermitize(self.G, 1e-10))
        object.__setattr__(self, "w", float(self.w))


@dataclass(frozen=True)
class CertifiedValue:
    primal_value: float
    dual_value: float
    gap: float
    certified: bool


@dataclass
class FeasibilityReport:
    feasible: bool
    min_eigenvalues: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.feasible


# ---------------------------------------------------------------- feasibility


def ud_certificate_feasibility(M: Povm, cert: UdDualCertificate, tol: float = FEAS_TOL) -> FeasibilityReport:
    basis = M.require_projective()
    eigs = {
        "Z": linalg.lambda_min(cert.Z),
        "Z - (I - Y)": linalg.lambda_min(cert.slack(basis)),
    }
    return FeasibilityReport(all(v >= -tol for v in eigs.values()), eigs)


def frio_certificate_feasibility(M: Povm, cert: FrioDualCertificate, tol: float = FEAS_TOL) -> FeasibilityReport:
    basis = M.require_projective()
    d = M.dim
    eigs = {"G - wI": linalg.lambda_min(cert.G - cert.w * np.eye(d))}
    for j in range(d):
        eigs[f"G - M_{j}"] = linalg.lambda_min(cert.G - linalg.ketbra(basis[:, j]))
    return FeasibilityReport(all(v >= -tol for v in eigs.values()), eigs)


def _raise_infeasible(what: str, report: FeasibilityReport, tol: float):
    bad = {k: v for k, v in report.min_eigenvalues.items() if v < -tol}
    detail = ", ".join(f"lambda_min({k}) = {v:.3e}" for k, v in bad.items())
    raise FeasibilityError(f"{what} violates its constraints: {detail}")


# ---------------------------------------------------------------- objectives


def ud_primal_value(rho: DensityMatrix, M: Povm, p: Sequence[float], tol: float = FEAS_TOL) -> float:
    """Objective ``sum_j p_j`` after checking ``rho - sum_j p_j |m_j><m_j| >= 0``."""
    basis = M.require_projective()
    p = np.asarray(p, dtype=float)
    if p.shape != (M.dim,):
        raise ValidationError(f"need {M.dim} weights, got shape {p.shape}")
    if p.min() < -tol:
        raise FeasibilityError(f"negative weight {p.min():.3e}")
    slack = rho.mat - (basis * p) @ basis.conj().T
    lam = linalg.lambda_min(slack)
    if lam < -tol:
        raise FeasibilityError(f"rho - sum_j p_j M_j is not PSD: lambda_min = {lam:.3e}")
    return float(p.sum())


def frio_primal_value(
    rho: DensityMatrix, M: Povm, D: Decomposition, Q: float, tol: float = FEAS_TOL
) -> float:
    """Objective ``sum_j p_j <m_j|rho_j|m_j>`` for a decomposition with ``p_0 = Q``."""
    M.require_projective()
    rep = validate_decomposition(rho, D, tol)
    if not rep:
        raise FeasibilityError("decomposition invalid: " + "; ".join(rep.failures))
    if D.n_components != M.dim + 1:
        raise FeasibilityError(f"need {M.dim + 1} components, got {D.n_components}")
    if abs(D.inconclusive - Q) > tol:
        raise FeasibilityError(f"inconclusive weight {D.inconclusive:.12g} differs from Q = {Q:.12g}")
    return D.correct_mass(M)


def ud_dual_value(rho: DensityMatrix, M: Povm, cert: UdDualCertificate, tol: float = FEAS_TOL) -> float:
    rep = ud_certificate_feasibility(M, cert, tol)
    if not rep:
        _raise_infeasible("UD certificate", rep, tol)
    return rho.expect(cert.Z)


def frio_dual_value(
    rho: DensityMatrix, M: Povm, Q: float, cert: FrioDualCertificate, tol: float = FEAS_TOL
) -> float:
    rep = frio_certificate_feasibility(M, cert, tol)
    if not rep:
        _raise_infeasible("FRIO certificate", rep, tol)
    return rho.expect(cert.G) - cert.w * Q


def certify(primal_value: float, dual_value: float, tol: float = GAP_TOL, feasible: bool = True) -> CertifiedValue:
    gap = float(dual_value) - float(primal_value)
    return CertifiedValue(float(primal_value), float(dual_value), gap, bool(feasible and abs(gap) <= tol))


# ---------------------------------------------------------------- instances


@dataclass(frozen=True)
class QubitUd:
    qubit: BlochQubit

    def state(self) -> DensityMatrix:
        return bloch_to_density(self.qubit)

    def measurement(self) -> Povm:
        return computational_measurement(2)


@dataclass(frozen=True)
class QubitFrio:
    qubit: BlochQubit
    Q: float

    def state(self) -> DensityMatrix:
        return bloch_to_density(self.qubit)

    def measurement(self) -> Povm:
        return computational_measurement(2)


@dataclass(frozen=True)
class NoisyFrio:
    d: int
    eps: float
    Q: float

    def state(self) -> DensityMatrix:
        return noisy_state(self.d, self.eps)

    def measurement(self) -> Povm:
        return computational_measurement(self.d)


@dataclass(frozen=True, eq=False)
class UnbiasedUd:
    """Unambiguous guessing on ``rho`` with a basis unbiased to its lowest eigenvector."""

    rho: DensityMatrix
    M: Povm | None = None

    def state(self) -> DensityMatrix:
        return self.rho

    def measurement(self) -> Povm:
        return self.M if self.M is not None else analytic.unbiased_measurement_for(self.rho)


@dataclass(frozen=True)
class QutritDegenerate:
    """Qutrit with ``lambda_1 > lambda_2 = lambda_3`` measured in a fixed real basis.

    The basis admits no real vector in the degenerate eigenspace with
    uniform overlaps, yet ``3 * lambda_min`` is still attained.
    """

    eigenvalues: tuple = (0.5, 0.25, 0.25)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.shape != (3,) or abs(lam.sum() - 1) > 1e-12 or abs(lam[1] - lam[2]) > 1e-12 or lam[0] <= lam[1]:
            raise UnsupportedInstanceError("need eigenvalues l1 > l2 = l3 summing to 1")

    def state(self) -> DensityMatrix:
        return DensityMatrix(np.diag(np.asarray(self.eigenvalues, dtype=complex)))

    def measurement(self) -> Povm:
        s3, s2, s6 = np.sqrt(3), np.sqrt(2), np.sqrt(6)
        m1 = np.array([1 / s3, 1 / s2, 1 / s6])
        m2 = np.array([-1 / s3, 1 / s2, -1 / s6])
        m3 = np.array([1 / s3, 0.0, -np.sqrt(2 / 3)])
        return Povm.from_basis(np.column_stack([m1, m2, m3]))


def _projector_pair_y(basis: np.ndarray, vec: np.ndarray, scale: float) -> np.ndarray:
    # y_ij = scale * <m_j|v><v|m_i>
    a = basis.conj().T @ vec
    return scale * np.outer(a.conj(), a)


def build_analytic_certificates(instance) -> UdDualCertificate | FrioDualCertificate:
    """Explicit optimal dual variables for every solved instance family."""
    if isinstance(instance, QubitUd):
        b = instance.qubit
        m, p, r2 = b.m, b.p, b.r2
        if m + p <= 1.0:
            return UdDualCertificate(np.eye(2) - PAULI_X, np.array([[0, 1], [1, 0]]))
        p1 = (1.0 - r2) / (2.0 * (1.0 - m))
        p0 = 1.0 - p1
        uz, ux = (m - p1) / p0, p / p0
        Z = ((1.0 - p1) / (1.0 - m)) * (np.eye(2) - uz * PAULI_Z - ux * PAULI_X)
        y = p / (1.0 - m)
        return UdDualCertificate(Z, np.array([[0, y], [y, 0]]))

    if isinstance(instance, QubitFrio):
        parts = analytic.qubit_frio_parts(instance.qubit, instance.Q)
        I = np.eye(2)
        if parts["branch"] is analytic.Branch.CONVEX_HULL:
            q, s = parts["q"], parts["s"]
            gx = -(1.0 - s) / q if q > 0 else 0.0
            G = ((1.0 + s) / (2.0 * s)) * (I + gx * PAULI_X)
            w = 0.5 * (1.0 + np.sqrt((1.0 - q) / (1.0 + q)))
            return FrioDualCertificate(G, w)
        (u1, u2), (v1, v2) = parts["u"], parts["v"]
        det = u2 * v1 - u1 * v2
        g = 1.0 + u2 / det
        gz = (1.0 - (g - 1.0) * v1) / g
        gx = -(g - 1.0) * v2 / g
        G = 0.5 * g * (I + gz * PAULI_Z + gx * PAULI_X)
        w = 0.5 * (1.0 + (u2 - v2) / det)
        return FrioDualCertificate(G, w)

    if isinstance(instance, NoisyFrio):
        d, eps = instance.d, instance.eps
        Q = analytic._check_interval("Q", instance.Q, 0.0, 1.0 - eps)
        gamma = min(eps / (1.0 - Q), 1.0)
        rho_g = noisy_matrix(d, gamma)
        tr_sqrt = linalg.trace_sqrt(rho_g)
        G = (tr_sqrt / d) * linalg.psd_pinv_sqrt(rho_g)
        a_gamma = d - gamma * (d - 1)
        return FrioDualCertificate(G, tr_sqrt / np.sqrt(d * a_gamma))

    if isinstance(instance, UnbiasedUd):
        rho, M = instance.state(), instance.measurement()
        d = rho.dim
        if rho.lambda_min <= analytic.RANK_TOL:
            raise UnsupportedInstanceError("state is not full rank")
        u = rho.eig.eigenvectors[:, 0]
        basis = M.require_projective()
        if linalg.max_abs(np.abs(basis.conj().T @ u) ** 2 - 1.0 / d) > 1e-9:
            raise UnsupportedInstanceError("measurement is not unbiased to the lowest eigenvector")
        return UdDualCertificate(d * linalg.ketbra(u), _projector_pair_y(basis, u, -d))

    if isinstance(instance, QutritDegenerate):
        basis = instance.measurement().basis
        u1 = np.array([1.0, 0.0, 0.0], dtype=complex)
        Z = 1.5 * (np.eye(3) - linalg.ketbra(u1))
        return UdDualCertificate(Z, _projector_pair_y(basis, u1, 1.5))

    raise UnsupportedInstanceError(f"no closed-form certificate for {type(instance).__name__}")


def analytic_primal(instance) -> tuple[analytic.GuessingResult | None, float]:
    """Analytic witness and its primal value, checked for feasibility."""
    rho, M = instance.state(), instance.measurement()
    if isinstance(instance, QubitUd):
        res = analytic.qubit_unambiguous(instance.qubit)
        return res, ud_primal_value(rho, M, ud_weights(res.decomposition, M))
    if isinstance(instance, QubitFrio):
        res = analytic.qubit_frio(instance.qubit, instance.Q)
        return res, frio_primal_value(rho, M, res.decomposition, res.inconclusive)
    if isinstance(instance, NoisyFrio):
        res = analytic.noisy_frio(instance.d, instance.eps, instance.Q)
        return res, frio_primal_value(rho, M, res.decomposition, res.inconclusive)
    if isinstance(instance, (UnbiasedUd, QutritDegenerate)):
        res = analytic.max_unambiguous(rho, M)
        return res, ud_primal_value(rho, M, ud_weights(res.decomposition, M))
    raise UnsupportedInstanceError(f"no analytic primal for {type(instance).__name__}")


def certify_instance(instance, tol: float = GAP_TOL) -> CertifiedValue:
    """Close the duality gap for an instance with its analytic witness and certificate."""
    rho, M = instance.state(), instance.measurement()
    _, primal = analytic_primal(instance)
    cert = build_analytic_certificates(instance)
    if isinstance(cert, UdDualCertificate):
        dual = ud_dual_value(rho, M, cert)
    else:
        dual = frio_dual_value(rho, M, instance.Q, cert)
    return certify(primal, dual, tol)


def ud_weights(D: Decomposition, M: Povm, tol: float = 1e-12) -> np.ndarray:
    """Per-outcome UD weights of a witness whose conclusive parts are the projectors.

    Raises
    ------
    FeasibilityError
        If a conclusive component with nonzero weight is not the matching
        measurement projector, i.e. the witness is not unambiguous.
    """
    basis = M.require_projective()
    out = np.zeros(M.dim)
    for j in range(M.dim):
        w = D.weights[j + 1]
        fid = float(np.real(basis[:, j].conj() @ D.states[j + 1].mat @ basis[:, j]))
        if w > tol and abs(fid - 1.0) > 1e-9:
            raise FeasibilityError(f"component {j + 1} is not the projector onto outcome {j}")
        out[j] = w
    return out


# ---------------------------------------------------------------- diagnostics


@dataclass
class SlacknessReport:
    """Operator-norm residuals of the complementary slackness products."""

    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def ok(self, tol: float = 1e-8) -> bool:
        return self.max_residual <= tol


def slackness_report(
    rho: DensityMatrix, M: Povm, D: Decomposition, cert: UdDualCertificate | FrioDualCertificate
) -> SlacknessReport:
    """Residuals of the products that vanish at a primal-dual optimal pair.

    For a FRIO certificate these are ``p_0 rho_0 (G - wI)`` and
    ``p_j rho_j (G - |m_j><m_j|)``.  For a UD certificate they are
    ``Z p_0 rho_0`` and ``(Z - I + Y) p_j rho_j``.
    """
    basis = M.require_projective()
    d = M.dim
    parts = [w * s.mat for w, s in zip(D.weights, D.states)]
    res = {}
    if isinstance(cert, FrioDualCertificate):
        res["inconclusive"] = np.linalg.norm(parts[0] @ (cert.G - cert.w * np.eye(d)), 2)
        for j in range(d):
            res[f"outcome_{j}"] = np.linalg.norm(parts[j + 1] @ (cert.G - linalg.ketbra(basis[:, j])), 2)
    else:
        res["inconclusive"] = np.linalg.norm(cert.Z @ parts[0], 2)
        slack = cert.slack(basis)
        for j in range(d):
            res[f"outcome_{j}"] = np.linalg.norm(slack @ parts[j + 1], 2)
    return SlacknessReport({k: float(v) for k, v in res.items()})


def coarse_grain(D: Decomposition, M: Povm, groups: Sequence[Sequence[int]]) -> tuple[Decomposition, Povm]:
    """Merge measurement outcomes and the matching witness components.

    Parameters
    ----------
    groups : sequence of sequences of int
        Partition of the zero-based outcome labels.

    Returns
    -------
    merged : Decomposition
        Inconclusive component followed by one component per group.
    coarse : Povm
        Measurement with elements summed over each group.
    """
    flat = sorted(j for g in groups for j in g)
    if flat != list(range(M.n_outcomes)):
        raise ValidationError("groups must partition the outcome labels")
    weights = [D.weights[0]]
    states = [D.states[0]]
    for g in groups:
        w = float(sum(D.weights[j + 1] for j in g))
        if w > 0:
            mix = sum(D.weights[j + 1] * D.states[j + 1].mat for j in g) / w
        else:
            mix = D.states[g[0] + 1].mat
        weights.append(w)
        states.append(DensityMatrix(mix))
    coarse = Povm(tuple(sum(M.elements[j] for j in g) for g in groups))
    return Decomposition(np.array(weights), states), coarse
