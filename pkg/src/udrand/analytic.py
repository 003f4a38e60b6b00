"""Closed-form guessing probabilities with their optimal decompositions.

Every result carries a witness decomposition of the target state, with
component 0 inconclusive and component ``j`` guessing outcome ``j - 1``.
Qubits follow the convention of :class:`~udrand.quantum.BlochQubit`; the
measurement is always the computational (Pauli-Z) basis for qubits and
for the noisy family.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import linalg
from .errors import DomainError
from .quantum import (
    BlochQubit,
    Decomposition,
    DensityMatrix,
    Povm,
    bloch_state,
    bloch_to_density,
    computational_measurement,
    noisy_matrix,
    noisy_state,
    noisy_trace_sqrt,
    unbiased_basis,
    uniform_superposition,
)

RANK_TOL = 1e-12
# slack absorbed when a parameter sits on a closed endpoint up to round-off
ENDPOINT_SLACK = 1e-12


class Branch(str, enum.Enum):
    """Which piece of a piecewise closed form produced a result."""

    CONVEX_HULL = "ConvexHull"
    EDGE_CASE = "EdgeCase"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class GuessingResult:
    value: float
    decomposition: Decomposition
    branch: Branch
    state: DensityMatrix
    measurement: Povm
    inconclusive: float = 0.0

    @property
    def error(self) -> float:
        return 1.0 - self.inconclusive - self.value


@dataclass(frozen=True)
class FrioThresholds:
    q_max: float
    q_crit: float
    t_max: float
    t_crit: float


def _check_interval(name: str, x: float, lo: float, hi: float) -> float:
    x = float(x)
    if not (lo - ENDPOINT_SLACK <= x <= hi + ENDPOINT_SLACK):
        raise DomainError(f"{name}={x!r} outside the valid interval [{lo:.12g}, {hi:.12g}]")
    return min(max(x, lo), hi)


def _plane_state(z: float, x: float) -> DensityMatrix:
    # pure-state witnesses can overshoot the unit circle by round-off
    n = np.hypot(z, x)
    if n > 1.0:
        z, x = z / n, x / n
    return bloch_state(z, x)


# ---------------------------------------------------------------- any dimension


def unbiased_measurement_for(rho: DensityMatrix) -> Povm:
    """Fourier basis expressed in the eigenbasis of ``rho``.

    Each vector has squared overlap 1/d with every eigenvector of ``rho``,
    in particular with the one of smallest eigenvalue.
    """
    v = rho.eig.eigenvectors
    return Povm.from_basis(v @ unbiased_basis(rho.dim).basis)


def max_unambiguous(rho: DensityMatrix, M: Povm | None = None) -> GuessingResult:
    """Largest unambiguous guessing probability over projective measurements.

    The optimum is ``d * lambda_min``, reached by any basis unbiased to the
    smallest-eigenvalue eigenvector.  The witness puts weight ``lambda_min``
    on each measurement projector and the remainder in the inconclusive
    component.

    Parameters
    ----------
    rho : DensityMatrix
    M : Povm, optional
        Measurement to report with the witness.  Defaults to
        :func:`unbiased_measurement_for`.  It is the caller's job to pass a
        basis that meets the unbiasedness condition; the witness is valid
        for any basis but is optimal only for those.
    """
    d = rho.dim
    lam = rho.lambda_min
    if M is None:
        M = unbiased_measurement_for(rho)
    basis = M.require_projective()
    if lam <= RANK_TOL:
        weights = np.zeros(d + 1)
        weights[0] = 1.0
        states = [rho] * (d + 1)
        return GuessingResult(0.0, Decomposition(weights, states), Branch.CONVEX_HULL, rho, M, 1.0)
    p0 = 1.0 - d * lam
    rest = rho.mat - lam * np.eye(d)
    rho0 = DensityMatrix(rest / p0) if p0 > RANK_TOL else rho
    states = [rho0] + [DensityMatrix.pure(basis[:, j]) for j in range(d)]
    weights = np.array([max(p0, 0.0)] + [lam] * d)
    return GuessingResult(d * lam, Decomposition(weights, states), Branch.CONVEX_HULL, rho, M, max(p0, 0.0))


@dataclass(frozen=True)
class SufficientConditionReport:
    """Best unbiasedness witness found in the lowest eigenspace."""

    holds: bool
    deviation: float
    witness: np.ndarray
    eigenspace_dim: int

    def __bool__(self) -> bool:
        return self.holds


def _overlap_residuals(coeffs: np.ndarray, space: np.ndarray, basis: np.ndarray) -> np.ndarray:
    u = space @ coeffs
    u = u / np.linalg.norm(u)
    return np.abs(basis.conj().T @ u) ** 2 - 1.0 / basis.shape[0]


def sufficient_condition_holds(
    rho: DensityMatrix,
    M: Povm,
    tol: float = 1e-9,
    real: bool = False,
    degeneracy_tol: float = 1e-9,
    restarts: int = 64,
    seed: int = 0,
) -> SufficientConditionReport:
    """Search the smallest eigenspace of ``rho`` for a vector unbiased to ``M``.

    A vector ``u`` qualifies when ``|<u|m_j>|^2 = 1/d`` for every outcome.
    For a non-degenerate smallest eigenvalue the eigenvector is tested
    directly.  A two-dimensional eigenspace is swept on a 0.01 grid of
    (polar, phase) angles; larger ones start from random points.  Candidates
    are refined by least squares on the overlap residuals.

    Parameters
    ----------
    real : bool
        Restrict the search to real combinations of the eigenvectors (as
        given by the eigenbasis of ``rho``).
    """
    basis = M.require_projective()
    e = rho.eig
    space = e.eigenspace(e.lambda_min, degeneracy_tol)
    k = space.shape[1]

    def fun(x):
        c = x if real else x[:k] + 1j * x[k:]
        return _overlap_residuals(c, space, basis)

    if k == 1:
        res = _overlap_residuals(np.ones(1), space, basis)
        dev = float(np.max(np.abs(res)))
        return SufficientConditionReport(dev < tol, dev, space[:, 0], 1)

    starts = []
    if k == 2:
        theta = np.arange(0.0, np.pi / 2 + 1e-12, 0.01) if not real else np.arange(0.0, np.pi, 0.01)
        phase = np.arange(0.0, 2 * np.pi, 0.01) if not real else np.zeros(1)
        tt, ff = np.meshgrid(theta, phase, indexing="ij")
        c0 = np.cos(tt).ravel()
        c1 = (np.sin(tt) * np.exp(1j * ff)).ravel()
        vecs = np.outer(space[:, 0], c0) + np.outer(space[:, 1], c1)
        dev = np.max(np.abs(np.abs(basis.conj().T @ vecs) ** 2 - 1.0 / basis.shape[0]), axis=0)
        for idx in np.argsort(dev)[:8]:
            c = np.array([c0[idx], c1[idx]])
            starts.append(c.real if real else np.concatenate([c.real, c.imag]))
    rng = np.random.default_rng(seed)
    n_par = k if real else 2 * k
    for _ in range(restarts if k > 2 else 4):
        starts.append(rng.normal(size=n_par))

    best_dev, best_x = np.inf, starts[0]
    for x0 in starts:
        sol = optimize.least_squares(fun, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        dev = float(np.max(np.abs(fun(sol.x))))
        if dev < best_dev:
            best_dev, best_x = dev, sol.x
        if best_dev < tol * 1e-3:
            break
    c = best_x if real else best_x[:k] + 1j * best_x[k:]
    u = space @ c
    return SufficientConditionReport(best_dev < tol, best_dev, u / np.linalg.norm(u), k)


# ---------------------------------------------------------------- qubits


def qubit_thresholds(b: BlochQubit) -> FrioThresholds:
    m, p, r2 = b.m, b.p, b.r2
    q_crit = (1.0 - r2) / (2.0 * (1.0 - p))
    if m + p <= 1.0:
        q_max = p
    else:
        q_max = (p * p + (1.0 - m) ** 2) / (2.0 * (1.0 - m))
    t_max = 0.5 * (1.0 - np.sqrt(1.0 - p * p))
    t_crit = 0.5 * (1.0 - m - q_crit)
    return FrioThresholds(q_max, q_crit, t_max, t_crit)


def qubit_unambiguous(b: BlochQubit) -> GuessingResult:
    """Optimal unambiguous guessing probability for a qubit measured along Z.

    Returns ``1 - p`` when ``m + p <= 1`` (inconclusive part along the
    normal axis, conclusive parts on the two measurement eigenstates) and
    ``(1 - r^2) / (2 (1 - m))`` otherwise, where the less likely outcome is
    never guessed.
    """
    m, p, r2 = b.m, b.p, b.r2
    rho = bloch_to_density(b)
    M = computational_measurement(2)
    up, down = _plane_state(1.0, 0.0), _plane_state(-1.0, 0.0)
    if m + p <= 1.0:
        weights = np.array([p, 0.5 * (1 - p + m), 0.5 * (1 - p - m)])
        states = [_plane_state(0.0, 1.0), up, down]
        value, branch = 1.0 - p, Branch.CONVEX_HULL
    else:
        p1 = (1.0 - r2) / (2.0 * (1.0 - m))
        p0 = 1.0 - p1
        states = [_plane_state((m - p1) / p0, p / p0), up, down]
        weights = np.array([p0, p1, 0.0])
        value, branch = p1, Branch.EDGE_CASE
    D = Decomposition(weights, states)
    return GuessingResult(float(value), D, branch, rho, M, float(weights[0]))


def qubit_frio_parts(b: BlochQubit, Q: float) -> dict:
    """Intermediate quantities of the fixed-inconclusive-rate solution.

    Shared by :func:`qubit_frio` and the dual certificate builder.
    """
    th = qubit_thresholds(b)
    Q = _check_interval("Q", Q, 0.0, th.q_max)
    m, p, r2 = b.m, b.p, b.r2
    if Q <= th.q_crit:
        q = (p - Q) / (1.0 - Q)
        s = np.sqrt(max(1.0 - q * q, 0.0))
        value = 0.5 * (1.0 - Q + np.sqrt(max((1 - Q) ** 2 - (p - Q) ** 2, 0.0)))
        return dict(branch=Branch.CONVEX_HULL, Q=Q, q=q, s=s, value=value)
    r = np.sqrt(r2)
    A = 1.0 - th.q_crit * (1.0 - p) / Q
    root = np.sqrt(max(r2 - A * A, 0.0))
    u = np.array([A * m - p * root, A * p + m * root]) / r2
    v = (np.array([m, p]) - Q * u) / (1.0 - Q)
    value = 0.5 * (1.0 - Q + m - (Q / r2) * (A * m - p * root))
    return dict(branch=Branch.EDGE_CASE, Q=Q, A=A, u=u, v=v, r=r, value=value)


def qubit_frio(b: BlochQubit, Q: float) -> GuessingResult:
    """Optimal guessing probability with inconclusive rate fixed to ``Q``.

    Valid for ``0 <= Q <= Q_max``.  Below ``Q_crit`` the inconclusive part
    is the pure state along the normal axis and both guesses are used; above
    it only the likelier outcome is guessed.
    """
    parts = qubit_frio_parts(b, Q)
    Q = parts["Q"]
    m = b.m
    if parts["branch"] is Branch.CONVEX_HULL:
        q, s = parts["q"], parts["s"]
        weights = np.array([Q, 0.5 * (1 - Q + m / s), 0.5 * (1 - Q - m / s)])
        weights[2] = max(weights[2], 0.0)
        states = [_plane_state(0.0, 1.0), _plane_state(s, q), _plane_state(-s, q)]
    else:
        u, v = parts["u"], parts["v"]
        weights = np.array([Q, 1.0 - Q, 0.0])
        states = [_plane_state(*u), _plane_state(*v), _plane_state(-1.0, 0.0)]
    D = Decomposition(weights, states)
    return GuessingResult(
        float(parts["value"]), D, parts["branch"], bloch_to_density(b), computational_measurement(2), Q
    )


def qubit_fixed_error(b: BlochQubit, T: float) -> GuessingResult:
    """Optimal guessing probability with error rate fixed to ``T``.

    The error rate is converted to the matching inconclusive rate, whose
    solution supplies the witness.  When ``m + p <= 1`` the first formula
    applies for every admissible ``T``; otherwise it applies for
    ``T >= T_crit``.
    """
    th = qubit_thresholds(b)
    T = _check_interval("T", T, 0.0, th.t_max)
    m, p, r2 = b.m, b.p, b.r2
    if m + p <= 1.0 or T >= th.t_crit:
        value = (np.sqrt(1.0 - p) + np.sqrt(T)) ** 2
        Q = p - 2.0 * T - 2.0 * np.sqrt(T * (1.0 - p))
        branch = Branch.CONVEX_HULL
    else:
        value = (p * np.sqrt(2 * T) + np.sqrt((1 - r2) * (1 - m - 2 * T))) ** 2 / (2 * (1 - m) ** 2)
        Q = 1.0 - T - value
        branch = Branch.EDGE_CASE
    Q = min(max(Q, 0.0), th.q_max)
    res = qubit_frio(b, Q)
    return GuessingResult(float(value), res.decomposition, branch, res.state, res.measurement, Q)


# ---------------------------------------------------------------- noisy states


def noisy_t_max(d: int, eps: float) -> float:
    """Largest meaningful error rate: the one reached by minimum-error guessing."""
    return 1.0 - noisy_trace_sqrt(d, eps) ** 2 / d


def noisy_min_error(d: int, eps: float) -> float:
    return noisy_trace_sqrt(d, eps) ** 2 / d


def _check_noise(d: int, eps: float) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps={eps!r} outside the valid interval (0, 1)")
    return int(d)


def noisy_frio(d: int, eps: float, Q: float) -> GuessingResult:
    """Fixed-inconclusive-rate guessing probability for the noisy state.

    The measurement is the computational basis, which is unbiased to the
    uniform superposition.  ``Q`` ranges over ``[0, 1 - eps]``.
    """
    d = _check_noise(d, eps)
    Q = _check_interval("Q", Q, 0.0, 1.0 - eps)
    gamma = min(eps / (1.0 - Q), 1.0)
    root = np.sqrt(max(d * (1.0 - Q) - eps * (d - 1), 0.0))
    value = (root + (d - 1) * np.sqrt(eps)) ** 2 / d**2
    sqrt_g = linalg.psd_sqrt(d * noisy_matrix(d, gamma))
    states = [DensityMatrix.pure(uniform_superposition(d))]
    states += [DensityMatrix.pure(sqrt_g[:, j]) for j in range(d)]
    weights = np.array([Q] + [(1.0 - Q) / d] * d)
    D = Decomposition(weights, states)
    return GuessingResult(
        float(value), D, Branch.CONVEX_HULL, noisy_state(d, eps), computational_measurement(d), Q
    )


def noisy_fixed_error(d: int, eps: float, T: float) -> GuessingResult:
    """Fixed-error-rate guessing probability for the noisy state, ``0 <= T <= T_max``."""
    d = _check_noise(d, eps)
    T = _check_interval("T", T, 0.0, noisy_t_max(d, eps))
    value = (np.sqrt(T) + np.sqrt(eps * (d - 1))) ** 2 / (d - 1)
    Q = min(max(1.0 - T - value, 0.0), 1.0 - eps)
    res = noisy_frio(d, eps, Q)
    return GuessingResult(float(value), res.decomposition, Branch.CONVEX_HULL, res.state, res.measurement, Q)
