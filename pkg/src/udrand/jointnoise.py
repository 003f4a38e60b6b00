"""Eavesdropping when both the state and the measurement carry white noise.

Alice prepares the noisy superposition ``rho_eps`` and measures the
depolarised computational basis ``M_{x,eps}``.  A classical eavesdropper
holds a joint decomposition of both, labelled ``(mu, nu)``, and guesses
``f(mu, nu)``.  The constructions here give a lower bound on her guessing
probability, which is compared with the optimum against a noiseless
measurement on the noisier state ``rho_delta``, ``delta = eps (2 - eps)``.

Labels follow :mod:`udrand.analytic`: guess 0 is inconclusive and guess
``x`` means outcome ``x - 1`` (zero-based).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError
from .quantum import noisy_matrix, noisy_trace_sqrt, uniform_superposition

# eps within this distance of eps_crit counts as critical
CRIT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class JointDecomposition:
    """Joint labels ``(mu, nu)`` with weights, state vectors, POVMs and guesses.

    ``weights[mu, nu]`` is the label distribution, ``states[mu]`` the state
    vector, ``povms[nu]`` a list of ``d`` elements indexed by outcome and
    ``guess[mu, nu]`` the label guessed.
    """

    weights: np.ndarray
    states: list
    povms: list
    guess: np.ndarray
    strategy: str = ""
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def conditional(self, mu: int, nu: int) -> np.ndarray:
        psi = self.states[mu]
        return np.array([float(np.real(psi.conj() @ N @ psi)) for N in self.povms[nu]])

    def rates(self) -> tuple[float, float, float]:
        """Exact (guess, error, inconclusive) probabilities of the strategy."""
        guess = inc = 0.0
        for mu in range(self.weights.shape[0]):
            for nu in range(self.weights.shape[1]):
                w = self.weights[mu, nu]
                if w == 0:
                    continue
                f = int(self.guess[mu, nu])
                if f == 0:
                    inc += w
                else:
                    guess += w * self.conditional(mu, nu)[f - 1]
        return guess, 1.0 - guess - inc, inc


@dataclass(frozen=True)
class NoiseThresholds:
    eps_crit: float
    t1: float
    t2: float
    t_max_delta: float


@dataclass
class JointConstraintReport:
    state_residual: float
    measurement_residual: float
    born_residual: float
    weight_residual: float
    povm_residual: float
    tol: float

    @property
    def max_residual(self) -> float:
        return max(
            self.state_residual,
            self.measurement_residual,
            self.born_residual,
            self.weight_residual,
            self.povm_residual,
        )

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tol)

    def __bool__(self) -> bool:
        return self.passed


# ---------------------------------------------------------------- parameters


def epsilon_crit(d: int) -> float:
    """Noise at and above which the joint eavesdropper guesses perfectly."""
    return d / (2.0 * (d + np.sqrt(d)))


def delta_of_eps(eps: float) -> float:
    """State noise that reproduces the Born statistics of noise ``eps`` on both sides."""
    return eps * (2.0 - eps)


def eps_of_delta(delta: float) -> float:
    return 1.0 - np.sqrt(1.0 - delta)


def _dim(d) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def _unit(name: str, x: float) -> float:
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name}={x!r} outside the valid interval (0, 1)")
    return float(x)


def single_t_max(d: int, delta: float) -> float:
    """Largest error rate for the single-noise eavesdropper on ``rho_delta``."""
    return 1.0 - noisy_trace_sqrt(d, delta) ** 2 / d


def _shared_value(d: int, eps: float) -> float:
    # guessing probability of the no-inconclusive joint strategy
    return (noisy_trace_sqrt(d, eps) ** 2 - eps * (d - 1)) ** 2 / d


def thresholds(d: int, eps: float) -> NoiseThresholds:
    d = _dim(d)
    eps = _unit("eps", eps)
    t1 = 1.0 - _shared_value(d, eps)
    t2 = 1.0 - noisy_trace_sqrt(d, 2 * eps) ** 2 / d if 2 * eps <= 1 else float("nan")
    return NoiseThresholds(epsilon_crit(d), t1, t2, single_t_max(d, delta_of_eps(eps)))


def _check_t(d: int, eps: float, T: float) -> float:
    t_max = single_t_max(d, delta_of_eps(eps))
    if not (-1e-12 <= T <= t_max + 1e-12):
        raise DomainError(f"T={T!r} outside the valid interval [0, {t_max:.12g}]")
    return min(max(float(T), 0.0), t_max)


def inconclusive_parameter(d: int, eps: float, T: float) -> float:
    """Mixing parameter Q of the inconclusive-heavy strategy with error ``T``."""
    return (2 * (d - 1) * (1 - eps) - d * T - 2 * np.sqrt(2 * T * eps * (d - 1))) / (2 * (d - 1))


# ---------------------------------------------------------------- bounds


def joint_lower_bound(d: int, eps: float, T: float) -> float:
    """Guessing probability of the constructed joint strategy (a lower bound only)."""
    d = _dim(d)
    eps = _unit("eps", eps)
    T = _check_t(d, eps, T)
    if eps >= epsilon_crit(d) - CRIT_SLACK:
        return 1.0
    t1 = 1.0 - _shared_value(d, eps)
    if T >= t1:
        return _shared_value(d, eps)
    return (np.sqrt(T) + np.sqrt(2 * eps * (d - 1))) ** 2 / (d - 1)


def joint_rates(d: int, eps: float, T: float) -> tuple[float, float, float]:
    """Analytic (guess, error, inconclusive) rates of the constructed strategy."""
    d = _dim(d)
    eps = _unit("eps", eps)
    T = _check_t(d, eps, T)
    g = joint_lower_bound(d, eps, T)
    if eps >= epsilon_crit(d) - CRIT_SLACK:
        return g, 0.0, 0.0
    if T >= 1.0 - _shared_value(d, eps):
        return g, 1.0 - g, 0.0
    inc = 2 * inconclusive_parameter(d, eps, T) - 1
    return g, T, inc


def single_noise_optimum(d: int, delta: float, T: float) -> float:
    """Optimal guessing probability on ``rho_delta`` with a noiseless measurement and error ``T``."""
    d = _dim(d)
    delta = _unit("delta", delta)
    t_max = single_t_max(d, delta)
    if not (-1e-12 <= T <= t_max + 1e-12):
        raise DomainError(f"T={T!r} outside the valid interval [0, {t_max:.12g}]")
    T = min(max(float(T), 0.0), t_max)
    return (np.sqrt(T) + np.sqrt(delta * (d - 1))) ** 2 / (d - 1)


def separation(d: int, delta: float, T: float) -> float:
    """Joint lower bound minus the single-noise optimum at equal Born statistics."""
    return joint_lower_bound(d, eps_of_delta(delta), T) - single_noise_optimum(d, delta, T)


# ---------------------------------------------------------------- constructions


def _depolarised_projector(d: int, x: int, gamma: float) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[x, x] = 1.0
    return (1 - gamma) * m + (gamma / d) * np.eye(d)


def _base_family(d: int, gamma: float) -> tuple[list, list]:
    """States ``psi_0..psi_d`` and POVMs ``N_0..N_d`` of the shared construction."""
    phi = uniform_superposition(d)
    eye = np.eye(d, dtype=complex)
    root = linalg.psd_sqrt(d * noisy_matrix(d, gamma))
    states = [phi] + [root[:, mu] for mu in range(d)]
    roots = [linalg.psd_sqrt(_depolarised_projector(d, x, gamma)) for x in range(d)]
    povms = [[linalg.ketbra(eye[x]) for x in range(d)]]
    for nu in range(d):
        elems = []
        for x in range(d):
            S = roots[x]
            if x == nu:
                rest = np.ones(d, dtype=complex)
                rest[x] = 0.0
                rest /= np.sqrt(d - 1)
                off = eye - linalg.ketbra(eye[x]) - linalg.ketbra(rest)
                elems.append(d * S @ linalg.ketbra(phi) @ S + ((d - 1) / d) * gamma * off)
            else:
                v = eye[x] - eye[nu]
                elems.append(S @ linalg.ketbra(v) @ S)
        povms.append(elems)
    return states, povms


def _diagonal_strategy(d: int, gamma: float) -> tuple[np.ndarray, list, list, np.ndarray]:
    states, povms = _base_family(d, gamma)
    w = np.zeros((d + 1, d + 1))
    f = np.zeros((d + 1, d + 1), dtype=int)
    for mu in range(1, d + 1):
        w[mu, mu] = 1.0 / d
        f[mu, :] = mu
    return w, states, povms, f


def build_joint_decomposition(d: int, eps: float, T: float) -> JointDecomposition:
    """Joint decomposition of ``(rho_eps, M_eps)`` with error rate at most ``T``.

    * ``eps >= eps_crit``: the critical-noise strategy mixed with a
      uniformly random classical one; guesses are always right.
    * ``T >= T1``: the critical-noise construction at ``eps``, no
      inconclusive outcome, error exactly ``T1``.
    * ``T < T1``: inconclusive-heavy weights with error exactly ``T``.

    The two-level mixture of the first case is flattened into a single
    label set so that one verifier covers all cases.
    """
    d = _dim(d)
    eps = _unit("eps", eps)
    T = _check_t(d, eps, T)
    ec = epsilon_crit(d)
    if eps >= ec - CRIT_SLACK:
        beta = min((1 - eps) / (1 - ec), 1.0)
        w0, s0, n0, f0 = _diagonal_strategy(d, ec)
        eye = np.eye(d, dtype=complex)
        s1 = [eye[mu] for mu in range(d)]
        n1 = [[linalg.ketbra(eye[(x + nu) % d]) for x in range(d)] for nu in range(d)]
        f1 = np.array([[(mu - nu) % d + 1 for nu in range(d)] for mu in range(d)])
        L0, L1 = d + 1, d
        w = np.zeros((L0 + L1, L0 + L1))
        f = np.zeros_like(w, dtype=int)
        w[:L0, :L0] = beta * w0
        w[L0:, L0:] = (1 - beta) / d**2
        f[:L0, :L0] = f0
        f[L0:, L0:] = f1
        # off-block cells carry no weight; guess the state label
        f[L0:, :L0] = f1[:, :1]
        f[:L0, L0:] = f0[:, :1]
        return JointDecomposition(w, s0 + s1, n0 + n1, f, "mixed", {"beta": beta, "gamma": ec})
    t1 = 1.0 - _shared_value(d, eps)
    if T >= t1:
        w, s, n, f = _diagonal_strategy(d, eps)
        return JointDecomposition(w, s, n, f, "shared", {"gamma": eps, "t1": t1})
    Q = inconclusive_parameter(d, eps, T)
    gamma = min(eps / (1 - Q), 1.0)
    s, n = _base_family(d, gamma)
    w = np.zeros((d + 1, d + 1))
    f = np.zeros((d + 1, d + 1), dtype=int)
    w[0, 0] = 2 * Q - 1
    w[0, 1:] = (1 - Q) / d
    w[1:, 0] = (1 - Q) / d
    for k in range(1, d + 1):
        f[k, :] = k
        f[0, k] = k
    f[0, 0] = 0
    return JointDecomposition(w, s, n, f, "inconclusive", {"gamma": gamma, "Q": Q, "t1": t1})


def verify_joint_constraints(JD: JointDecomposition, d: int, eps: float, tol: float = 1e-9) -> JointConstraintReport:
    """Residuals of the state, measurement and Born marginal constraints.

    Also reports how far the weights are from a distribution and the worst
    POVM defect (completeness and positivity) over all ``nu``.
    """
    eye = np.eye(d)
    w = JD.weights
    rho = noisy_matrix(d, eps)
    meas = [_depolarised_projector(d, x, eps) for x in range(d)]
    state_mix = sum(w[mu, nu] * linalg.ketbra(JD.states[mu]) for mu in range(w.shape[0]) for nu in range(w.shape[1]))
    state_res = linalg.max_abs(state_mix - rho)
    col = w.sum(axis=0)
    meas_res = max(linalg.max_abs(sum(col[nu] * JD.povms[nu][x] for nu in range(w.shape[1])) - meas[x]) for x in range(d))
    born_res = 0.0
    for x in range(d):
        target = float(np.real(np.trace(rho @ meas[x])))
        got = sum(
            w[mu, nu] * float(np.real(JD.states[mu].conj() @ JD.povms[nu][x] @ JD.states[mu]))
            for mu in range(w.shape[0])
            for nu in range(w.shape[1])
        )
        born_res = max(born_res, float(abs(got - target)))
    weight_res = max(abs(float(w.sum()) - 1.0), max(0.0, -float(w.min())))
    povm_res = 0.0
    for elems in JD.povms:
        povm_res = max(povm_res, linalg.max_abs(sum(elems) - eye))
        for e in elems:
            povm_res = max(povm_res, max(0.0, -linalg.lambda_min(e)))
    return JointConstraintReport(state_res, meas_res, born_res, weight_res, povm_res, tol)
