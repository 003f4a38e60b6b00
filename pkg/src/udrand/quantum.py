"""States, measurements, noise and decompositions."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError, ValidationError

TRACE_TOL = 1e-10
COMPLETENESS_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    mat: np.ndarray

    def __post_init__(self):
        try:
            a = linalg.hermitize(self.mat)
        except ValidationError as exc:
            raise ValidationError(f"density matrix: {exc}") from None
        tr = float(np.trace(a).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        lam = np.linalg.eigvalsh(a)[0]
        if lam < -linalg.PSD_TOL:
            raise ValidationError(f"density matrix not PSD (lambda_min = {lam:.3e})")
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)

    @classmethod
    def pure(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("zero vector")
        return cls(linalg.ketbra(v / n))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> linalg.EigenDecomposition:
        return linalg.eig_hermitian(self.mat)

    @property
    def lambda_min(self) -> float:
        return self.eig.lambda_min

    def expect(self, op) -> float:
        return float(np.trace(self.mat @ op).real)


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement given by PSD elements that sum to the identity.

    ``basis`` holds the measurement vectors as columns when the POVM is
    rank-one projective, and is ``None`` otherwise.
    """

    elements: tuple
    basis: np.ndarray | None = None

    def __post_init__(self):
        els = tuple(linalg.hermitize(e, 1e-10) for e in self.elements)
        if not els:
            raise ValidationError("POVM has no elements")
        d = els[0].shape[0]
        for k, e in enumerate(els):
            if e.shape != (d, d):
                raise ValidationError(f"POVM element {k} has shape {e.shape}")
            lam = np.linalg.eigvalsh(e)[0]
            if lam < -linalg.PSD_TOL:
                raise ValidationError(f"POVM element {k} not PSD (lambda_min = {lam:.3e})")
        err = linalg.max_abs(sum(els) - np.eye(d))
        if err > COMPLETENESS_TOL:
            raise ValidationError(f"POVM elements sum to identity only within {err:.3e}")
        object.__setattr__(self, "elements", els)
        if self.basis is not None:
            b = np.asarray(self.basis, dtype=complex)
            object.__setattr__(self, "basis", b)

    @classmethod
    def from_basis(cls, vectors) -> "Povm":
        """Projective measurement onto the orthonormal columns of ``vectors``."""
        v = np.asarray(vectors, dtype=complex)
        d = v.shape[0]
        if v.shape != (d, d):
            raise ValidationError("basis must be a square matrix of column vectors")
        err = linalg.max_abs(v.conj().T @ v - np.eye(d))
        if err > COMPLETENESS_TOL:
            raise ValidationError(f"basis is not orthonormal (defect {err:.3e})")
        return cls(tuple(linalg.ketbra(v[:, j]) for j in range(d)), v)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    @property
    def projective(self) -> bool:
        return self.basis is not None

    def vector(self, j: int) -> np.ndarray:
        if self.basis is None:
            raise ValidationError("measurement is not rank-one projective")
        return self.basis[:, j]

    def require_projective(self) -> np.ndarray:
        if self.basis is None or self.n_outcomes != self.dim:
            raise ValidationError("a rank-one projective measurement is required")
        return self.basis


@dataclass(frozen=True)
class BlochQubit:
    """Qubit with Bloch vector m * z + p * x.

    ``m`` is the component along the measured axis (Pauli-Z) and ``p`` the
    component along the orthogonal in-plane axis (Pauli-X).
    """

    m: float
    p: float

    def __post_init__(self):
        m, p = float(self.m), float(self.p)
        if not (np.isfinite(m) and np.isfinite(p)):
            raise ValidationError("Bloch components must be finite")
        if m < 0 or p < 0:
            raise ValidationError(f"Bloch components must be nonnegative, got m={m}, p={p}")
        if m * m + p * p >= 1:
            raise ValidationError(f"state must be mixed: m^2 + p^2 = {m * m + p * p} >= 1")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)

    @property
    def r(self) -> float:
        return float(np.hypot(self.m, self.p))

    @property
    def r2(self) -> float:
        return self.m * self.m + self.p * self.p


def bloch_matrix(x: float, y: float, z: float) -> np.ndarray:
    """(I + x X + y Y + z Z) / 2 for an arbitrary real vector."""
    return 0.5 * (np.eye(2) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)


def bloch_to_density(b: BlochQubit) -> DensityMatrix:
    return DensityMatrix(bloch_matrix(b.p, 0.0, b.m))


def bloch_state(z: float, x: float) -> DensityMatrix:
    """Density matrix for the plane vector ``z`` (measured axis) + ``x`` (normal axis)."""
    return DensityMatrix(bloch_matrix(x, 0.0, z))


def uniform_superposition(d: int) -> np.ndarray:
    return np.full(d, 1.0 / np.sqrt(d), dtype=complex)


def noisy_matrix(d: int, eps: float) -> np.ndarray:
    """(1 - eps)|phi><phi| + eps I/d, with ``eps`` anywhere in [0, 1]."""
    phi = uniform_superposition(d)
    return (1.0 - eps) * linalg.ketbra(phi) + (eps / d) * np.eye(d)


def noisy_state(d: int, eps: float) -> DensityMatrix:
    """Uniform superposition mixed with white noise of weight ``eps``."""
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"noise must lie in (0, 1), got {eps}")
    return DensityMatrix(noisy_matrix(int(d), eps))


def noisy_trace_sqrt(d: int, eps: float) -> float:
    """tr sqrt(rho_eps), from its two distinct eigenvalues."""
    a = d - eps * (d - 1)
    return (np.sqrt(a) + (d - 1) * np.sqrt(eps)) / np.sqrt(d)


def noisy_sqrt(d: int, eps: float) -> np.ndarray:
    """sqrt(rho_eps) built from the projector onto phi and its complement."""
    phi_proj = linalg.ketbra(uniform_superposition(d))
    a = d - eps * (d - 1)
    return (np.sqrt(a) * phi_proj + np.sqrt(eps) * (np.eye(d) - phi_proj)) / np.sqrt(d)


def computational_measurement(d: int) -> Povm:
    return Povm.from_basis(np.eye(d, dtype=complex))


def unbiased_basis(d: int) -> Povm:
    """Discrete Fourier basis, unbiased with respect to the computational basis."""
    if d < 2:
        raise DomainError("dimension must be >= 2")
    j = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
    return Povm.from_basis(f)


def depolarize_povm(M: Povm, eps: float) -> Povm:
    """Apply white noise of weight ``eps`` to every element of a projective measurement."""
    M.require_projective()
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"noise must lie in [0, 1), got {eps}")
    if eps == 0.0:
        return M
    d = M.dim
    return Povm(tuple((1 - eps) * e + (eps / d) * np.eye(d) for e in M.elements))


def born(rho: DensityMatrix, M: Povm) -> np.ndarray:
    """Outcome probabilities tr(rho M_j)."""
    if rho.dim != M.dim:
        raise ValidationError(f"dimension mismatch: state {rho.dim}, measurement {M.dim}")
    return np.array([rho.expect(e) for e in M.elements])


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Weighted ensemble of sub-states; index 0 is the inconclusive component.

    Component ``j >= 1`` is the one for which the guess is outcome ``j`` of
    the measurement (zero-based outcome ``j - 1``).
    """

    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        sts = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in self.states)
        if w.ndim != 1 or len(sts) != w.size:
            raise ValidationError("need one state per weight")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", sts)

    @property
    def n_components(self) -> int:
        return self.weights.size

    def mixture(self) -> np.ndarray:
        return sum(w * s.mat for w, s in zip(self.weights, self.states))

    @property
    def inconclusive(self) -> float:
        return float(self.weights[0])

    def outcome_table(self, M: Povm) -> np.ndarray:
        """Joint probabilities P(component k, outcome j)."""
        return np.array([w * born(s, M) for w, s in zip(self.weights, self.states)])

    def correct_mass(self, M: Povm) -> float:
        t = self.outcome_table(M)
        return float(sum(t[k, k - 1] for k in range(1, min(self.n_components, M.n_outcomes + 1))))

    def error_mass(self, M: Povm) -> float:
        return float(self.weights[1:].sum()) - self.correct_mass(M)


@dataclass
class DecompositionReport:
    """Outcome of ``validate_decomposition``; truthy iff every check passed."""

    ok: bool
    weight_sum_error: float
    min_weight: float
    mixture_error: float
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_decomposition(target: DensityMatrix, D: Decomposition, tol: float = 1e-9) -> DecompositionReport:
    """Check weights form a distribution and the mixture reproduces ``target``."""
    failures = []
    wsum = abs(float(D.weights.sum()) - 1.0)
    wmin = float(D.weights.min()) if D.weights.size else 0.0
    if wsum > max(tol, TRACE_TOL):
        failures.append(f"weights sum to {D.weights.sum():.12g}")
    if wmin < -tol:
        failures.append(f"negative weight {wmin:.3e}")
    if any(s.dim != target.dim for s in D.states):
        failures.append("state dimension mismatch")
        return DecompositionReport(False, wsum, wmin, float("inf"), failures)
    mix = linalg.max_abs(D.mixture() - target.mat)
    if mix > tol:
        failures.append(f"mixture differs from target by {mix:.3e}")
    return DecompositionReport(not failures, wsum, wmin, mix, failures)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random full-rank (by default) density matrix from a Ginibre draw."""
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_basis(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary, columns forming an orthonormal basis."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
