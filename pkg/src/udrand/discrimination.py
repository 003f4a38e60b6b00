"""Unambiguous state discrimination view of unambiguous randomness.

Measuring ``M`` on one half of a purification of ``rho`` steers the other
half into the ensemble ``{eta_j, |phi_j>}``.  Unambiguous guesses of
Alice's outcome correspond to unambiguous discrimination of that ensemble.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError, FeasibilityError, ValidationError
from .quantum import BlochQubit, DensityMatrix, Povm

GRAM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    """Priors ``eta_j`` with unit state vectors stored as columns of ``states``."""

    priors: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.priors, dtype=float)
        phi = np.asarray(self.states, dtype=complex)
        if phi.ndim != 2 or phi.shape[1] != eta.size:
            raise ValidationError("need one state column per prior")
        if abs(eta.sum() - 1.0) > 1e-10 or eta.min() < 0:
            raise ValidationError(f"priors must form a distribution (sum {eta.sum():.12g})")
        norms = np.linalg.norm(phi, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValidationError("ensemble states must be normalised")
        object.__setattr__(self, "priors", eta)
        object.__setattr__(self, "states", phi)

    @property
    def size(self) -> int:
        return self.priors.size

    def density(self) -> np.ndarray:
        return (self.states * self.priors) @ self.states.conj().T

    def gram(self) -> np.ndarray:
        return self.states.conj().T @ self.states


def _conjugate_in(vec: np.ndarray, frame: np.ndarray) -> np.ndarray:
    return frame @ np.conj(frame.conj().T @ vec)


def steered_ensemble(rho: DensityMatrix, M: Povm) -> PureEnsemble:
    """Ensemble prepared on the purifying system by measuring ``M``.

    ``eta_j = <m_j|rho|m_j>`` and ``|phi_j> = sqrt(rho)|m_j*> / sqrt(eta_j)``,
    with complex conjugation taken in the eigenbasis of ``rho``.
    """
    basis = M.require_projective()
    if rho.lambda_min <= GRAM_TOL:
        raise DomainError("state must be full rank")
    frame = rho.eig.eigenvectors
    root = linalg.psd_sqrt(rho.mat)
    eta = np.array([rho.expect(linalg.ketbra(basis[:, j])) for j in range(M.dim)])
    cols = [root @ _conjugate_in(basis[:, j], frame) / np.sqrt(eta[j]) for j in range(M.dim)]
    return PureEnsemble(eta, np.column_stack(cols))


def reciprocal_states(E: PureEnsemble) -> np.ndarray:
    """Unnormalised vectors ``eta_j rho^{-1} |phi_j>`` as columns.

    They satisfy ``<phi_perp_i|phi_k> = delta_ik``.
    """
    g = E.gram()
    det = abs(np.linalg.det(g))
    if E.size != E.states.shape[0] or det <= GRAM_TOL:
        raise ValidationError(f"ensemble is not linearly independent (Gram determinant {det:.3e})")
    rho_inv = linalg.psd_inverse(E.density())
    return (rho_inv @ E.states) * E.priors


def ud_povm_from_weights(E: PureEnsemble, P: Sequence[float], tol: float = 1e-9) -> Povm:
    """Unambiguous measurement identifying state ``j`` with probability ``P_j``.

    Element 0 is the inconclusive outcome and element ``j`` is
    ``P_j |phi_perp_j><phi_perp_j|``.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (E.size,) or P.min() < -tol:
        raise FeasibilityError("success probabilities must be nonnegative, one per state")
    perp = reciprocal_states(E)
    conclusive = [max(P[j], 0.0) * linalg.ketbra(perp[:, j]) for j in range(E.size)]
    d = E.states.shape[0]
    e0 = np.eye(d) - sum(conclusive)
    lam = linalg.lambda_min(e0)
    if lam < -tol:
        raise FeasibilityError(f"inconclusive element not PSD (lambda_min = {lam:.3e})")
    return Povm(tuple([e0] + conclusive))


def firing_table(E: PureEnsemble, povm: Povm) -> np.ndarray:
    """``T[i, k] = <phi_k|E_i|phi_k>`` for the conclusive elements ``E_1..E_n``."""
    phi = E.states
    rows = [[phi[:, k].conj() @ povm.elements[i + 1] @ phi[:, k] for k in range(E.size)] for i in range(E.size)]
    return np.real(np.array(rows))


def ud_success(E: PureEnsemble, povm: Povm) -> float:
    return float(np.dot(E.priors, np.diag(firing_table(E, povm))))


def wrong_firing(E: PureEnsemble, povm: Povm) -> float:
    t = firing_table(E, povm)
    return float(np.max(np.abs(t - np.diag(np.diag(t))))) if E.size > 1 else 0.0


def lowest_eigenvalue_measurement(rho: DensityMatrix, M: Povm) -> tuple[PureEnsemble, Povm]:
    """Discrimination measurement with success ``d * lambda_min`` for the steered ensemble.

    Uses ``P_j = lambda_min / eta_j`` so that the inconclusive element is
    ``I - lambda_min rho^{-1}``.
    """
    E = steered_ensemble(rho, M)
    return E, ud_povm_from_weights(E, rho.lambda_min / E.priors)


def jaeger(eta1: float, overlap: float) -> float:
    """Optimal unambiguous discrimination of two pure states.

    Parameters
    ----------
    eta1 : float
        Prior of the first state, in (0, 1).
    overlap : float
        ``|<phi_1|phi_2>|`` in [0, 1).
    """
    if not 0.0 < eta1 < 1.0:
        raise DomainError(f"prior must lie in (0, 1), got {eta1}")
    if not 0.0 <= overlap < 1.0:
        raise DomainError(f"overlap must lie in [0, 1), got {overlap}")
    hi, lo = max(eta1, 1 - eta1), min(eta1, 1 - eta1)
    if np.sqrt(hi) * overlap <= np.sqrt(lo):
        return float(1.0 - 2.0 * np.sqrt(eta1 * (1 - eta1)) * overlap)
    return float(hi * (1.0 - overlap**2))


def ensemble_to_bloch(eta1: float, overlap: float) -> BlochQubit:
    """Qubit whose steered ensemble has these priors and overlap.

    The measured-axis component is ``|eta1 - eta2|``; the sign only decides
    which outcome is likelier.
    """
    eta2 = 1.0 - eta1
    return BlochQubit(abs(eta1 - eta2), 2.0 * np.sqrt(eta1 * eta2) * overlap)


def ensemble_overlap(E: PureEnsemble) -> float:
    if E.size != 2:
        raise ValidationError("overlap is defined for two-state ensembles")
    return float(abs(np.vdot(E.states[:, 0], E.states[:, 1])))
