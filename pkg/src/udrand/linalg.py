"""Dense Hermitian linear algebra for small operators (d up to about 16)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def eigenspace(self, value: float, tol: float = 1e-9) -> np.ndarray:
        """Columns spanning the eigenspace of ``value`` (within ``tol``)."""
        mask = np.abs(self.eigenvalues - value) <= tol
        return self.eigenvectors[:, mask]


def as_matrix(h) -> np.ndarray:
    """Return ``h`` as a square complex128 array, raising on bad shape."""
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_defect(h: np.ndarray) -> float:
    """Max-entry norm of h - h^dagger."""
    h = as_matrix(h)
    return float(np.max(np.abs(h - h.conj().T)))


def hermitize(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize ``h`` after checking it is Hermitian to ``tol``.

    The tolerance is relative to the largest entry so that operators like
    ``d * |u><u|`` are not rejected for round-off alone.
    """
    h = as_matrix(h)
    scale = max(1.0, float(np.max(np.abs(h))))
    defect = hermitian_defect(h)
    if defect > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e})")
    return 0.5 * (h + h.conj().T)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    # make the largest-modulus entry of each column real positive
    idx = np.argmax(np.abs(v) > np.abs(v).max(axis=0) - 1e-9, axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(lead) / lead)


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    h : array_like
        Square matrix, Hermitian within ``tol`` (relative to its largest entry).
    tol : float
        Hermiticity tolerance.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues and phase-normalised orthonormal eigenvectors.
    """
    a = hermitize(h, tol)
    w, v = np.linalg.eigh(a)
    return EigenDecomposition(w.real.copy(), _fix_phases(v))


def eigvalsh(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(h, tol))


def lambda_min(h, tol: float = HERMITIAN_TOL) -> float:
    return float(eigvalsh(h, tol)[0])


def is_psd(h, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of ``h`` is at least ``-tol``."""
    return lambda_min(h) >= -tol


def _checked_eig(h, tol: float) -> EigenDecomposition:
    e = eig_hermitian(h)
    if e.lambda_min < -tol:
        raise DomainError(f"matrix is not PSD (lambda_min = {e.lambda_min:.3e})")
    return e


def psd_sqrt(h, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero first.
    """
    e = _checked_eig(h, tol)
    root = np.sqrt(np.clip(e.eigenvalues, 0.0, None))
    v = e.eigenvectors
    return (v * root) @ v.conj().T


def psd_pinv_sqrt(h, rank_tol: float = 1e-12, tol: float = PSD_TOL) -> np.ndarray:
    """Inverse square root on the support of a PSD matrix, zero elsewhere."""
    e = _checked_eig(h, tol)
    lam = e.eigenvalues
    inv = np.zeros_like(lam)
    keep = lam > rank_tol
    inv[keep] = 1.0 / np.sqrt(lam[keep])
    v = e.eigenvectors
    return (v * inv) @ v.conj().T


def support_projector(h, rank_tol: float = 1e-12) -> np.ndarray:
    e = eig_hermitian(h)
    v = e.eigenvectors[:, e.eigenvalues > rank_tol]
    return v @ v.conj().T


def psd_inverse(h, tol: float = PSD_TOL) -> np.ndarray:
    """Inverse of a positive definite matrix via its eigendecomposition."""
    e = _checked_eig(h, tol)
    if e.lambda_min <= 0:
        raise DomainError("matrix is singular")
    v = e.eigenvectors
    return (v / e.eigenvalues) @ v.conj().T


def ketbra(a, b=None) -> np.ndarray:
    """Outer product |a><b| (``b`` defaults to ``a``)."""
    a = np.asarray(a, dtype=complex)
    b = a if b is None else np.asarray(b, dtype=complex)
    return np.outer(a, b.conj())


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def trace_sqrt(h) -> float:
    """tr sqrt(h) for PSD ``h``."""
    return float(np.sum(np.sqrt(np.clip(eigvalsh(h), 0.0, None))))
