"""Dense eigendecompositions.

Two routes are kept deliberately independent:

* a cyclic Jacobi rotation solver for symmetric matrices (hand-rolled,
  returns orthonormal eigenvectors), and
* a general real-spectrum solver used purely as a cross-check
  (LAPACK Hessenberg + shifted QR via ``numpy.linalg.eigvals``).

Products D*L of a nonnegative diagonal with a Laplacian are resolved
through the symmetric matrix L^{1/2} D L^{1/2}, which shares the full
spectrum of D*L, and cross-checked against the general solver.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SpectralMismatchError
from .network import WeightedLaplacian

_JACOBI_OFFDIAG_TOL = 1e-14
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted ascending; eigenvectors only for symmetric input."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    symmetric: bool


class Connectivity(NamedTuple):
    value: float
    fiedler: np.ndarray | None


def _check_symmetric(A: np.ndarray, rtol: float = 1e-12) -> None:
    scale = max(np.max(np.abs(A)), 1e-300)
    asym = np.max(np.abs(A - A.T))
    if asym > rtol * scale:
        raise SpectralMismatchError(
            f"matrix is not symmetric: max asymmetry {asym:.3e} exceeds {rtol:.1e} * {scale:.3e}")


def eig_symmetric(A: np.ndarray) -> Spectrum:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations."""
    A = np.asarray(A, dtype=float)
    _check_symmetric(A)
    n = A.shape[0]
    B = 0.5 * (A + A.T)  # kill round-off asymmetry before rotating
    V = np.eye(n)
    norm = np.linalg.norm(B, "fro")
    if norm == 0.0:
        return Spectrum(np.zeros(n), V, True)

    for _ in range(_MAX_SWEEPS):
        off_part = B - np.diag(np.diag(B))
        off = np.linalg.norm(off_part, "fro")
        if off <= _JACOBI_OFFDIAG_TOL * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # classic stable rotation angle
                theta = (B[q, q] - B[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e10:  # asymptotic form, avoids theta**2 overflow
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * B[:, p] - s * B[:, q]
                rot_q = s * B[:, p] + c * B[:, q]
                B[:, p], B[:, q] = rot_p, rot_q
                rot_p = c * B[p, :] - s * B[q, :]
                rot_q = s * B[p, :] + c * B[q, :]
                B[p, :], B[q, :] = rot_p, rot_q
                vp = c * V[:, p] - s * V[:, q]
                vq = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = vp, vq

    vals = np.diag(B).copy()
    order = np.argsort(vals, kind="stable")
    return Spectrum(vals[order], V[:, order], True)


def eig_general(A: np.ndarray, imag_rtol: float = 1e-8) -> np.ndarray:
    """Real, ascending eigenvalues of a general square matrix.

    Small imaginary parts (round-off of a real spectrum) are truncated;
    genuinely complex eigenvalues raise.
    """
    vals = np.linalg.eigvals(np.asarray(A, dtype=float))
    scale = max(np.max(np.abs(vals)), 1e-300)
    if np.max(np.abs(vals.imag)) > imag_rtol * scale:
        raise SpectralMismatchError(
            f"complex eigenvalues beyond tolerance: max |Im| = {np.max(np.abs(vals.imag)):.3e}")
    return np.sort(vals.real)


def sqrtm_psd(L: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix; round-off negatives clamped to 0."""
    s = eig_symmetric(L)
    vals = np.where(s.eigenvalues < 0.0, 0.0, s.eigenvalues)
    U = s.eigenvectors
    return (U * np.sqrt(vals)) @ U.T


def _lap_matrix(L: WeightedLaplacian | np.ndarray) -> np.ndarray:
    return L.matrix if isinstance(L, WeightedLaplacian) else np.asarray(L, dtype=float)


def eig_product(D: np.ndarray, L: WeightedLaplacian | np.ndarray,
                cross_rtol: float = 1e-6) -> Spectrum:
    """Real spectrum of D*L for nonnegative diagonal D.

    Computed from the symmetric matrix L^{1/2} D L^{1/2} and cross-checked
    against the general solver on D*L.  For nonsingular D a disagreement
    raises; for singular D (a boundary case the symmetric route still
    covers) a disagreement is only reported as a warning.
    """
    Lm = _lap_matrix(L)
    d = np.asarray(D, dtype=float)
    if d.ndim == 2:
        d = np.diag(d)
    if np.any(d < 0):
        raise ValueError("diagonal entries must be nonnegative")

    sqL = sqrtm_psd(Lm)
    sym_vals = eig_symmetric(sqL @ np.diag(d) @ sqL).eigenvalues

    gen_vals = eig_general(np.diag(d) @ Lm)
    scale = max(np.max(np.abs(sym_vals)), np.max(np.abs(gen_vals)), 1e-300)
    disagreement = np.max(np.abs(sym_vals - gen_vals)) / scale
    if disagreement > cross_rtol:
        msg = (f"eigenvalue routes disagree by {disagreement:.3e} relative "
               f"(symmetric lambda2={sym_vals[1]!r}, general lambda2={gen_vals[1]!r})")
        if np.min(d) > 0:
            raise SpectralMismatchError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return Spectrum(sym_vals, None, False)


def algebraic_connectivity(s: Spectrum, zero_rtol: float = 1e-8) -> Connectivity:
    """Second smallest eigenvalue (with multiplicity) and Fiedler vector.

    Requires the smallest eigenvalue to be numerically zero, as for the
    Laplacian of a connected graph.
    """
    vals = s.eigenvalues
    scale = max(np.max(np.abs(vals)), 1.0)
    if abs(vals[0]) > zero_rtol * scale:
        raise SpectralMismatchError(
            f"smallest eigenvalue {vals[0]!r} is not zero; input is not Laplacian-like")
    fiedler = s.eigenvectors[:, 1].copy() if s.eigenvectors is not None else None
    return Connectivity(float(vals[1]), fiedler)
