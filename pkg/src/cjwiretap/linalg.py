"""
Complex matrix primitives built on the SVD.

All functions accept any 2-D array castable to complex and are pure.
"""
from dataclasses import dataclass

import numpy as np

from .errors import FullSpace


@dataclass(frozen=True)
class Tolerance:
    """
    Numerical tolerances.

    Parameters
    ----------
    rank_rel_tol : float
        Singular values below ``rank_rel_tol * sigma_max`` count as zero.
    residual_abs_tol : float
        Absolute residual allowed in certificates and postconditions.
    """
    rank_rel_tol: float = 1e-10
    residual_abs_tol: float = 1e-8

    def __post_init__(self):
        if not 0 < self.rank_rel_tol < 1:
            raise ValueError("rank_rel_tol must lie in (0, 1)")
        if not self.residual_abs_tol > 0:
            raise ValueError("residual_abs_tol must be positive")


DEFAULT_TOL = Tolerance()


def _as_matrix(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix, got shape {0}".format(A.shape))
    return A


def _rank_from_sv(s, tol):
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))


def fix_phase(v, thresh=1e-12):
    """
    Rotate ``v`` so its first nonzero coordinate is real and positive.
    """
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > thresh * max(1.0, np.abs(v).max(initial=0.0)))
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (np.abs(z) / z)


def rank_tol(A, tol=DEFAULT_TOL):
    """
    Numerical rank of `A`.

    Parameters
    ----------
    A : array_like
        Complex matrix.
    tol : Tolerance

    Returns
    -------
    int
        Number of singular values above ``tol.rank_rel_tol * sigma_max``.
    """
    A = _as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return _rank_from_sv(s, tol)


def null_space_basis(A, tol=DEFAULT_TOL):
    """
    Orthonormal basis of the right null space of `A`.

    Parameters
    ----------
    A : array_like
        Complex matrix of shape (m, n).
    tol : Tolerance

    Returns
    -------
    np.ndarray
        Matrix of shape (n, n - rank(A)). A trivial null space gives an
        (n, 0) array.
    """
    A = _as_matrix(A)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = _rank_from_sv(s, tol)
    return Vh[r:].conj().T.copy()


def pseudo_inverse(A, tol=DEFAULT_TOL):
    """
    Moore-Penrose pseudo-inverse with the relative rank cutoff.
    """
    A = _as_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    r = _rank_from_sv(s, tol)
    return (Vh[:r].conj().T / s[:r]) @ U[:, :r].conj().T


def orth_complement_vector(S, tol=DEFAULT_TOL):
    """
    One unit vector orthogonal to every column of `S`.

    Parameters
    ----------
    S : array_like
        Complex matrix of shape (m, k); k may be zero.
    tol : Tolerance

    Returns
    -------
    np.ndarray
        Unit vector of length m with its first nonzero entry real-positive.

    Raises
    ------
    FullSpace
        If the columns of `S` span the whole space.
    """
    S = _as_matrix(S)
    m = S.shape[0]
    if S.shape[1] == 0:
        b = np.zeros(m, dtype=complex)
        b[0] = 1.0
        return b
    U, s, _ = np.linalg.svd(S, full_matrices=True)
    r = _rank_from_sv(s, tol)
    if r >= m:
        raise FullSpace("columns span all {0} dimensions".format(m))
    return fix_phase(U[:, r])
