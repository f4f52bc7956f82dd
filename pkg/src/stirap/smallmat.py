"""Dense complex linear algebra for 3x3 and 9x9 matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
The helpers here validate shape, enforce the Hermiticity tolerance and
provide a matrix exponential that can also be called from numba kernels
(:func:`expm_taylor`).
"""

import math

import numpy as np
from numba import njit

from .errors import DimensionError, HermiticityViolation, NumericalError

ALLOWED_DIMS = (3, 9)
HERMITIAN_RTOL = 1e-12
ABS_FLOOR = 1e-14


def as_matrix(a):
    """Return ``a`` as a square complex128 array of an allowed dimension."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"matrix dimension {m.shape[0]} not in {ALLOWED_DIMS}")
    return m


def frobenius(a):
    return float(np.linalg.norm(np.asarray(a), "fro"))


def tolerance(a, rtol):
    """Scale-free tolerance ``rtol * ||a||_F`` with an absolute floor."""
    return max(rtol * frobenius(a), ABS_FLOOR)


def hermiticity_defect(a):
    """Largest entrywise deviation ``|A_ij - conj(A_ji)|``."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, rtol=HERMITIAN_RTOL):
    return hermiticity_defect(a) <= tolerance(a, rtol)


def commutator(a, b):
    """Return ``AB - BA``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def _gram_schmidt_subspace(basis, n_keep, tol):
    """Orthonormal basis of span(basis) built from the standard basis vectors.

    Each standard basis vector e_0, e_1, ... is projected into the subspace
    and orthonormalized against the vectors already accepted, so the output
    does not depend on which basis LAPACK happened to return.
    """
    dim = basis.shape[0]
    projector = basis @ basis.conj().T
    out = []
    for k in range(dim):
        v = projector[:, k].copy()
        for u in out:
            v -= (u.conj() @ v) * u
        norm = np.linalg.norm(v)
        if norm > tol:
            out.append(v / norm)
        if len(out) == n_keep:
            break
    return np.column_stack(out)


def _fix_phase(v):
    # largest-magnitude component made real and positive
    k = int(np.argmax(np.abs(v) > np.abs(v).max() * (1 - 1e-9)))
    return v * (abs(v[k]) / v[k])


def herm_eig(a):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like
        Hermitian 3x3 or 9x9 matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns.  Degenerate eigenspaces are
        given a deterministic basis; every vector has its leading
        component real and positive.

    Raises
    ------
    HermiticityViolation
        If ``a`` is not Hermitian to ``1e-12 * ||a||_F``.
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise HermiticityViolation(
            f"matrix is not Hermitian (defect {hermiticity_defect(a):.3e})"
        )
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]

    tol = tolerance(a, 1e-10)
    vecs = np.empty_like(v)
    i = 0
    n = len(w)
    while i < n:
        j = i + 1
        while j < n and w[j] - w[i] <= tol:
            j += 1
        if j - i == 1:
            vecs[:, i] = _fix_phase(v[:, i])
        else:
            block = _gram_schmidt_subspace(v[:, i:j], j - i, 1e-6)
            for k in range(j - i):
                vecs[:, i + k] = _fix_phase(block[:, k])
        i = j
    return w.astype(float), vecs


@njit(cache=True, nogil=True)
def _norm1(a):
    best = 0.0
    for j in range(a.shape[1]):
        s = 0.0
        for i in range(a.shape[0]):
            s += abs(a[i, j])
        if s > best:
            best = s
    return best


@njit(cache=True, nogil=True)
def expm_taylor(a):
    """exp(a) by scaling and squaring around a truncated Taylor series."""
    n = a.shape[0]
    nrm = _norm1(a)
    s = 0
    if nrm > 0.5:
        s = int(math.ceil(math.log2(nrm / 0.5)))
    scaled = a / (2.0 ** s)
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, 40):
        term = term @ scaled / k
        result += term
        if _norm1(term) <= 1e-18 * _norm1(result):
            break
    for _ in range(s):
        result = result @ result
    return result


def expm(a):
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs go through the spectral
    decomposition, which keeps ``exp(-iH dt)`` unitary to rounding.  Any
    other input uses scaling and squaring with a Taylor core.
    """
    a = as_matrix(a)
    if not np.all(np.isfinite(a)):
        raise NumericalError("expm received non-finite entries")
    if not np.any(a):
        return np.eye(a.shape[0], dtype=np.complex128)
    if is_hermitian(a):
        w, v = herm_eig(a)
        return (v * np.exp(w)) @ v.conj().T
    if is_hermitian(1j * a):
        w, v = herm_eig(1j * a)
        # a = -i * (i a)
        return (v * np.exp(-1j * w)) @ v.conj().T
    return expm_taylor(a)
