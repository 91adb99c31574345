"""Dense complex linear algebra with a float path and an exact path.

Matrices are plain square numpy arrays. The float path uses ``complex128``;
the exact path uses ``dtype=object`` arrays of
:class:`~misotool.exact.GaussianRational`. Every function here dispatches on
the dtype, so callers never need to know which path they are on except for
the few operations (eigenvalues, numerical kernels) that only exist on the
float path.

Inner products are linear in the first argument: ``<x, y> = sum x_i conj(y_i)``.
"""

from fractions import Fraction
import math

import numpy as np

from .config import resolve_tol
from .errors import ConvergenceError, DomainError, ExactPathError
from .exact import GaussianRational

__all__ = [
    "is_exact", "as_matrix", "as_vector", "to_exact", "to_float", "identity",
    "zeros", "adjoint", "power", "determinant", "eigenvalues", "kernel_basis",
    "range_basis", "gram_matrix", "inner", "norm_sq", "frobenius_norm",
    "frobenius_sq", "is_singular", "is_zero", "EIGEN_MAX_DIM",
]

EIGEN_MAX_DIM = 64

_to_gq = np.frompyfunc(GaussianRational.from_number, 1, 1)


def is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def to_exact(a) -> np.ndarray:
    """Exact copy of ``a``; float entries convert to their exact binary value."""
    a = np.asarray(a)
    if a.dtype != object and not np.all(np.isfinite(a)):
        raise DomainError("non-finite entries have no exact representation")
    return np.asarray(_to_gq(a.astype(object)), dtype=object)


def to_float(a) -> np.ndarray:
    return np.asarray(a).astype(complex)


def _check_finite(a):
    if a.dtype != object and not np.all(np.isfinite(a)):
        raise DomainError("entries must be finite (no NaN/Inf)")


def as_matrix(data, exact=False) -> np.ndarray:
    """Validate ``data`` as a square matrix and return it on the chosen path."""
    if exact or is_exact(data):
        a = to_exact(np.array(data, dtype=object))
    else:
        a = np.array(data, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
    _check_finite(a)
    return a


def as_vector(data, exact=False) -> np.ndarray:
    if exact or is_exact(data):
        v = to_exact(np.array(data, dtype=object))
    else:
        v = np.array(data, dtype=complex)
    if v.ndim != 1 or v.shape[0] == 0:
        raise DomainError(f"expected a non-empty vector, got shape {v.shape}")
    _check_finite(v)
    return v


def identity(n: int, exact=False) -> np.ndarray:
    if not exact:
        return np.eye(n, dtype=complex)
    out = zeros(n, exact=True)
    one = GaussianRational(1)
    for i in range(n):
        out[i, i] = one
    return out


def zeros(n: int, exact=False) -> np.ndarray:
    if not exact:
        return np.zeros((n, n), dtype=complex)
    out = np.empty((n, n), dtype=object)
    zero = GaussianRational(0)
    out.fill(zero)
    return out


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.ascontiguousarray(np.asarray(m).conj().T)


def power(m: np.ndarray, j: int) -> np.ndarray:
    """``m**j`` by repeated squaring, with ``m**0`` the identity."""
    if j < 0:
        raise DomainError("power exponent must be non-negative")
    m = np.asarray(m)
    result = identity(m.shape[0], exact=is_exact(m))
    base = m
    while j:
        if j & 1:
            result = result @ base
        j >>= 1
        if j:
            base = base @ base
    return result


def _row_echelon(m):
    """Exact Gaussian elimination. Returns (echelon rows, pivot columns, sign)."""
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    sign = 1
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            if rows[i][c]:
                f = rows[i][c] / piv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots, sign


def determinant(m: np.ndarray):
    """Determinant: exact elimination on the exact path, LU otherwise."""
    m = np.asarray(m)
    if not is_exact(m):
        return complex(np.linalg.det(m))
    rows, pivots, sign = _row_echelon(m)
    n = m.shape[0]
    if len(pivots) < n:
        return GaussianRational(0)
    det = GaussianRational(sign)
    for i in range(n):
        det = det * rows[i][i]
    return det


def eigenvalues(m: np.ndarray, max_dim: int = EIGEN_MAX_DIM) -> np.ndarray:
    """All eigenvalues of ``m`` with algebraic multiplicity (float path only)."""
    m = np.asarray(m)
    if is_exact(m):
        raise ExactPathError("eigenvalues are not available on the exact path")
    if m.shape[0] > max_dim:
        raise DomainError(f"dimension {m.shape[0]} exceeds eigenvalue cap {max_dim}")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc


def kernel_basis(m: np.ndarray, tol=None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``m``.

    Singular values ``<= tol * sigma_max`` count as zero. Exact input is
    converted to floats first. Returns an ``(n, 0)`` array for injective ``m``.
    """
    tol = resolve_tol(tol)
    m = to_float(m)
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax))
    return np.ascontiguousarray(vh[rank:].conj().T)


def range_basis(m: np.ndarray, tol=None) -> np.ndarray:
    """Basis (as columns) of the column space of ``m``.

    Float path: orthonormal, from the SVD with the same rank rule as
    :func:`kernel_basis`. Exact path: the pivot columns of ``m`` (linearly
    independent, not orthonormalised).
    """
    m = np.asarray(m)
    if is_exact(m):
        _, pivots, _ = _row_echelon(m)
        return m[:, pivots]
    tol = resolve_tol(tol)
    u, s, _ = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax))
    return np.ascontiguousarray(u[:, :rank])


def inner(x, y):
    """``<x, y>``, linear in ``x``."""
    return np.sum(np.asarray(x) * np.asarray(y).conj())


def norm_sq(x):
    """``||x||**2`` as a Fraction on the exact path, a float otherwise."""
    x = np.asarray(x)
    if is_exact(x):
        return sum((z.abs2() for z in x.flat), Fraction(0))
    return float(np.vdot(x, x).real)


def frobenius_sq(m):
    return norm_sq(np.asarray(m).ravel())


def frobenius_norm(m) -> float:
    return math.sqrt(float(frobenius_sq(m)))


def gram_matrix(vs) -> np.ndarray:
    """Gram matrix ``G[i, j] = <v_i, v_j>`` of a sequence of vectors."""
    vs = list(vs)
    if not vs:
        raise DomainError("gram_matrix needs at least one vector")
    exact = any(is_exact(v) for v in vs)
    rows = [to_exact(x) if exact else np.asarray(x, dtype=complex) for x in vs]
    if any(r.ndim != 1 or r.shape != rows[0].shape for r in rows):
        raise DomainError("all vectors must have the same dimension")
    v = np.array(rows, dtype=object if exact else complex)
    return v @ v.conj().T


def is_zero(m) -> bool:
    """Exact zero test (exact path) or bitwise zero test (float path)."""
    return not np.any(np.asarray(m) != 0)


def is_singular(m, tol=None) -> bool:
    """Exact: ``det == 0``. Float: ``sigma_min <= tol * sigma_max``."""
    m = np.asarray(m)
    if is_exact(m):
        return not determinant(m)
    tol = resolve_tol(tol)
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s[-1] <= tol * s[0]) if s[0] > 0 else True
