"""Spectral structure of m-isometries.

Eigenvalue clustering, generalized eigenspaces, the isometric Jordan
decomposition ``T = A + Q`` and parallelepiped volume checks.

Computed eigenvalues of a defective block ``lambda I + Q`` with ``Q`` of
order k scatter around ``lambda`` at a distance of about ``eps**(1/k)``, far
beyond the rounding of the defect sums. :func:`spectral_summary` clusters
at a fixed radius. The decomposition routines instead walk up the
single-linkage merge levels of the computed spectrum and keep the finest
clustering whose generalized eigenspaces have the right dimensions and do
not overlap.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .analysis import strict_order
from .config import resolve_tol
from .errors import ClassificationError, DomainError
from .linalg import (adjoint, eigenvalues, frobenius_norm, power,
                     to_float)

__all__ = [
    "SpectralSummary", "JordanDecomp", "BoundCheck", "VolumeCheck",
    "cluster_eigenvalues", "spectral_summary", "generalized_eigenspaces",
    "eigenspace_orthogonality", "jordan_decompose",
    "distinct_eigenvalue_bound_check", "k_volume", "volume_preservation_check",
    "find_volume_witness",
]

DEFAULT_CLUSTER_RADIUS = 1e-6
DEFAULT_VOLUME_SEED = 42


@dataclass
class SpectralSummary:
    clusters: List[Tuple[complex, int]]
    all_unit_modulus: bool
    max_modulus_deviation: float
    distinct_count: int

    def to_dict(self):
        return {
            "clusters": [{"center": [c.real, c.imag], "multiplicity": m}
                         for c, m in self.clusters],
            "all_unit_modulus": self.all_unit_modulus,
            "max_modulus_deviation": self.max_modulus_deviation,
            "distinct_count": self.distinct_count,
        }


@dataclass
class JordanDecomp:
    """``T = A + Q`` with ``A`` unitary, ``Q`` nilpotent of order
    ``nilpotency_order`` and ``AQ = QA``."""

    A: np.ndarray
    Q: np.ndarray
    nilpotency_order: int
    clusters: SpectralSummary
    orthogonality_defect: float
    commutator_norm: float
    unitarity_defect: float = 0.0
    strict_order: Optional[int] = None
    eigenspaces: list = field(default_factory=list, repr=False)


class BoundCheck(NamedTuple):
    k: int
    distinct: int
    bound_holds: bool


class VolumeCheck(NamedTuple):
    preserved: bool
    worst_ratio: float
    det_abs: Optional[float]


def _merge_levels(z, radius):
    """Single-linkage clustering of points ``z`` at the given radius.

    Clusters whose means end up within ``radius`` are merged too, so the
    returned centers are pairwise more than ``radius`` apart.
    """
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius:
                parent[find(i)] = find(j)
    while True:
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        members = list(groups.values())
        centers = [np.mean(z[g]) for g in members]
        merged = False
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if abs(centers[a] - centers[b]) <= radius:
                    parent[find(members[a][0])] = find(members[b][0])
                    merged = True
        if not merged:
            break
    order = sorted(range(len(members)), key=lambda i: (np.angle(centers[i]), abs(centers[i])))
    return [(complex(centers[i]), members[i]) for i in order]


def cluster_eigenvalues(eigs, radius=DEFAULT_CLUSTER_RADIUS):
    """Cluster eigenvalues; returns ``[(center, multiplicity), ...]``."""
    z = np.asarray(eigs, dtype=complex)
    return [(c, len(g)) for c, g in _merge_levels(z, radius)]


def _summary(clusters, radius):
    dev = max(abs(abs(c) - 1.0) for c, _ in clusters)
    return SpectralSummary(
        clusters=clusters,
        all_unit_modulus=bool(dev <= radius),
        max_modulus_deviation=float(dev),
        distinct_count=len(clusters),
    )


def spectral_summary(t, cluster_radius=DEFAULT_CLUSTER_RADIUS) -> SpectralSummary:
    """Cluster the spectrum of ``T`` at ``cluster_radius`` and test whether
    every cluster center lies on the unit circle (within the same radius)."""
    eigs = eigenvalues(to_float(t))
    return _summary(cluster_eigenvalues(eigs, cluster_radius), cluster_radius)


def _kernel_of_power(t, center, mult, tol):
    """Basis of the ``mult``-dimensional near-kernel of ``(T - center)^mult``,
    or ``None`` if the numerical kernel has a different dimension."""
    n = t.shape[0]
    s_mat = power(t - center * np.eye(n), mult)
    _, s, vh = np.linalg.svd(s_mat)
    scale = max(s[0], 1.0)
    dim = int(np.sum(s <= tol * scale))
    if dim != mult:
        return None
    return np.ascontiguousarray(vh[n - mult:].conj().T)


def _max_cosine(bases):
    """Largest cosine of a principal angle between two distinct subspaces."""
    worst = 0.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            c = np.linalg.norm(adjoint(bases[i]) @ bases[j], 2)
            worst = max(worst, float(c))
    return worst


def _candidate_radii(z, radius):
    d = np.abs(z[:, None] - z[None, :])
    levels = sorted({float(x) for x in d[np.triu_indices(len(z), 1)] if x > radius})
    return [radius] + levels


def generalized_eigenspaces(t, tol=None, cluster_radius=DEFAULT_CLUSTER_RADIUS,
                            overlap_limit=None):
    """Resolve the spectrum of ``T`` into clusters and generalized eigenspaces.

    Returns ``(clusters, bases)`` where ``bases[i]`` has orthonormal columns
    spanning ``Ker (T - c_i)^{n_i}``. Walks the merge levels upward from
    ``cluster_radius`` and accepts the first clustering where every kernel
    has dimension equal to its cluster multiplicity and no two eigenspaces
    share a direction (largest principal cosine ``<= overlap_limit``; default
    ``1 - sqrt(tol)``). Raises ``ClassificationError`` if no level works.
    """
    tol = resolve_tol(tol)
    if overlap_limit is None:
        overlap_limit = 1.0 - sqrt(tol)
    t = to_float(t)
    z = eigenvalues(t)
    dims_ok_seen = False
    for r in _candidate_radii(z, cluster_radius):
        groups = _merge_levels(z, r)
        bases = []
        for center, members in groups:
            b = _kernel_of_power(t, center, len(members), tol)
            if b is None:
                break
            bases.append(b)
        else:
            dims_ok_seen = True
            if _max_cosine(bases) <= overlap_limit:
                return [(c, len(g)) for c, g in groups], bases
    if dims_ok_seen:
        raise ClassificationError(
            "generalized eigenspaces overlap: no consistent spectral decomposition")
    raise ClassificationError(
        "generalized eigenspaces do not span the space (defective input)")


def eigenspace_orthogonality(t, tol=None, cluster_radius=DEFAULT_CLUSTER_RADIUS) -> float:
    """Largest ``|<u, v>|`` over unit vectors ``u``, ``v`` in generalized
    eigenspaces of different eigenvalues.

    Zero for a single cluster. For an m-isometry the eigenspaces are
    mutually orthogonal and the result is at rounding level.
    """
    _, bases = generalized_eigenspaces(t, tol, cluster_radius)
    return _max_cosine(bases)


def _nilpotency_order(q, tol):
    n = q.shape[0]
    scale = max(1.0, frobenius_norm(q))
    p = np.eye(n, dtype=complex)
    for j in range(1, n + 1):
        p = p @ q
        if frobenius_norm(p) <= tol * scale ** j:
            return j
    return None


def jordan_decompose(t, tol=None, cluster_radius=DEFAULT_CLUSTER_RADIUS) -> JordanDecomp:
    """Split an m-isometry into ``A + Q`` with ``A`` unitary and ``Q`` a
    commuting nilpotent.

    ``A = sum_i lambda_i P_i`` where ``P_i`` is the orthogonal projection onto
    the i-th generalized eigenspace and ``lambda_i`` is the normalised trace of
    ``T`` compressed to it; ``Q = T - A``. ``A`` depends only on ``T``, not on
    the order in which clusters are found.

    Raises
    ------
    ClassificationError
        If ``T`` is not an m-isometry for any ``m <= 2n - 1``, if its
        generalized eigenspaces are not orthogonal within ``tol``, or if the
        resulting nilpotency order disagrees with the strict order.
    """
    tol = resolve_tol(tol)
    report = strict_order(t, tol=tol)
    if report.strict_order is None:
        why = "singular" if not report.invertible else f"no order <= {2 * np.shape(t)[0] - 1}"
        raise ClassificationError(f"not an m-isometry ({why})")
    tf = to_float(t)
    n = tf.shape[0]
    clusters, bases = generalized_eigenspaces(tf, tol, cluster_radius, overlap_limit=tol)
    ortho = _max_cosine(bases)
    a = np.zeros((n, n), dtype=complex)
    refined = []
    for (_, mult), b in zip(clusters, bases):
        lam = np.trace(adjoint(b) @ tf @ b) / mult
        lam = lam / abs(lam)
        refined.append((complex(lam), mult))
        a += lam * (b @ adjoint(b))
    q = tf - a
    k = _nilpotency_order(q, tol)
    if k is None:
        raise ClassificationError("remainder T - A is not nilpotent within tolerance")
    if 2 * k - 1 != report.strict_order:
        raise ClassificationError(
            f"nilpotency order {k} inconsistent with strict order {report.strict_order}")
    return JordanDecomp(
        A=a,
        Q=q,
        nilpotency_order=k,
        clusters=_summary(refined, max(cluster_radius, tol)),
        orthogonality_defect=ortho,
        commutator_norm=frobenius_norm(a @ q - q @ a),
        unitarity_defect=frobenius_norm(adjoint(a) @ a - np.eye(n)),
        strict_order=report.strict_order,
        eigenspaces=bases,
    )


def distinct_eigenvalue_bound_check(t, tol=None) -> BoundCheck:
    """Check that a strict ``(2k - 1)``-isometry has at most ``n - k + 1``
    distinct eigenvalues, and at most ``n - 1`` when ``k >= 2``."""
    d = jordan_decompose(t, tol)
    n = np.shape(t)[0]
    k = d.nilpotency_order
    distinct = d.clusters.distinct_count
    holds = distinct <= n - k + 1 and (k < 2 or distinct <= n - 1)
    return BoundCheck(k, distinct, holds)


def _as_real_rows(vs):
    arr = np.asarray([np.asarray(v) for v in vs])
    if arr.ndim != 2:
        raise DomainError("k_volume expects a sequence of equal-length vectors")
    if np.iscomplexobj(arr):
        if np.any(np.abs(arr.imag) > 0):
            raise DomainError("k_volume is defined for real vectors only")
        arr = arr.real
    return arr.astype(float)


def k_volume(vs) -> float:
    """Volume of the parallelepiped spanned by ``k`` real vectors.

    Mathematically ``sqrt(det G)`` with ``G`` the Gram matrix. It is computed
    as ``prod |R_ii|`` from a QR factorization of the vectors as columns,
    since ``G = R^T R`` and forming ``G`` would square the condition number.
    """
    arr = _as_real_rows(vs)
    k, n = arr.shape
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    r = np.linalg.qr(arr.T, mode="r")
    return float(np.prod(np.abs(np.diagonal(r))))


def _real_matrix(t):
    t = to_float(t)
    if np.any(np.abs(t.imag) > 0):
        raise DomainError("volume checks need a real matrix")
    return t.real


def _trial_tuple(seed, trial, k, n):
    rng = np.random.default_rng([seed, trial])
    return rng.uniform(-1.0, 1.0, (k, n))


def _dyadic_ints(arr):
    """Return ``(M, e)`` with integer object array ``M = arr * 2**e`` exactly."""
    ratios = [float(v).as_integer_ratio() for v in arr.ravel()]
    e = max(d.bit_length() - 1 for _, d in ratios)
    flat = [num << (e - (d.bit_length() - 1)) for num, d in ratios]
    return np.array(flat, dtype=object).reshape(arr.shape), e


def _bareiss_det(m) -> int:
    a = [list(row) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def _volume_ratio(x, tr_ints, t_exp) -> Optional[float]:
    """``vol(T x) / vol(x)`` for the rows of ``x``, in exact arithmetic.

    Floats are dyadic rationals, so the image tuple and both Gram
    determinants are computed without rounding; only the final square root
    is inexact. ``None`` if the tuple is degenerate.
    """
    xi, _ = _dyadic_ints(x)
    k = x.shape[0]
    before = _bareiss_det(xi @ xi.T)
    if before == 0:
        return None
    y = xi @ tr_ints.T
    after = _bareiss_det(y @ y.T)
    return sqrt(Fraction(after, before << (2 * k * t_exp)))


def volume_preservation_check(t, k: int, trials: int = 100, tol: float = 1e-9,
                              seed: int = DEFAULT_VOLUME_SEED) -> VolumeCheck:
    """Compare k-volumes of random k-tuples before and after applying ``T``.

    Tuple entries are i.i.d. uniform on ``[-1, 1]``, drawn from an RNG seeded
    with ``(seed, trial)``. Ratios are computed exactly from the binary
    values of ``T`` and the tuple, so ill-conditioned tuples add no rounding
    error. ``preserved`` is true iff every volume ratio is in ``1 +- tol``,
    and for ``k = n`` also ``| |det T| - 1 | <= tol``.
    """
    tr = _real_matrix(t)
    n = tr.shape[0]
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    t_ints, t_exp = _dyadic_ints(tr)
    worst = 1.0
    for trial in range(trials):
        ratio = _volume_ratio(_trial_tuple(seed, trial, k, n), t_ints, t_exp)
        if ratio is not None and abs(ratio - 1.0) > abs(worst - 1.0):
            worst = ratio
    preserved = abs(worst - 1.0) <= tol
    det_abs = None
    if k == n:
        det_abs = abs(float(np.linalg.det(tr)))
        preserved = preserved and abs(det_abs - 1.0) <= tol
    return VolumeCheck(bool(preserved), float(worst), det_abs)


def find_volume_witness(t, trials: int = 100, min_deviation: float = 1e-3,
                        seed: int = DEFAULT_VOLUME_SEED):
    """Search ``k < n`` tuples whose k-volume ``T`` changes by at least
    ``min_deviation`` (relative). Returns ``(k, tuple, ratio)`` or ``None``."""
    tr = _real_matrix(t)
    n = tr.shape[0]
    for k in range(1, n):
        for trial in range(trials):
            x = _trial_tuple(seed, trial, k, n)
            before = k_volume(x)
            if before == 0.0:
                continue
            ratio = k_volume(x @ tr.T) / before
            if abs(ratio - 1.0) >= min_deviation:
                return k, x, ratio
    return None
