"""Factories for explicit operator families and seeded random test instances.

Every random factory takes an explicit integer seed and is deterministic in
it. Functions with an ``exact`` flag return exact Gaussian-rational matrices
when it is set.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
from typing import Tuple

import numpy as np

from .errors import DomainError
from .exact import GaussianRational
from .linalg import as_matrix, identity, zeros

__all__ = [
    "rotation", "reflection", "rotation_exact", "reflection_exact",
    "nilpotent_r2", "paper_example_AQ", "BuilderSpec", "strict_isometry_parts",
    "strict_isometry_builder", "counterexample_3x3", "random_unitary",
    "random_matrix", "random_vector", "random_rational_matrix",
    "random_rational_vector",
]

# Magnitudes of builder nilpotent entries. Short chain entries make the
# defect at order 2k - 3 tiny relative to its cancellation scale once k >= 5;
# with these ranges it stays above 5e-3 for k <= 6.
CHAIN_MAGNITUDE = (3.0, 5.0)
EXTRA_MAGNITUDE = (0.1, 0.5)


def rotation(theta: float) -> np.ndarray:
    """The rotation ``R_theta`` of the plane."""
    c, s = math.cos(theta), math.sin(theta)
    return as_matrix([[c, -s], [s, c]])


def reflection(theta: float) -> np.ndarray:
    """The reflection ``S_theta`` in the line ``x2 = tan(theta/2) x1``."""
    c, s = math.cos(theta), math.sin(theta)
    return as_matrix([[c, s], [s, -c]])


_QUARTER = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def rotation_exact(quarter_turns: int) -> np.ndarray:
    """Exact ``R_theta`` for ``theta = quarter_turns * pi / 2``.

    These are the only angles where both cosine and sine are rational.
    """
    c, s = _QUARTER[quarter_turns % 4]
    return as_matrix([[c, -s], [s, c]], exact=True)


def reflection_exact(quarter_turns: int) -> np.ndarray:
    c, s = _QUARTER[quarter_turns % 4]
    return as_matrix([[c, s], [s, -c]], exact=True)


def nilpotent_r2(kind: str, lam=1, k_param=1, exact=False) -> np.ndarray:
    """``lam * M``, ``lam * N`` or ``lam * Q_k`` on the plane.

    ``M = [[0, 1], [0, 0]]``, ``N = [[0, 0], [1, 0]]`` and
    ``Q_k = [[1, k], [-1/k, -1]]``; every one squares to zero. With
    ``exact=True`` the scalars must be rational or Gaussian rational.
    """
    if lam == 0:
        raise DomainError("lam must be nonzero")
    if exact:
        lam = GaussianRational.from_number(lam)
        one = GaussianRational(1)
    else:
        lam = complex(lam)
        one = 1.0
    if kind == "M":
        base = [[0 * one, one], [0 * one, 0 * one]]
    elif kind == "N":
        base = [[0 * one, 0 * one], [one, 0 * one]]
    elif kind == "Qk":
        if k_param == 0:
            raise DomainError("k_param must be nonzero for Q_k")
        kp = GaussianRational.from_number(k_param) if exact else float(k_param)
        base = [[one, one * kp], [-one / kp, -one]]
    else:
        raise DomainError(f"unknown nilpotent kind {kind!r}; expected M, N or Qk")
    return as_matrix([[lam * b for b in row] for row in base], exact=exact)


def paper_example_AQ(n: int, j: int, exact=False) -> Tuple[np.ndarray, np.ndarray]:
    """The commuting pair ``A = diag(-1, 1, ..., 1)`` and the shift ``Q_j``
    with ``Q_j(x) = (0, x_3, ..., x_{j+1}, 0, ..., 0)``.

    ``Q_j`` is j-nilpotent and commutes with ``A``, so ``A + Q_j`` is a strict
    ``(2j - 1)``-isometry that is not of the form ``+-I + Q``.
    """
    if n < 3:
        raise DomainError("paper_example_AQ needs n >= 3")
    if not 1 <= j <= n - 1:
        raise DomainError(f"need 1 <= j <= n - 1, got j={j}")
    a = identity(n, exact=exact)
    a[0, 0] = -a[0, 0]
    q = zeros(n, exact=exact)
    one = a[1, 1]
    for i in range(1, j):
        # component i (0-based) receives x_{i+1}
        q[i, i + 1] = one
    return a, q


@dataclass(frozen=True)
class BuilderSpec:
    """Parameters of a block-diagonal strict ``(2k - 1)``-isometry.

    ``blocks`` is a sequence of ``(angle, size)`` pairs; each block is
    ``exp(i * angle) * I_size``. Eigenvalues are given by angle so they lie on
    the unit circle up to the rounding of one trig call. ``real`` restricts
    angles to ``0`` and ``pi`` and makes the nilpotent part real. ``mix``
    conjugates the result by a seeded random unitary (orthogonal if real),
    which preserves the strict order but hides the block structure.
    """

    n: int
    blocks: Tuple[Tuple[float, int], ...]
    k: int
    seed: int = 0
    real: bool = False
    mix: bool = False

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple((float(a), int(s)) for a, s in self.blocks))
        if not self.blocks:
            raise DomainError("at least one eigenvalue block is required")
        sizes = [s for _, s in self.blocks]
        if any(s < 1 for s in sizes):
            raise DomainError("block sizes must be positive")
        if sum(sizes) != self.n:
            raise DomainError(f"block sizes sum to {sum(sizes)}, expected n={self.n}")
        if not 1 <= self.k <= max(sizes):
            raise DomainError(
                f"nilpotent order k={self.k} needs a block of size >= k "
                f"(largest is {max(sizes)})")
        if self.real:
            for angle, _ in self.blocks:
                if _sign_of_real_angle(angle) is None:
                    raise DomainError("real mode allows only angles 0 and pi")

    @property
    def max_distinct(self) -> int:
        return self.n - self.k + 1


def _sign_of_real_angle(angle):
    r = math.remainder(angle, 2 * math.pi)
    if abs(r) < 1e-12:
        return 1
    if abs(abs(r) - math.pi) < 1e-12:
        return -1
    return None


def _exact_unit(angle):
    q = angle / (math.pi / 2)
    qi = round(q)
    if abs(q - qi) > 1e-12:
        raise DomainError("exact mode needs angles that are multiples of pi/2")
    c, s = _QUARTER[qi % 4]
    return GaussianRational(c, s)


def _random_entry(rng, lo, hi, real, exact):
    mag = rng.uniform(lo, hi)
    if exact:
        # small-denominator rational magnitude, random sign or quarter phase
        num = max(1, int(round(mag * 4)))
        val = Fraction(num, 4)
        if real:
            return GaussianRational(val if rng.random() < 0.5 else -val)
        c, s = _QUARTER[int(rng.integers(4))]
        return GaussianRational(c * val, s * val)
    if real:
        return mag if rng.random() < 0.5 else -mag
    phi = rng.uniform(0, 2 * math.pi)
    return mag * complex(math.cos(phi), math.sin(phi))


def strict_isometry_parts(spec: BuilderSpec, exact=False):
    """Return ``(A, Q)`` with ``A`` unitary diagonal, ``Q`` nilpotent of order
    exactly ``spec.k`` and ``AQ = QA``.

    The first block of maximal size carries a length-k shift chain (entries
    of magnitude in ``CHAIN_MAGNITUDE``) with random strictly-upper fill
    inside the k-by-k corner; every other block gets a random chain of
    length at most ``min(size, k)`` built the same way.
    """
    if exact and spec.mix:
        raise DomainError("mix is not supported on the exact path")
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    a = zeros(n, exact=exact)
    q = zeros(n, exact=exact)
    sizes = [s for _, s in spec.blocks]
    lead = sizes.index(max(sizes))
    start = 0
    for b, (angle, size) in enumerate(spec.blocks):
        if exact:
            lam = _exact_unit(angle)
        elif spec.real:
            lam = complex(_sign_of_real_angle(angle))
        else:
            lam = complex(math.cos(angle), math.sin(angle))
        for i in range(start, start + size):
            a[i, i] = lam
        order = spec.k if b == lead else int(rng.integers(1, min(size, spec.k) + 1))
        for i in range(order - 1):
            q[start + i, start + i + 1] = _random_entry(rng, *CHAIN_MAGNITUDE, spec.real, exact)
        for i in range(order):
            for j in range(i + 2, order):
                if rng.random() < 0.5:
                    q[start + i, start + j] = _random_entry(
                        rng, *EXTRA_MAGNITUDE, spec.real, exact)
        start += size
    if spec.mix:
        u = random_unitary(n, spec.seed + 7919, real=spec.real)
        a = u @ a @ u.conj().T
        q = u @ q @ u.conj().T
    return a, q


def strict_isometry_builder(spec: BuilderSpec, exact=False) -> np.ndarray:
    """``(l_1 I_{n_1} + ... + l_s I_{n_s}) + Q``, a strict ``(2k - 1)``-isometry."""
    a, q = strict_isometry_parts(spec, exact=exact)
    return a + q


def counterexample_3x3(exact=False) -> np.ndarray:
    """``[[1, 0, 0], [0, 2, 1], [0, 1, 1]]``: determinant 1, not a 3-isometry."""
    return as_matrix([[1, 0, 0], [0, 2, 1], [0, 1, 1]], exact=exact)


def random_unitary(n: int, seed: int, real=False) -> np.ndarray:
    """Haar-distributed unitary (orthogonal if ``real``) from a seeded QR."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, n))
    if not real:
        z = z + 1j * rng.standard_normal((n, n))
    qm, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return (qm * ph).astype(complex)


def random_matrix(n: int, seed: int, scale=1.0, real=False) -> np.ndarray:
    """I.i.d. entries uniform on ``[-scale, scale]`` (real and imaginary parts)."""
    rng = np.random.default_rng(seed)
    m = rng.uniform(-scale, scale, (n, n))
    if not real:
        m = m + 1j * rng.uniform(-scale, scale, (n, n))
    return m.astype(complex)


def random_vector(n: int, seed: int, scale=1.0, real=False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.uniform(-scale, scale, n)
    if not real:
        v = v + 1j * rng.uniform(-scale, scale, n)
    return v.astype(complex)


def _rational_array(rng, shape, bound, den, real):
    def draw():
        re = Fraction(int(rng.integers(-bound * den, bound * den + 1)), den)
        im = 0 if real else Fraction(int(rng.integers(-bound * den, bound * den + 1)), den)
        return GaussianRational(re, im)

    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = draw()
    return out


def random_rational_matrix(n: int, seed: int, bound=2, den=2, real=False) -> np.ndarray:
    """Exact matrix with entries ``p/den`` (and imaginary parts), ``|p/den| <= bound``."""
    return _rational_array(np.random.default_rng(seed), (n, n), bound, den, real)


def random_rational_vector(n: int, seed: int, bound=2, den=2, real=False,
                           nonzero=True) -> np.ndarray:
    rng = np.random.default_rng(seed)
    while True:
        v = _rational_array(rng, (n,), bound, den, real)
        if not nonzero or any(v):
            return v
