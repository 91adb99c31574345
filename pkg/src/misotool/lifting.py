"""Lifting an m-isometry to an (m+1)-isometry on a weighted polynomial space.

Fix ``T``, a power ``k`` and a nonzero vector ``x0``. Polynomials carry the
norm

    |||p|||_k^2 = ||p||_2^2 + sum_{n >= 0} ||(L^{nk} p)(T) x0||^2

where ``L`` drops the constant term and divides by ``z``. If ``T^k`` is an
m-isometry on its range, multiplication by ``z^k`` is an (m+1)-isometry for
this norm. It is strict when ``beta_{m-1}(T^k, T^k x0) != 0``.

Everything is evaluated on polynomials, where every sum above is finite
(terms vanish once ``nk`` exceeds the degree), so the identities are checked
with no truncation. On the exact path they hold with zero residual.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, factorial
from typing import List, Optional

import numpy as np

from .analysis import beta, defect_with_scale
from .config import resolve_tol
from .errors import DomainError, PreconditionError
from .exact import GaussianRational
from .linalg import (adjoint, frobenius_norm, is_exact, is_zero, norm_sq, power,
                     range_basis, to_exact, to_float)

__all__ = [
    "Polynomial", "LiftContext", "HypothesisReport", "LiftReport",
    "shift_down", "mz_pow", "eval_operator_poly", "lifted_norm_sq",
    "lifted_beta", "verify_power_identity", "verify_beta_reduction",
    "hypothesis_check", "lift_check", "random_polynomial",
]


class Polynomial:
    """Dense coefficient list ``p_0, p_1, ..., p_d`` with trailing zeros trimmed.

    Coefficients are either all Python complex numbers or all
    :class:`GaussianRational`. The zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        exact = any(isinstance(c, (GaussianRational, Fraction, int)) for c in cs) and \
            not any(isinstance(c, (float, complex)) for c in cs)
        if exact:
            cs = [GaussianRational.from_number(c) for c in cs]
        else:
            cs = [complex(c) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return bool(self.coeffs) and isinstance(self.coeffs[0], GaussianRational)

    def norm2_sq(self):
        """``sum |p_n|^2``."""
        if self.exact:
            return sum((c.abs2() for c in self.coeffs), Fraction(0))
        return float(sum(abs(c) ** 2 for c in self.coeffs))

    def to_exact(self) -> "Polynomial":
        return Polynomial([GaussianRational.from_number(c) for c in self.coeffs])

    def to_float(self) -> "Polynomial":
        return Polynomial([complex(c) for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(tuple(complex(c) for c in self.coeffs))

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"


def shift_down(p: Polynomial, times: int = 1) -> Polynomial:
    """``L^times p``: drop the lowest ``times`` coefficients."""
    return Polynomial(p.coeffs[times:])


def mz_pow(p: Polynomial, j: int, k: int) -> Polynomial:
    """``z^{kj} p``."""
    if not p.coeffs:
        return p
    zero = GaussianRational(0) if p.exact else 0j
    return Polynomial((zero,) * (k * j) + p.coeffs)


def eval_operator_poly(p: Polynomial, t, x0) -> np.ndarray:
    """``p(T) x0 = sum_n p_n T^n x0`` by Horner's rule on the vector."""
    t = np.asarray(t)
    x0 = np.asarray(x0)
    exact = is_exact(t) or is_exact(x0)
    if exact:
        t, x0 = to_exact(t), to_exact(x0)
        cs = [GaussianRational.from_number(c) for c in p.coeffs]
    else:
        cs = [complex(c) for c in p.coeffs]
    if not cs:
        return x0 * 0
    v = cs[-1] * x0
    for c in reversed(cs[:-1]):
        v = t @ v + c * x0
    return v


@dataclass(frozen=True)
class LiftContext:
    """The data ``(T, k, x0)`` defining ``|||.|||_k``; ``x0`` must be nonzero.

    If either ``T`` or ``x0`` is exact, both are stored exactly.
    """

    T: np.ndarray
    k: int
    x0: np.ndarray
    tol: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.T)
        x0 = np.asarray(self.x0)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DomainError("T must be a square matrix")
        if x0.shape != (t.shape[0],):
            raise DomainError(f"x0 has shape {x0.shape}, expected ({t.shape[0]},)")
        if int(self.k) < 1:
            raise DomainError("k must be a positive integer")
        if is_exact(t) or is_exact(x0):
            t, x0 = to_exact(t), to_exact(x0)
        else:
            t, x0 = to_float(t), to_float(x0)
        if not norm_sq(x0) > 0:
            raise DomainError("x0 must be nonzero")
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "tol", resolve_tol(self.tol))

    @property
    def exact(self) -> bool:
        return is_exact(self.T)

    @cached_property
    def Tk(self) -> np.ndarray:
        return power(self.T, self.k)

    def coerce(self, p: Polynomial) -> Polynomial:
        if self.exact and not p.exact and p.coeffs:
            return p.to_exact()
        if not self.exact and p.exact:
            return p.to_float()
        return p


def lifted_norm_sq(p: Polynomial, ctx: LiftContext):
    """``|||p|||_k^2``, a finite sum over ``n <= deg(p) / k``."""
    p = ctx.coerce(p)
    total = p.norm2_sq() if p.coeffs else (Fraction(0) if ctx.exact else 0.0)
    q = p
    while q.coeffs:
        total += norm_sq(eval_operator_poly(q, ctx.T, ctx.x0))
        q = shift_down(q, ctx.k)
    return total


def _lifted_beta_parts(ctx, ell, p):
    signed = Fraction(0) if ctx.exact else 0.0
    magnitude = Fraction(0) if ctx.exact else 0.0
    for j in range(ell + 1):
        nsq = lifted_norm_sq(mz_pow(p, j, ctx.k), ctx)
        signed += (-1) ** (ell - j) * comb(ell, j) * nsq
        magnitude += comb(ell, j) * nsq
    return signed / factorial(ell), magnitude


def lifted_beta(ctx: LiftContext, ell: int, p: Polynomial):
    """``beta_ell(M_z^k, p)`` with norms taken in ``|||.|||_k``."""
    if ell < 0:
        raise DomainError("beta order must be >= 0")
    return _lifted_beta_parts(ctx, ell, ctx.coerce(p))[0]


def verify_power_identity(ctx: LiftContext, p: Polynomial, j: int) -> float:
    """Residual of ``|||z^{kj} p|||^2 = |||p|||^2 + sum_{i=1}^{j} ||T^{ki} p(T) x0||^2``.

    Both sides are computed separately; the result is
    ``|LHS - RHS| / max(1, LHS)``, exactly zero on the exact path.
    """
    if j < 1:
        raise DomainError("j must be >= 1")
    p = ctx.coerce(p)
    lhs = lifted_norm_sq(mz_pow(p, j, ctx.k), ctx)
    rhs = lifted_norm_sq(p, ctx)
    v = eval_operator_poly(p, ctx.T, ctx.x0)
    for _ in range(j):
        v = ctx.Tk @ v
        rhs += norm_sq(v)
    return float(abs(lhs - rhs) / max(1, lhs))


def verify_beta_reduction(ctx: LiftContext, p: Polynomial, ell: int) -> float:
    """Residual of ``beta_{ell+1}(M_z^k, p) = beta_ell(T^k, T^k p(T) x0) / (ell + 1)``.

    Normalised by the non-cancelled magnitude of the left side (at least 1).
    """
    if ell < 1:
        raise DomainError("ell must be >= 1")
    p = ctx.coerce(p)
    lhs, magnitude = _lifted_beta_parts(ctx, ell + 1, p)
    w = ctx.Tk @ eval_operator_poly(p, ctx.T, ctx.x0)
    rhs = beta(ctx.Tk, ell, w) / (ell + 1)
    return float(abs(lhs - rhs) / max(1, magnitude / factorial(ell + 1)))


@dataclass
class HypothesisReport:
    range_isometry: bool
    strictness: float
    compressed_defect: float
    cancellation_scale: float
    range_dim: int
    m: int

    def to_dict(self):
        return dict(self.__dict__)


def hypothesis_check(ctx: LiftContext, m: int) -> HypothesisReport:
    """Test whether ``T^k`` is an m-isometry on its range and measure
    strictness.

    The quadratic form ``beta_m(T^k, .)`` vanishes on ``R(T^k)`` iff the
    defect compressed to that range vanishes: ``B* Delta_m(T^k) B = 0`` for
    any basis ``B`` of the range. ``strictness`` is
    ``|beta_{m-1}(T^k, T^k x0)|``.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    s = ctx.Tk
    delta, scale = defect_with_scale(s, m)
    b = range_basis(s, ctx.tol)
    compressed = adjoint(b) @ delta @ b
    cd = frobenius_norm(compressed)
    if ctx.exact:
        ok = is_zero(compressed)
    else:
        ok = cd <= ctx.tol * scale
    strict = abs(beta(s, m - 1, s @ ctx.x0))
    return HypothesisReport(
        range_isometry=bool(ok),
        strictness=float(strict),
        compressed_defect=cd,
        cancellation_scale=scale,
        range_dim=int(b.shape[1]),
        m=m,
    )


@dataclass
class LiftReport:
    hypothesis: HypothesisReport
    beta_residuals: List[float] = field(default_factory=list)
    strictness_witness: float = 0.0
    order: int = 0
    strict: bool = False
    passed: bool = False

    @property
    def max_residual(self) -> float:
        return max(self.beta_residuals, default=0.0)

    def to_dict(self):
        return {
            "hypothesis": self.hypothesis.to_dict(),
            "beta_residuals": self.beta_residuals,
            "max_beta_residual": self.max_residual,
            "strictness_witness": self.strictness_witness,
            "lifted_order": self.order,
            "strict": self.strict,
            "passed": self.passed,
        }


def random_polynomial(max_degree: int, rng, exact=False) -> Polynomial:
    """Degree uniform on ``0..max_degree``; real and imaginary parts of the
    coefficients uniform on ``[-1, 1]`` (on the exact path, on the grid of
    eighths in ``[-1, 1]``)."""
    d = int(rng.integers(0, max_degree + 1))
    if exact:
        re = rng.integers(-8, 9, d + 1)
        im = rng.integers(-8, 9, d + 1)
        return Polynomial([GaussianRational(Fraction(int(a), 8), Fraction(int(b), 8))
                           for a, b in zip(re, im)])
    re = rng.uniform(-1.0, 1.0, d + 1)
    im = rng.uniform(-1.0, 1.0, d + 1)
    return Polynomial(list(re + 1j * im))


def lift_check(ctx: LiftContext, m: int, max_degree: int = 8, trials: int = 50,
               seed: int = 42, require_strict: bool = True) -> LiftReport:
    """Verify that ``M_z^k`` is an (m+1)-isometry on random polynomials.

    For each trial polynomial ``p`` (RNG seeded with ``(seed, trial)``) the
    residual is ``|beta_{m+1}(M_z^k, p)|`` relative to the non-cancelled sum
    ``sum_j C(m+1, j) |||z^{kj} p|||^2``. The strictness witness is
    ``beta_m(M_z^k, 1)``, which equals ``beta_{m-1}(T^k, T^k x0) / m``.

    Raises
    ------
    PreconditionError
        If ``T^k`` is not an m-isometry on its range, or if
        ``require_strict`` and ``beta_{m-1}(T^k, T^k x0)`` is not above ``tol``.
    """
    hyp = hypothesis_check(ctx, m)
    if not hyp.range_isometry:
        raise PreconditionError(
            f"T^k is not an m-isometry on its range (m={m})",
            "compressed_defect", hyp.compressed_defect)
    if require_strict and not hyp.strictness > ctx.tol:
        raise PreconditionError(
            f"beta_{m - 1}(T^k, T^k x0) = {hyp.strictness:.3e}; the lift would not be strict",
            "strictness", hyp.strictness)
    report = LiftReport(hypothesis=hyp, order=m + 1)
    fact = factorial(m + 1)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        p = random_polynomial(max_degree, rng, exact=ctx.exact)
        value, magnitude = _lifted_beta_parts(ctx, m + 1, p)
        rel = abs(value) * fact / magnitude if magnitude else 0.0
        report.beta_residuals.append(float(rel))
    one = Polynomial([GaussianRational(1) if ctx.exact else 1.0])
    report.strictness_witness = float(lifted_beta(ctx, m, one))
    report.strict = report.strictness_witness > ctx.tol
    if ctx.exact:
        vanish = all(r == 0 for r in report.beta_residuals)
    else:
        vanish = report.max_residual <= ctx.tol
    report.passed = vanish and (report.strict or not require_strict)
    return report
