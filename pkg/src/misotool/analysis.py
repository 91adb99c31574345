"""Defect operators, the beta functional and m-isometry membership.

For an operator ``T`` and ``m >= 1`` the defect operator is

    Delta_m(T) = sum_{k=0}^{m} (-1)^(m-k) C(m, k) (T*)^k T^k

and ``T`` is an m-isometry when it vanishes. Its quadratic form is
``<Delta_m(T) x, x> = m! * beta_m(T, x)``.

Alternating binomial sums cancel badly in floating point, so float-path
residuals are always reported relative to the non-cancelled magnitude
``sum_k C(m, k) ||(T*)^k T^k||_F``. On the exact path membership means the
defect is identically zero.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional

import numpy as np

from .config import resolve_tol
from .errors import DomainError
from .linalg import (adjoint, frobenius_norm, identity, is_exact, is_singular,
                     is_zero, norm_sq)

__all__ = [
    "IsometryReport", "defect_operator", "defect_with_scale", "beta",
    "is_m_isometry", "strict_order", "even_collapse_check",
    "binomial_alternating_sum",
]


@dataclass
class IsometryReport:
    """Outcome of a strict-order search.

    ``tested_orders`` holds ``(m, defect_frobenius, cancellation_scale)`` for
    every order examined, in increasing ``m``.
    """

    tested_orders: list = field(default_factory=list)
    strict_order: Optional[int] = None
    invertible: bool = True
    tolerance_used: float = 0.0
    exact: bool = False

    @property
    def k(self) -> Optional[int]:
        """Nilpotency order of the Jordan part implied by the strict order."""
        if self.strict_order is None:
            return None
        return (self.strict_order + 1) // 2

    def to_dict(self) -> dict:
        return {
            "tested_orders": [
                {"m": m, "defect_frobenius": d, "cancellation_scale": s,
                 "relative_residual": d / s if s else 0.0}
                for m, d, s in self.tested_orders
            ],
            "strict_order": self.strict_order,
            "invertible": self.invertible,
            "tolerance_used": self.tolerance_used,
            "exact": self.exact,
            "note": None if self.invertible else
            "singular operator on a finite-dimensional space: not an m-isometry for any m",
        }


def _gram_powers(t, m):
    """``[(T*)^k T^k for k = 0..m]``, each formed as ``P* P`` with ``P = T^k``."""
    p = identity(t.shape[0], exact=is_exact(t))
    out = [adjoint(p) @ p]
    for _ in range(m):
        p = p @ t
        out.append(adjoint(p) @ p)
    return out


def defect_with_scale(t, m: int):
    """Return ``(Delta_m(T), scale)`` where ``scale`` is the cancellation
    magnitude ``sum_k C(m, k) ||(T*)^k T^k||_F``."""
    if m < 1:
        raise DomainError("defect order m must be >= 1")
    t = np.asarray(t)
    grams = _gram_powers(t, m)
    delta = sum(((-1) ** (m - k) * comb(m, k)) * g for k, g in enumerate(grams))
    if not is_exact(t):
        # (S + S^H) / 2 is bitwise Hermitian
        delta = (delta + adjoint(delta)) / 2
    scale = float(sum(comb(m, k) * frobenius_norm(g) for k, g in enumerate(grams)))
    return delta, scale


def defect_operator(t, m: int):
    """The defect operator ``Delta_m(T)`` (Hermitian)."""
    return defect_with_scale(t, m)[0]


def beta(s, ell: int, x):
    """``beta_ell(S, x) = (1/ell!) sum_j (-1)^(ell-j) C(ell, j) ||S^j x||^2``.

    Returns a Fraction on the exact path and a float otherwise.
    """
    if ell < 0:
        raise DomainError("beta order must be >= 0")
    s = np.asarray(s)
    v = np.asarray(x)
    exact = is_exact(s) or is_exact(v)
    total = Fraction(0) if exact else 0.0
    for j in range(ell + 1):
        if j:
            v = s @ v
        total += (-1) ** (ell - j) * comb(ell, j) * norm_sq(v)
    return total / factorial(ell)


def is_m_isometry(t, m: int, tol=None):
    """Test ``Delta_m(T) == 0``.

    Returns ``(is_member, residual)`` where ``residual`` is the Frobenius norm
    of the defect relative to its cancellation scale. The exact path ignores
    ``tol`` and tests for identical vanishing.
    """
    tol = resolve_tol(tol)
    delta, scale = defect_with_scale(t, m)
    resid = frobenius_norm(delta) / scale if scale else 0.0
    if is_exact(t):
        return is_zero(delta), resid
    return resid <= tol, resid


def strict_order(t, m_max: Optional[int] = None, tol=None) -> IsometryReport:
    """Smallest ``m <= m_max`` with ``T`` an m-isometry.

    ``m_max`` defaults to ``2n - 1``: on an n-dimensional space there are no
    strict m-isometries beyond that order. Singular operators are never
    m-isometries in finite dimension and short-circuit without defect sums.
    """
    t = np.asarray(t)
    tol = resolve_tol(tol)
    n = t.shape[0]
    if m_max is None:
        m_max = 2 * n - 1
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    report = IsometryReport(tolerance_used=tol, exact=is_exact(t))
    if is_singular(t, tol):
        report.invertible = False
        return report
    for m in range(1, m_max + 1):
        delta, scale = defect_with_scale(t, m)
        d = frobenius_norm(delta)
        report.tested_orders.append((m, d, scale))
        member = is_zero(delta) if report.exact else (d <= tol * scale)
        if member:
            report.strict_order = m
            break
    return report


def even_collapse_check(t, ell: int, tol=None) -> bool:
    """True iff membership at orders ``2*ell - 1`` and ``2*ell`` agree.

    Only meaningful for invertible ``T``, where the two classes coincide.
    """
    if ell < 1:
        raise DomainError("ell must be >= 1")
    if is_singular(t, resolve_tol(tol)):
        raise DomainError("even_collapse_check requires an invertible operator")
    odd, _ = is_m_isometry(t, 2 * ell - 1, tol)
    even, _ = is_m_isometry(t, 2 * ell, tol)
    return odd == even


def binomial_alternating_sum(n: int, m: int) -> int:
    """``sum_{k=0}^{m} (-1)^k C(n, k)`` by direct summation (needs ``n >= m + 1``).

    The closed form is ``(-1)^m C(n - 1, m)``; this function does not use it.
    """
    if m < 0 or n < m + 1:
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    return sum((-1) ** k * comb(n, k) for k in range(m + 1))
