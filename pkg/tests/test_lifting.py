from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misotool import generators as gen
from misotool import linalg as la
from misotool.errors import DomainError, PreconditionError
from misotool.exact import gq
from misotool.lifting import (LiftContext, Polynomial, eval_operator_poly, hypothesis_check,
                              lift_check, lifted_beta, lifted_norm_sq, mz_pow,
                              random_polynomial, shift_down, verify_beta_reduction,
                              verify_power_identity)

from conftest import gaussian_rationals, seeds

polys = st.lists(gaussian_rationals, max_size=7).map(Polynomial)


def one_ctx(exact=True):
    return LiftContext(la.as_matrix([[1]], exact=exact), 1, la.as_vector([1], exact=exact))


def shift_ctx(k=1, exact=True):
    t = la.as_matrix([[1, 1], [0, 1]], exact=exact)
    return LiftContext(t, k, la.as_vector([0, 1], exact=exact))


def builder_ctx(k=1, seed=0):
    spec = gen.BuilderSpec(3, ((0.0, 2), (np.pi / 2, 1)), 2, seed=seed)
    t = gen.strict_isometry_builder(spec, exact=True)
    return LiftContext(t, k, gen.random_rational_vector(3, seed))


def norm_oracle(p, ctx):
    # |||p|||^2 with (L^{nk} p)(T) x0 = sum_{i >= nk} p_i T^{i - nk} x0 via explicit powers
    total = sum((c.abs2() for c in p.coeffs), Fraction(0))
    d = p.degree
    n = 0
    while n * ctx.k <= d:
        v = sum(p.coeffs[i] * (la.power(ctx.T, i - n * ctx.k) @ ctx.x0)
                for i in range(n * ctx.k, d + 1))
        total += la.norm_sq(v)
        n += 1
    return total


def test_polynomial_basics():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1 and p.exact
    assert Polynomial([]).degree == -1
    assert Polynomial([0, 0]).coeffs == ()
    assert not Polynomial([1.5, 1j]).exact
    assert Polynomial([1, 2]) == Polynomial([1.0, 2.0])
    assert Polynomial([gq(1, 1)]).norm2_sq() == 2


def test_shift_down_examples():
    assert shift_down(Polynomial([1, 2, 3])) == Polynomial([2, 3])
    assert shift_down(Polynomial([5])) == Polynomial([])
    zd = Polynomial([0] * 4 + [1])
    assert shift_down(zd, 3) == Polynomial([0, 1])
    assert shift_down(zd, 6) == Polynomial([])


def test_mz_pow_examples():
    assert mz_pow(Polynomial([1]), 1, 1) == Polynomial([0, 1])
    assert mz_pow(Polynomial([1, 1]), 2, 3) == Polynomial([0] * 6 + [1, 1])
    p = Polynomial([3, gq(0, 1), 2])
    assert shift_down(mz_pow(p, 1, 4), 4) == p


def test_eval_examples():
    t = gen.counterexample_3x3(exact=True)
    x0 = la.as_vector([1, 1, 0], exact=True)
    assert np.array_equal(eval_operator_poly(Polynomial([1]), t, x0), x0)
    assert np.array_equal(eval_operator_poly(Polynomial([0, 0, 1]), t, x0), t @ t @ x0)
    assert np.array_equal(eval_operator_poly(Polynomial([1, 1]), t, x0),
                          la.as_vector([2, 3, 1], exact=True))
    assert la.is_zero(eval_operator_poly(Polynomial([]), t, x0))


def test_lifted_norm_examples():
    ctx = one_ctx()
    assert lifted_norm_sq(Polynomial([]), ctx) == 0
    assert lifted_norm_sq(Polynomial([1, 1]), ctx) == 7
    u = gen.rotation_exact(1)
    x0 = la.as_vector([1, 2], exact=True)
    for d in range(5):
        zd = Polynomial([0] * d + [1])
        assert lifted_norm_sq(zd, LiftContext(u, 1, x0)) == 1 + (d + 1) * 5


def test_context_validation():
    with pytest.raises(DomainError):
        LiftContext(np.eye(2), 1, np.zeros(2))
    with pytest.raises(DomainError):
        LiftContext(np.eye(2), 0, np.ones(2))
    with pytest.raises(DomainError):
        LiftContext(np.eye(2), 1, np.ones(3))
    mixed = LiftContext(np.eye(2), 1, la.as_vector([1, 0], exact=True))
    assert mixed.exact


def test_lifted_beta_examples():
    ctx = one_ctx()
    p = Polynomial([1, gq(2, -1), 3])
    assert lifted_beta(ctx, 0, p) == lifted_norm_sq(p, ctx)
    assert lifted_beta(ctx, 2, p) == 0
    assert lifted_beta(ctx, 1, Polynomial([1])) == 1


def test_power_identity_examples():
    ctx = one_ctx()
    assert verify_power_identity(ctx, Polynomial([1]), 1) == 0
    # |||z^2 (1+z)|||^2 = 7 + 4 + 4
    assert lifted_norm_sq(mz_pow(Polynomial([1, 1]), 2, 1), ctx) == 15
    assert verify_power_identity(ctx, Polynomial([1, 1]), 2) == 0
    assert verify_power_identity(shift_ctx(), Polynomial([]), 3) == 0


def test_beta_reduction_examples():
    for p in (Polynomial([1, 2]), Polynomial([gq(0, 1), 0, 5])):
        assert verify_beta_reduction(one_ctx(), p, 1) == 0
    assert verify_beta_reduction(shift_ctx(), Polynomial([1]), 2) == 0
    assert verify_beta_reduction(shift_ctx(), Polynomial([]), 2) == 0
    with pytest.raises(DomainError):
        verify_beta_reduction(one_ctx(), Polynomial([1]), 0)


def test_hypothesis_examples():
    u = gen.random_unitary(3, 0)
    x0 = gen.random_vector(3, 1)
    h = hypothesis_check(LiftContext(u, 1, x0), 1)
    assert h.range_isometry
    assert h.strictness == pytest.approx(la.norm_sq(u @ x0))
    h = hypothesis_check(shift_ctx(), 3)
    assert h.range_isometry and h.strictness == 1.0
    ce = LiftContext(gen.counterexample_3x3(exact=True), 1, la.as_vector([1, 1, 0], exact=True))
    assert not hypothesis_check(ce, 3).range_isometry


def test_lift_check_examples():
    rep = lift_check(one_ctx(), 1)
    assert rep.passed and rep.strict and rep.strictness_witness == 1.0
    assert rep.order == 2 and all(r == 0 for r in rep.beta_residuals)
    rep = lift_check(shift_ctx(), 3)
    assert rep.passed and rep.order == 4 and rep.max_residual == 0
    assert rep.strictness_witness == pytest.approx(1 / 3)


def test_lift_check_precondition_errors():
    ce = LiftContext(gen.counterexample_3x3(exact=True), 1, la.as_vector([1, 1, 0], exact=True))
    with pytest.raises(PreconditionError) as err:
        lift_check(ce, 3)
    assert err.value.quantity == "compressed_defect"
    # x0 = e1 lies in the kernel of M, so beta_2(T, T e1) = 0: no strict lift
    degenerate = LiftContext(la.as_matrix([[1, 1], [0, 1]], exact=True), 1,
                             la.as_vector([1, 0], exact=True))
    with pytest.raises(PreconditionError) as err:
        lift_check(degenerate, 3)
    assert err.value.quantity == "strictness" and err.value.value == 0
    assert lift_check(degenerate, 3, require_strict=False).passed


def test_two_isometry_lifts_to_three_isometry():
    for exact in (True, False):
        rep = lift_check(one_ctx(exact), 2, require_strict=False)
        assert rep.passed and rep.order == 3


def test_float_path_matches_exact():
    ctx_e, ctx_f = shift_ctx(2), shift_ctx(2, exact=False)
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_polynomial(8, rng, exact=True)
        e = float(lifted_norm_sq(p, ctx_e))
        assert lifted_norm_sq(p.to_float(), ctx_f) == pytest.approx(e, rel=1e-12)


def test_random_polynomial_ranges():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = random_polynomial(8, rng)
        assert p.degree <= 8
        assert all(abs(c.real) <= 1 and abs(c.imag) <= 1 for c in p.coeffs)
        q = random_polynomial(8, rng, exact=True)
        assert all(c.real.denominator in (1, 2, 4, 8) for c in q.coeffs)


@given(polys)
def test_shift_inverts_multiplication(p):
    assert shift_down(mz_pow(p, 1, 1)) == p
    q = mz_pow(shift_down(p), 1, 1)
    minus_const = Polynomial((0,) + p.coeffs[1:]) if p.coeffs else p
    assert q == minus_const


@given(polys, st.integers(1, 3))
def test_lifted_norm_matches_oracle_and_dominates_l2(p, k):
    ctx = builder_ctx(k)
    val = lifted_norm_sq(p, ctx)
    assert val == norm_oracle(p, ctx)
    assert val >= p.norm2_sq()


@given(polys, st.integers(1, 2), st.integers(1, 5))
def test_power_identity_exact(p, k, j):
    assert verify_power_identity(builder_ctx(k), p, j) == 0


@given(polys, st.integers(1, 2), st.integers(1, 4))
def test_beta_reduction_exact(p, k, ell):
    assert verify_beta_reduction(builder_ctx(k), p, ell) == 0


@given(seeds, st.integers(1, 2))
def test_lift_is_m_plus_one_isometry(seed, k):
    ctx = builder_ctx(k, seed)
    if hypothesis_check(ctx, 3).strictness == 0:
        return
    rep = lift_check(ctx, 3, max_degree=6, trials=5, seed=seed)
    assert rep.passed and rep.max_residual == 0 and rep.strictness_witness > 0


def test_equality_case_of_norm_bound():
    # T x0 = 0 and k = 2: for p = z the only evaluated term is T x0 = 0
    ctx = LiftContext(la.as_matrix([[0, 0], [0, 1]], exact=True), 2,
                      la.as_vector([1, 0], exact=True))
    p = Polynomial([0, 1])
    assert lifted_norm_sq(p, ctx) == p.norm2_sq()
    q = Polynomial([0, 0, 3])
    assert lifted_norm_sq(q, ctx) == q.norm2_sq() + 9
