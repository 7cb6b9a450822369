"""Closed forms against hand-derived values: explicit constants,
elementary integrals and Gamma products written out inline."""
import math
from math import gamma, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import digamma

import betavol.closedform as cf
from betavol.query import Mode, MomentQuery

EULER_GAMMA = 0.5772156649015329


def rel(x, tol=1e-12):
    return pytest.approx(x, rel=tol)


# -- volumes -----------------------------------------------------------------

def test_sphere_areas_and_balls():
    assert cf.sphere_area(1) == rel(2)
    assert cf.sphere_area(2) == rel(2 * pi)
    assert cf.sphere_area(4) == rel(2 * pi**2)
    assert cf.ball_volume(0) == 1
    assert cf.ball_volume(1) == rel(2)
    assert cf.ball_volume(2) == rel(pi)
    assert cf.ball_volume(3) == rel(4 * pi / 3)


def test_stiefel_and_grassmann():
    assert cf.stiefel_volume(1, 2, 1) == rel(2 * pi)
    assert cf.stiefel_volume(2, 1, 1) == rel(2 * pi)
    assert cf.stiefel_volume(1, 3, 3) == rel(16 * pi**2)
    assert cf.grassmann_volume(1, 2, 1) == rel(pi)
    assert cf.grassmann_volume(1, 3, 1) == rel(2 * pi)
    for beta in (1, 2, 4):
        assert cf.grassmann_volume(beta, 4, 4) == rel(1)


def test_large_dimensions_stay_finite():
    assert math.isfinite(cf.log_stiefel_volume(1, 400, 3))
    assert cf.stiefel_volume(1, 400, 3) == 0.0 or math.isfinite(cf.stiefel_volume(1, 400, 3))
    with pytest.raises(ValueError):
        cf.stiefel_volume(1, 2, 3)


# -- linear moments ------------------------------------------------------------

def test_linear_moment_examples():
    assert cf.linear_moment("ball", 1, 1, 1) == rel(1 / 2)
    assert cf.linear_moment("ball", 1, 2, 1) == rel(8 / (9 * pi))
    assert cf.linear_moment("sphere", 1, 2, 1) == rel(2 / pi)
    assert cf.linear_moment("gauss", 1, 1, 2) == rel(1 / 2)
    assert cf.linear_moment("gauss", 2, 1, 2) == rel(1)
    assert cf.linear_moment("gauss", 2, 2, 2) == rel(2)


def test_gauss_moment_against_chi_products():
    # |det M|^2 for Gaussian M is a product of independent Gamma(beta(N-j+1)/2) variables
    for beta in (1, 2, 4):
        for N in (1, 2, 3):
            for q in (0.7, 1.0, 2.0, 3.5):
                expect = math.prod(gamma(beta * j / 2 + q / 2) / gamma(beta * j / 2) for j in range(1, N + 1))
                assert cf.linear_moment("gauss", beta, N, q) == rel(expect)


def test_ball_and_sphere_one_dimensional_integrals():
    for q in (0.7, 1.3, 2.0):
        ball = integrate.quad(lambda x: abs(x) ** q / 2, -1, 1)[0]
        assert cf.linear_moment("ball", 1, 1, q) == rel(ball, 1e-10)
        assert cf.linear_moment("sphere", 1, 1, q) == rel(1)
        # complex unit disk: E r^q = 2 / (q + 2)
        assert cf.linear_moment("ball", 2, 1, q) == rel(2 / (q + 2))


def test_linear_moment_domain():
    assert cf.linear_moment("ball", 4, 3, 0) == 1
    with pytest.raises(ValueError):
        cf.linear_moment("gauss", 1, 2, -1)
    assert math.isfinite(cf.linear_moment("gauss", 2, 2, -1.5))


def test_linear_ratio_examples():
    for d in ("ball", "sphere", "gauss"):
        for beta in (1, 2, 4):
            assert cf.linear_ratio(d, beta, 3, 2, 0) == 1
    assert cf.linear_ratio("ball", 1, 2, 1, 2) == rel(1 / 2)
    assert cf.linear_ratio("gauss", 1, 2, 1, 2) == rel(1)
    for beta in (1, 2, 4):
        for n in (1, 2, 3):
            for h in (0.7, 1, 2):
                assert cf.linear_ratio("sphere", beta, n, 1, h) == rel(1)


def test_linear_ratio_square_case_is_linear_moment():
    for d in ("ball", "sphere", "gauss"):
        assert cf.linear_ratio(d, 2, 3, 3, 1.3) == rel(cf.linear_moment(d, 2, 3, 1.3))


def test_gauss_linear_ratio_against_gamma_product():
    # det(M^dagger M) for an n x N Gaussian factors into Gamma(beta(n-j+1)/2) variables
    for beta in (1, 2, 4):
        for n, N in ((2, 1), (3, 2), (5, 2)):
            h = 1.3
            expect = math.prod(gamma(beta * (n - j + 1) / 2 + h / 2) / gamma(beta * (n - j + 1) / 2)
                               for j in range(1, N + 1))
            assert cf.linear_ratio("gauss", beta, n, N, h) == rel(expect)


# -- affine moments -------------------------------------------------------------

def test_affine_moment_examples():
    assert cf.affine_moment("ball", 1, 1, 1) == rel(2 / 3)
    assert cf.affine_moment("ball", 1, 2, 1) == rel(35 / (24 * pi))
    assert cf.affine_moment("sphere", 1, 2, 1) == rel(3 / pi)
    assert cf.affine_moment("sphere", 1, 1, 2) == rel(2)
    assert cf.affine_moment("gauss", 1, 1, 1) == rel(sqrt(2 / pi))
    assert cf.affine_moment("gauss", 1, 2, 1) == rel(sqrt(3) / 2)


def test_printed_sphere_argument_disagrees():
    assert cf.affine_moment("sphere", 1, 1, 2, printed_form=True) == rel(6)
    assert cf.affine_moment("sphere", 2, 1, 2, printed_form=True) == rel(4)
    assert abs(cf.affine_moment("sphere", 1, 2, 1, printed_form=True) - 3 / pi) > 0.5


def test_affine_interval_integrals():
    # E|x - y|^q for x, y uniform on [-1, 1]; |x - y| has density (2 - d) / 2 on [0, 2]
    for q in (0.7, 1.3, 2.0, 3.0):
        expect = integrate.quad(lambda d: d**q * (2 - d) / 2, 0, 2)[0]
        assert cf.affine_moment("ball", 1, 1, q) == rel(expect, 1e-10)
        assert expect == rel(2 ** (q + 1) / ((q + 1) * (q + 2)), 1e-10)
    # E|x - y|^q on {-1, 1}: half the time 0, half 2^q
    for q in (0.7, 1.0, 2.5):
        assert cf.affine_moment("sphere", 1, 1, q) == rel(2**q / 2)


def test_affine_ratio_examples():
    for d in ("ball", "sphere", "gauss"):
        assert cf.affine_ratio(d, 2, 3, 1, 0) == rel(1)
    assert cf.affine_ratio("gauss", 1, 2, 1, 2) == rel(2)
    assert cf.affine_ratio("gauss", 1, 3, 1, 2) == rel(3)
    assert cf.affine_ratio("ball", 1, 2, 1, 2) == rel(1)
    assert cf.affine_ratio("sphere", 1, 2, 1, 2) == rel(2)
    beta, n, h = 2, 3, 1.3
    expect = 2 ** (h / 2) * gamma((beta * n + h) / 2) / gamma(beta * n / 2)
    assert cf.affine_ratio("gauss", beta, n, 1, h) == rel(expect)


def test_affine_ratio_plain_form():
    assert cf.affine_ratio("ball", 1, 2, 1, 2, printed_form=True) == rel(6 / 5)
    assert cf.affine_ratio("sphere", 1, 2, 1, 2, printed_form=True) == rel(4)
    assert cf.affine_ratio("gauss", 1, 2, 1, 2, printed_form=True) == rel(2)


def test_pair_distance():
    assert cf.pair_distance_moment(1, 2, 2) == rel(2)
    assert cf.pair_distance_moment(1, 1, 2) == rel(1)
    assert cf.pair_distance_moment(2, 1, 2) == rel(2)
    for m in (1, 2, 3):
        for h in (0.5, 1, 2, 4):
            assert cf.pair_distance_moment(1, 2 * m, h) == cf.pair_distance_moment(2, m, h)
            assert cf.pair_distance_moment(2, 2 * m, h) == cf.pair_distance_moment(4, m, h)


# -- specialisations --------------------------------------------------------------

def test_kingman_and_efron():
    assert cf.kingman_q_beta(1, 1) == rel(2 / 3)
    assert cf.kingman_q_beta(2, 1) == rel(1)
    assert cf.kingman_q_beta(1, 2) == rel(35 / (24 * pi))
    assert cf.efron_value(1, 2) == rel(sqrt(3) / 4)
    assert cf.efron_value(1, 1) == rel(sqrt(2 / pi))
    assert cf.efron_value(2, 1) == rel(2)
    for beta in (1, 2, 4):
        for N in (1, 2, 3, 4):
            assert cf.kingman_q_beta(beta, N) == rel(cf.affine_moment("ball", beta, N, beta))
            assert cf.efron_value(beta, N) * math.factorial(N) == rel(cf.affine_moment("gauss", beta, N, beta))


def test_kingman_binomial_is_only_a_diagnostic():
    assert cf.kingman_binomial(1) == rel(cf.kingman_q_beta(1, 1))
    assert abs(cf.kingman_binomial(2) - cf.kingman_q_beta(1, 2)) > 0.1


def test_intrinsic_volumes():
    for N in (1, 2, 3):
        assert cf.intrinsic_volume_mean(N, 0) == 1
    assert cf.intrinsic_volume_mean(1, 1) == rel(1 / sqrt(pi))
    assert cf.intrinsic_volume_mean(2, 2) == rel(1 / 2)
    assert cf.intrinsic_volume_mean(2, 1) == rel(pi**1.5 / 4)
    assert cf.intrinsic_volume_mean(2, 2) == rel(cf.linear_moment("gauss", 1, 2, 1))
    with pytest.raises(ValueError):
        cf.intrinsic_volume_mean(2, 3)


def test_mean_log_abs_det():
    assert cf.mean_log_abs_det("gauss", 1, 1) == pytest.approx(digamma(0.5) / 2, abs=1e-8)
    assert cf.mean_log_abs_det("gauss", 1, 1) == pytest.approx(-0.981755, abs=1e-6)
    assert cf.mean_log_abs_det("gauss", 2, 1) == pytest.approx(-EULER_GAMMA / 2, abs=1e-8)
    assert cf.mean_log_abs_det("ball", 1, 1) == pytest.approx(-1, abs=1e-8)
    assert cf.gauss_mean_log_abs_det(1, 2) == pytest.approx((digamma(0.5) + digamma(1)) / 2, rel=1e-14)
    # E log r for the complex unit disk: int_0^1 2 r log r dr = -1/2
    assert cf.mean_log_abs_det("ball", 2, 1) == pytest.approx(-0.5, abs=1e-8)


# -- invariants -----------------------------------------------------------------

def test_induced_normalisation_grid():
    for beta in (1, 2, 4):
        for N in range(1, 5):
            for n in range(N, N + 5):
                lhs, rhs = cf.induced_normalisation(beta, n, N)
                assert lhs == rel(rhs)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["ball", "sphere", "gauss"]), st.sampled_from([1, 2, 4]),
       st.integers(1, 4), st.floats(0.05, 6))
def test_moments_positive_and_log_convex(dist, beta, N, q):
    f = lambda x: cf.linear_moment(dist, beta, N, x)  # noqa: E731
    lo, mid, hi = f(q), f(q + 0.5), f(q + 1)
    assert lo > 0 and mid > 0
    assert math.log(mid) <= (math.log(lo) + math.log(hi)) / 2 + 1e-12


def test_continuity_at_zero():
    for dist in ("ball", "sphere", "gauss"):
        for beta in (1, 2, 4):
            for N in (1, 2, 3):
                assert abs(cf.linear_moment(dist, beta, N, 1e-9) - 1) < 1e-8
                if (dist, beta, N) != ("sphere", 1, 1):
                    assert abs(cf.affine_moment(dist, beta, N, 1e-9) - 1) < 1e-8
                # at q = 1e-6 the leading term q * E log|det| is visible; the remainder is O(q^2)
                q, slope = 1e-6, cf.mean_log_abs_det(dist, beta, N)
                assert abs(cf.linear_moment(dist, beta, N, q) - 1 - q * slope) < 1e-8


def test_two_point_sphere_has_an_atom_at_zero():
    # x = y with probability 1/2, so the moment tends to 1/2 rather than 1 as q -> 0+
    assert cf.affine_moment("sphere", 1, 1, 1e-9) == pytest.approx(0.5, abs=1e-8)
    assert cf.affine_moment("sphere", 1, 1, 0) == 1


def test_affine_moment_rejects_negative():
    with pytest.raises(ValueError):
        cf.affine_moment("ball", 1, 2, -0.5)
    with pytest.raises(ValueError):
        cf.affine_ratio("ball", 1, 3, 2, -1)


def test_closed_form_dispatch():
    q = MomentQuery.square("ball", 1, 2, 1, affine=True)
    assert cf.closed_form(q) == rel(35 / (24 * pi))
    q = MomentQuery("sphere", 1, 2, 1, 2, Mode.AFFINE_RECT)
    assert cf.closed_form(q) == rel(2)
    assert cf.closed_form(q, printed_cor310=True) == rel(4)
    q = MomentQuery.square("sphere", 1, 1, 2, affine=True)
    assert cf.closed_form(q, printed_36prime=True) == rel(6)


def test_query_validation():
    with pytest.raises(ValueError):
        MomentQuery("ball", 1, 2, 3, 1, Mode.LINEAR_RECT)
    with pytest.raises(ValueError):
        MomentQuery("ball", 1, 3, 2, 1, Mode.LINEAR_SQUARE)
    with pytest.raises(ValueError):
        MomentQuery("ball", 1, 2, 2, -1, Mode.AFFINE_SQUARE)
    with pytest.raises(ValueError):
        MomentQuery("ball", 2, 2, 2, -2, Mode.LINEAR_SQUARE)
    with pytest.raises(ValueError):
        MomentQuery("ball", 3, 2, 2, 1, Mode.LINEAR_SQUARE)
