"""Closed-form determinant moments and integral-geometric constants.

All Gamma products are accumulated as sums of ``gammaln`` and exponentiated
once.  Sphere areas at non-integer dimension use the Gamma formula directly,
which is how the moment formulas are continued to non-integer exponents.

Moment functions take the exponent ``q`` and evaluate the formulas at the
effective ambient dimension ``n = N + q / beta``.
"""
from __future__ import annotations

from math import comb, exp, lgamma, log, pi

import numpy as np
from scipy.special import betaln, digamma, gammaln

from .numfield import as_beta
from .query import Mode, MomentQuery
from .samplers import DistKind, as_dist

LOG_PI = log(pi)
AGREE_TOL = 1e-12
MAX_DIM = 1000


# -- sphere, ball, Stiefel and Grassmann volumes ---------------------------


def log_sphere_area(l: float) -> float:
    """``log sigma_l`` with ``sigma_l = 2 pi^{l/2} / Gamma(l/2)``; any real ``l > 0``."""
    if l <= 0:
        raise ValueError(f"sphere dimension must be positive, got {l}")
    return log(2.0) + 0.5 * l * LOG_PI - float(gammaln(0.5 * l))


def sphere_area(l: float) -> float:
    """Surface area of the unit sphere in R^l."""
    return exp(log_sphere_area(l))


def ball_volume(k: int) -> float:
    """Volume of the unit ball in R^k; ``kappa_0 = 1``."""
    if k == 0:
        return 1.0
    if k < 0:
        raise ValueError("k must be nonnegative")
    return sphere_area(k) / k


def _check_nN(n, N):
    if N < 1 or n < N:
        raise ValueError(f"need n >= N >= 1, got n={n}, N={N}")
    if n > MAX_DIM:
        raise ValueError(f"n={n} exceeds the supported range (<= {MAX_DIM})")


def log_stiefel_volume(beta, n, N) -> float:
    beta = as_beta(beta)
    _check_nN(n, N)
    return sum(log_sphere_area(beta * (n - i + 1)) for i in range(1, N + 1))


def stiefel_volume(beta, n: int, N: int) -> float:
    """Volume of the Stiefel manifold of orthonormal ``N``-frames in F_beta^n."""
    return exp(log_stiefel_volume(beta, n, N))


def _log_sigma_ratio(beta, n, N) -> float:
    """``sum_i log sigma_{beta(n-i+1)} - log sigma_{beta(N-i+1)}``; ``n`` may be real."""
    return sum(
        log_sphere_area(beta * (n - i + 1)) - log_sphere_area(beta * (N - i + 1))
        for i in range(1, N + 1)
    )


def log_grassmann_volume(beta, n, N) -> float:
    beta = as_beta(beta)
    _check_nN(n, N)
    return _log_sigma_ratio(beta, n, N)


def grassmann_volume(beta, n: int, N: int) -> float:
    """Volume of the Grassmannian of ``N``-planes in F_beta^n."""
    return exp(log_grassmann_volume(beta, n, N))


# -- linear moments ----------------------------------------------------------


def _log_linear_moment(dist: DistKind, beta: int, N: int, q: float) -> float:
    n = N + q / beta
    out = -_log_sigma_ratio(beta, n, N)
    if dist is DistKind.BALL:
        out += N * (log(N) - log(n) + log_sphere_area(beta * n) - log_sphere_area(beta * N))
    elif dist is DistKind.SPHERE:
        out += N * (log_sphere_area(beta * n) - log_sphere_area(beta * N))
    else:
        out += 0.5 * beta * N * (n - N) * LOG_PI
    return out


def linear_moment(dist, beta, N: int, q: float) -> float:
    """``E |det M|^q`` for an ``N x N`` matrix with iid columns of law ``dist``.

    Columns are uniform in the unit ball, uniform on the unit sphere, or
    Gaussian with weight ``exp(-||m||^2)``.  Valid for real ``q > -beta``.
    """
    dist, beta = as_dist(dist), int(as_beta(beta))
    if q <= -beta:
        raise ValueError(f"linear moments need q > -beta = {-beta}, got {q}")
    if q == 0:
        return 1.0
    return exp(_log_linear_moment(dist, beta, N, q))


def linear_ratio(dist, beta, n: int, N: int, h: float) -> float:
    """``E (det M^dagger M)^{h/2}`` for an ``n x N`` matrix with iid columns in F_beta^n."""
    dist, beta = as_dist(dist), int(as_beta(beta))
    _check_nN(n, N)
    q = h + beta * (n - N)
    if q <= -beta:
        raise ValueError(f"h={h} out of range for n={n}, N={N}")
    if h == 0:
        return 1.0
    out = _log_sigma_ratio(beta, n, N) + _log_linear_moment(dist, beta, N, q)
    if dist is DistKind.BALL:
        out += N * (log(n) + log_sphere_area(beta * N) - log(N) - log_sphere_area(beta * n))
    elif dist is DistKind.SPHERE:
        out += N * (log_sphere_area(beta * N) - log_sphere_area(beta * n))
    else:
        out -= 0.5 * beta * N * (n - N) * LOG_PI
    return exp(out)


# -- affine moments ----------------------------------------------------------


def _log_two_over_sigma_beta(a: float, b: float) -> float:
    """``log(2 / (sigma_{2a} B(a, b)))`` with the ``Gamma(a)`` factors cancelled.

    Finite at ``a = 0``, where it equals ``0``.
    """
    return -a * LOG_PI - float(gammaln(b)) + float(gammaln(a + b))


def _log_affine_moment(dist: DistKind, beta: int, N: int, q: float, printed: bool) -> float:
    n = N + q / beta
    a = 0.5 * q
    out = -_log_sigma_ratio(beta, n, N)
    if dist is DistKind.GAUSS:
        out += 0.5 * q * (log(N + 1) - LOG_PI)
        out += 0.5 * beta * (N + 1) * (n - N) * LOG_PI
        return out
    # beta N (n + 1) / 2 written in terms of q; going through n cancels
    # badly when b is near 0 (sphere, beta = N = 1, small q)
    b0 = 0.5 * beta * N * (N + 1)
    if dist is DistKind.BALL:
        b = (b0 + 1) + 0.5 * N * q
        out += (N + 1) * (log(N) - log(n) + log_sphere_area(beta * n) - log_sphere_area(beta * N))
    else:
        b = (b0 + (1 if printed else -N)) + 0.5 * N * q
        out += (N + 1) * (log_sphere_area(beta * n) - log_sphere_area(beta * N))
    return out + _log_two_over_sigma_beta(a, b)


def affine_moment(dist, beta, N: int, q: float, *, printed_form: bool = False) -> float:
    """``E |det[m_k - m_0]|^q`` for ``N + 1`` iid points in F_beta^N.

    For the sphere law the second Euler-beta argument is
    ``beta N (n + 1) / 2 - N``; ``printed_form=True`` substitutes
    ``beta N (n + 1) / 2 + 1`` instead, which disagrees with direct
    computation (e.g. it gives 6 rather than 2 for ``E |x - y|^2`` with
    ``x, y`` uniform on ``{-1, 1}``).
    """
    dist, beta = as_dist(dist), int(as_beta(beta))
    if N < 1:
        raise ValueError("N must be >= 1")
    if q < 0:
        raise ValueError(f"affine moments need q >= 0, got {q}")
    if q == 0:
        return 1.0
    return exp(_log_affine_moment(dist, beta, N, q, printed_form))


def _log_ratio_correction(dist: DistKind, beta: int, n: int, N: int, h: float) -> float:
    a = 0.5 * beta * (n - N)
    if dist is DistKind.GAUSS or a == 0:
        return 0.0
    if dist is DistKind.BALL:
        b = 0.5 * beta * N * (n + 1) + 1
    else:
        b = 0.5 * beta * N * (n + 1) - N
    return float(betaln(a, b + 0.5 * N * h) - betaln(a, b))


def affine_ratio(dist, beta, n: int, N: int, h: float, *, printed_form: bool = False) -> float:
    """``E (det V^dagger V)^{h/2}`` with ``V = [m_k - m_0]`` for ``N + 1`` iid points in F_beta^n.

    Obtained from ratios of ``N x N`` affine moments.  For the ball and
    sphere laws the ratio is multiplied by an Euler-beta factor coming from
    the ``h``-dependence of the radial integral over the orthogonal
    complement; ``printed_form=True`` drops that factor.
    """
    dist, beta = as_dist(dist), int(as_beta(beta))
    _check_nN(n, N)
    if h < 0:
        raise ValueError(f"affine ratios need h >= 0, got {h}")
    base = beta * (n - N)
    out = _log_affine_moment(dist, beta, N, h + base, False) if h + base > 0 else 0.0
    if base > 0:
        out -= _log_affine_moment(dist, beta, N, base, False)
    if not printed_form:
        out += _log_ratio_correction(dist, beta, n, N, h)
    return exp(out)


def pair_distance_moment(beta, n: int, h: float) -> float:
    """``E ||m_1 - m_0||^h`` for two Gaussian points in F_beta^n.

    Depends on ``beta`` and ``n`` only through ``beta * n``.
    """
    beta = int(as_beta(beta))
    if h <= -beta * n:
        raise ValueError(f"need h > -beta n = {-beta * n}")
    d = beta * n
    value = exp(0.5 * h * log(2.0) + float(gammaln(0.5 * (d + h)) - gammaln(0.5 * d)))
    if h >= 0:
        check = affine_ratio(DistKind.GAUSS, beta, n, 1, h)
        if abs(check - value) > AGREE_TOL * value:
            raise ArithmeticError(f"pair-distance routes disagree: {value!r} vs {check!r}")
    return value


# -- specialisations ---------------------------------------------------------


def kingman_q_beta(beta, N: int) -> float:
    """``E |det[m_k - m_0]|^beta`` for ``N + 1`` uniform points in the unit ball of F_beta^N."""
    b = int(as_beta(beta)) / 2
    out = (
        lgamma(b * (N + 1) ** 2 + 1)
        + lgamma(b * (N + 1))
        - lgamma(b)
        - lgamma(b * N * (N + 2) + 1)
        + (N + 1) * (lgamma(b * N + 1) - lgamma(b * (N + 1) + 1))
    )
    value = exp(out)
    check = affine_moment(DistKind.BALL, beta, N, int(beta))
    if abs(check - value) > AGREE_TOL * value:
        raise ArithmeticError(f"Kingman display disagrees with the affine moment: {value!r} vs {check!r}")
    return value


def _log_binom(x: float, k: float) -> float:
    return lgamma(x + 1) - lgamma(k + 1) - lgamma(x - k + 1)


def kingman_binomial(N: int) -> float:
    """Mean simplex-determinant implied by the binomial restatement of Kingman's formula.

    Returns ``N! sigma_N 2^{-N} C(N+1, (N+1)/2)^{N+1} / C((N+1)^2, (N+1)^2/2)``
    with Gamma-continued binomials.  Diagnostic only: it matches
    :func:`kingman_q_beta` at ``N = 1`` and not beyond, so it is never used
    as a reference value.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    m = N + 1
    log_rhs = -N * log(2.0) + m * _log_binom(m, m / 2) - _log_binom(m * m, m * m / 2)
    return exp(log_rhs + lgamma(N + 1) + log_sphere_area(N))


def efron_value(beta, N: int) -> float:
    """``E |det[m_k - m_0]|^beta / N!`` for ``N + 1`` Gaussian points in F_beta^N."""
    beta = int(as_beta(beta))
    b = beta / 2
    value = exp(b * log(N + 1) + lgamma(b * (N + 1)) - lgamma(N + 1) - lgamma(b))
    check = affine_moment(DistKind.GAUSS, beta, N, beta) / float(np.prod(np.arange(1, N + 1)))
    if abs(check - value) > AGREE_TOL * value:
        raise ArithmeticError(f"Efron display disagrees with the affine moment: {value!r} vs {check!r}")
    return value


def intrinsic_volume_prefactor(N: int, k: int) -> float:
    """``C(N, k) kappa_N / (kappa_k kappa_{N-k})``."""
    if not 0 <= k <= N:
        raise ValueError(f"need 0 <= k <= N, got k={k}, N={N}")
    return comb(N, k) * ball_volume(N) / (ball_volume(k) * ball_volume(N - k))


def intrinsic_volume_mean(N: int, k: int) -> float:
    """Mean ``k``-th intrinsic volume of the parallelepiped of an ``N x N`` real Gaussian matrix.

    Uses the normalised (Kubota) Grassmannian average, i.e. the prefactor
    :func:`intrinsic_volume_prefactor` times ``E (det M_k^T M_k)^{1/2}`` for
    the first ``k`` columns.
    """
    if not 0 <= k <= N:
        raise ValueError(f"need 0 <= k <= N, got k={k}, N={N}")
    if k == 0:
        return 1.0
    log_tail = 0.5 * k * LOG_PI + log_sphere_area(N - k + 1) - log_sphere_area(N + 1)
    return intrinsic_volume_prefactor(N, k) * exp(log_tail)


def gauss_mean_log_abs_det(beta, N: int) -> float:
    """``E log |det M|`` for Gaussian ``M``: ``sum_j psi(beta j / 2) / 2``."""
    beta = int(as_beta(beta))
    return 0.5 * float(np.sum(digamma(0.5 * beta * np.arange(1, N + 1))))


def mean_log_abs_det(dist, beta, N: int, step: float = 1e-4) -> float:
    """``E log |det M|`` as the derivative of ``log E |det M|^q`` at ``q = 0``.

    Central differences at ``step`` and ``step / 2`` combined by one
    Richardson extrapolation.  The Gaussian case is cross-checked against
    the digamma sum.
    """
    dist, beta = as_dist(dist), int(as_beta(beta))
    f = lambda q: _log_linear_moment(dist, beta, N, q)  # noqa: E731
    d1 = (f(step) - f(-step)) / (2 * step)
    d2 = (f(step / 2) - f(-step / 2)) / step
    value = (4 * d2 - d1) / 3
    if dist is DistKind.GAUSS:
        exact = gauss_mean_log_abs_det(beta, N)
        if abs(value - exact) > 1e-8:
            raise ArithmeticError(f"finite difference {value!r} vs digamma sum {exact!r}")
    return value


def induced_normalisation(beta, n: int, N: int) -> tuple[float, float]:
    """Both sides of the induced-ensemble normalisation.

    Returns ``(vol G * E_Gauss |det|^{beta (n - N)}, pi^{beta N (n - N) / 2})``.
    """
    beta = int(as_beta(beta))
    lhs = grassmann_volume(beta, n, N) * linear_moment(DistKind.GAUSS, beta, N, beta * (n - N))
    return lhs, exp(0.5 * beta * N * (n - N) * LOG_PI)


def closed_form(query: MomentQuery, *, printed_36prime: bool = False,
                printed_cor310: bool = False) -> float:
    """Reference value for a :class:`MomentQuery`."""
    d, b, n, N, x = query.dist, query.beta, query.ambient_n, query.inner_N, query.exponent
    if query.mode is Mode.LINEAR_SQUARE:
        return linear_moment(d, b, N, x)
    if query.mode is Mode.LINEAR_RECT:
        return linear_ratio(d, b, n, N, x)
    if query.mode is Mode.AFFINE_SQUARE:
        return affine_moment(d, b, N, x, printed_form=printed_36prime and d is DistKind.SPHERE)
    if printed_36prime and d is DistKind.SPHERE:
        base = b * (n - N)
        num = affine_moment(d, b, N, x + base, printed_form=True)
        den = affine_moment(d, b, N, base, printed_form=True) if base else 1.0
        value = num / den
        if not printed_cor310:
            value *= exp(_log_ratio_correction(d, b, n, N, x))
        return value
    return affine_ratio(d, b, n, N, x, printed_form=printed_cor310)

