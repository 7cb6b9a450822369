"""Monte Carlo estimators built from the samplers and linear algebra only.

Nothing in this module may import :mod:`betavol.closedform`; the test suite
checks that by parsing the imports.  Reference values enter only in
:mod:`betavol.mcverify.harness`.

Sample budgets are split into ``streams`` contiguous shares, share ``i``
drawn from ``rng.child(i)`` in fixed-size chunks, and the per-sample
statistics are concatenated in stream order.  The result therefore depends
on ``(seed, stream_id, streams)`` but not on the number of worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..betalinalg import (
    FMatrix,
    difference_matrix,
    gram_schmidt_qr,
    log_abs_det_beta,
    log_det_beta_gram,
    matmul,
    adjoint,
    trace_gram,
)
from ..query import Mode, MomentQuery
from ..samplers import RngStream, column_points, gaussian_matrix, haar_stiefel, product_chain

CHUNK = 50_000
MIN_SAMPLES = 100
HEAVY_TAIL_Q = 4.0
HEAVY_TAIL_SHARE = 0.05
LOG_FLOAT_MAX = float(np.log(np.finfo(float).max))


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error.

    ``max_share`` and ``top_share`` are filled for heavy-tailed moments:
    the largest single sample's and the top 1%'s share of the total.
    """

    mean: float
    stderr: float
    count: int
    seed: int
    streams: int = 1
    unstable: bool = False
    max_share: float | None = None
    top_share: float | None = None


def _split(total: int, parts: int) -> list[int]:
    base, rem = divmod(total, parts)
    return [base + (i < rem) for i in range(parts)]


def _chunks(count: int):
    while count > 0:
        step = min(CHUNK, count)
        yield step
        count -= step


def partitioned(draw, samples: int, rng: RngStream, streams: int = 1, workers: int = 1) -> np.ndarray:
    """Run ``draw(size, rng)`` over a partitioned sample budget and concatenate."""
    if streams < 1:
        raise ValueError("streams must be >= 1")

    def one(i, share):
        sub = rng.child(i)
        parts = [draw(step, sub) for step in _chunks(share)]
        return np.concatenate(parts) if parts else np.empty(0)

    shares = _split(samples, streams)
    if workers > 1 and streams > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(streams), shares))
    else:
        results = [one(i, s) for i, s in enumerate(shares)]
    return np.concatenate(results)


def summarize(values: np.ndarray, seed: int, streams: int = 1) -> Estimate:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("need at least two samples")
    return Estimate(
        mean=float(np.mean(values)),
        stderr=float(np.std(values, ddof=1) / np.sqrt(values.size)),
        count=int(values.size),
        seed=seed,
        streams=streams,
    )


def summarize_logs(logs: np.ndarray, exponent: float, seed: int, streams: int = 1) -> Estimate:
    """Estimate ``E exp(exponent * logs)`` without overflow.

    The samples are rescaled by their largest value before summing.  For
    ``exponent > 4`` the largest sample's share of the sum is reported, and
    a share above 5% marks the estimate as unstable.
    """
    logs = np.asarray(logs, dtype=float)
    if exponent == 0:
        return summarize(np.ones_like(logs), seed, streams)
    y = exponent * logs
    top = float(np.max(y))
    if top >= LOG_FLOAT_MAX:
        raise OverflowError(f"moment exceeds the floating-point range (log sample {top:.1f})")
    w = np.exp(y - top)
    total = float(np.sum(w))
    scale = np.exp(top)
    est = Estimate(
        mean=float(scale * total / w.size),
        stderr=float(scale * np.std(w, ddof=1) / np.sqrt(w.size)),
        count=int(w.size),
        seed=seed,
        streams=streams,
    )
    if exponent <= HEAVY_TAIL_Q:
        return est
    max_share = 1.0 / total
    k = max(1, w.size // 100)
    top_share = float(np.sum(np.partition(w, w.size - k)[-k:]) / total)
    return Estimate(est.mean, est.stderr, est.count, seed, streams,
                    unstable=max_share > HEAVY_TAIL_SHARE,
                    max_share=max_share, top_share=top_share)


def log_statistic(query: MomentQuery, size: int, rng: RngStream) -> np.ndarray:
    """Per-sample ``log |det|`` (square) or ``log det(M^dagger M) / 2`` (rectangular)."""
    b, n, N = query.beta, query.ambient_n, query.inner_N
    count = N + 1 if query.mode.affine else N
    pts = column_points(query.dist, b, n, count, rng, size)
    m = difference_matrix(pts) if query.mode.affine else pts
    if query.mode.square:
        return np.asarray(log_abs_det_beta(m))
    return 0.5 * np.asarray(log_det_beta_gram(m))


def estimate_moment(query: MomentQuery, samples: int, rng: RngStream,
                    streams: int = 1, workers: int = 1) -> Estimate:
    """Monte Carlo estimate of the moment described by ``query``."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    logs = partitioned(lambda size, r: log_statistic(query, size, r), samples, rng, streams, workers)
    return summarize_logs(logs, query.exponent, rng.seed, streams)


def gauss_gram_power(beta, n: int, N: int, power: float, samples: int, rng: RngStream,
                     streams: int = 1, workers: int = 1) -> Estimate:
    """``E (det_beta M^dagger M)^power`` for Gaussian ``n x N`` matrices."""
    mode = Mode.LINEAR_SQUARE if n == N else Mode.LINEAR_RECT
    exponent = 2 * power
    query = MomentQuery("gauss", beta, n, N, exponent, mode)
    return estimate_moment(query, samples, rng, streams, workers)


def bp_weight(beta, n: int, N: int, alpha: float, size: int, rng: RngStream) -> np.ndarray:
    """Per-sample ``exp(-alpha ||row_1(A M)||^2) |det M|^{beta (n - N)}``.

    ``A`` is a Haar ``n x N`` frame and ``M`` an ``N x N`` Gaussian matrix.
    """
    frame = haar_stiefel(beta, n, N, rng, size)
    m = gaussian_matrix(beta, N, N, rng, size)
    am = frame @ m
    first_row = FMatrix(beta, am.data[..., :1, :, :] if beta == 4 else am.data[..., :1, :])
    row_sq = np.asarray(trace_gram(first_row))
    log_w = -alpha * row_sq + beta * (n - N) * np.asarray(log_abs_det_beta(m))
    return np.exp(log_w)


def estimate_bp_weight(beta, n: int, N: int, alpha: float, samples: int, rng: RngStream,
                       streams: int = 1, workers: int = 1) -> Estimate:
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    values = partitioned(lambda size, r: bp_weight(beta, n, N, alpha, size, r),
                         samples, rng, streams, workers)
    return summarize(values, rng.seed, streams)


def affine_split_residual(points: FMatrix) -> float:
    """Largest defect of ``||v_k||^2 = ||v_k^N||^2 + ||r||^2`` over the points.

    ``points`` holds ``N + 1`` points in F_beta^n as columns (``n > N``),
    optionally batched.  ``B`` is an orthonormal basis of the span of the
    differences, ``v_k^N = B^dagger v_k`` and ``r = v_0 - B v_0^N``.  Also
    verifies that ``r`` is common to all points.
    """
    beta = points.beta
    basis = gram_schmidt_qr(difference_matrix(points)).q_factor
    coords = matmul(adjoint(basis), points)
    inside = basis @ coords
    perp = points - inside
    if beta == 4:
        r0 = perp.data[..., :, :1, :]
    else:
        r0 = perp.data[..., :, :1]
    spread = float(np.max(np.abs(perp.data - r0), initial=0.0))
    total = _col_sq(points)
    parts = _col_sq(coords) + _col_sq(perp)
    scale = max(1.0, float(np.max(total)))
    return max(spread, float(np.max(np.abs(total - parts))) / scale)


def _col_sq(m: FMatrix) -> np.ndarray:
    return m.column_norms() ** 2


def lyapunov_qr_estimate(beta, N: int, t: int, reps: int, rng: RngStream,
                         streams: int = 1, workers: int = 1) -> Estimate:
    """Mean over ``reps`` chains of ``log |det L_t| / t``.

    Its limit is the sum of the Lyapunov exponents of the Gaussian product.
    """
    if t < 100 or reps < 10:
        raise ValueError("need t >= 100 and reps >= 10")

    def draw(size, r):
        return np.atleast_1d(product_chain(beta, N, t, r, size)) / t

    shares = _split(reps, streams)
    if min(shares) < 1:
        raise ValueError("more streams than repetitions")
    values = partitioned(draw, reps, rng, streams, workers)
    return summarize(values, rng.seed, streams)
