"""Seeded random generation of every distribution averaged over.

All samplers take an :class:`RngStream` and an optional ``size`` giving
leading batch axes, so ``gaussian_matrix(beta, n, N, rng, size=10**5)`` is
one vectorised draw of ``10**5`` matrices.

The bit generator is Philox (counter based).  A stream is keyed by
``SeedSequence(seed, spawn_key=(stream_id, *path))``, so the draws for a given
``(seed, stream_id)`` do not depend on how many other streams exist.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .betalinalg import FMatrix, RankDeficiencyError, gram, gram_schmidt_qr, psd_sqrt
from .numfield import as_beta

GAUSS_VARIANCE = 0.5


class DistKind(str, enum.Enum):
    BALL = "ball"
    SPHERE = "sphere"
    GAUSS = "gauss"


def as_dist(value) -> DistKind:
    if isinstance(value, DistKind):
        return value
    try:
        return DistKind(str(value).lower())
    except ValueError:
        raise ValueError(f"unknown distribution {value!r}; expected ball, sphere or gauss") from None


@dataclass
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id, path)``.

    Not safe to share between concurrent consumers; derive one child per
    worker with :meth:`child` instead.
    """

    seed: int = 42
    stream_id: int = 0
    path: tuple[int, ...] = ()
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for v in (self.seed, self.stream_id, *self.path):
            if not 0 <= int(v) < 2**64:
                raise ValueError("seed and stream ids must be unsigned 64-bit integers")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), *self.path))
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.path, int(index)))


def _shape(size, *core) -> tuple[int, ...]:
    if size is None:
        return tuple(core)
    if np.ndim(size) == 0:
        return (int(size), *core)
    return (*tuple(int(s) for s in size), *core)


def _check_dims(**dims):
    for name, v in dims.items():
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def gaussian_matrix(beta, n: int, N: int, rng: RngStream, size=None) -> FMatrix:
    """Matrices with density ``pi^{-beta n N / 2} exp(-Tr M^dagger M)``.

    Every real component is ``N(0, 1/2)``.
    """
    beta = as_beta(beta)
    _check_dims(n=n, N=N)
    comps = rng.generator.normal(0.0, np.sqrt(GAUSS_VARIANCE), _shape(size, n, N, int(beta)))
    return FMatrix.from_components(beta, comps)


def _directions(beta: int, N: int, count: int, rng: RngStream, size) -> np.ndarray:
    g = rng.generator.standard_normal(_shape(size, N, count, beta))
    norms = np.sqrt(np.sum(g * g, axis=(-3, -1), keepdims=True))
    return g / norms


def sphere_points(beta, N: int, count: int, rng: RngStream, size=None) -> FMatrix:
    """``count`` uniform points on the unit sphere of F_beta^N, as matrix columns."""
    beta = as_beta(beta)
    _check_dims(N=N, count=count)
    return FMatrix.from_components(beta, _directions(int(beta), N, count, rng, size))


def ball_points(beta, N: int, count: int, rng: RngStream, size=None) -> FMatrix:
    """``count`` uniform points in the unit ball of F_beta^N, as matrix columns.

    Radius is ``U^{1/(beta N)}`` times a uniform direction.
    """
    beta = as_beta(beta)
    _check_dims(N=N, count=count)
    d = _directions(int(beta), N, count, rng, size)
    u = rng.generator.random(_shape(size, 1, count, 1))
    return FMatrix.from_components(beta, d * u ** (1.0 / (int(beta) * N)))


def column_points(dist, beta, N: int, count: int, rng: RngStream, size=None) -> FMatrix:
    """Dispatch to the ball, sphere or Gaussian column law."""
    dist = as_dist(dist)
    if dist is DistKind.BALL:
        return ball_points(beta, N, count, rng, size)
    if dist is DistKind.SPHERE:
        return sphere_points(beta, N, count, rng, size)
    return gaussian_matrix(beta, N, count, rng, size)


def haar_stiefel(beta, n: int, N: int, rng: RngStream, size=None) -> FMatrix:
    """Haar-distributed ``n x N`` frame: Gram-Schmidt of a Gaussian matrix.

    Gram-Schmidt produces a positive real diagonal in ``T``, which is the
    normalisation that makes the orthonormal factor exactly Haar.
    """
    if n < N:
        raise ValueError("haar_stiefel needs n >= N")
    return gram_schmidt_qr(gaussian_matrix(beta, n, N, rng, size)).q_factor


def induced_matrix(beta, n: int, N: int, rng: RngStream, size=None) -> tuple[FMatrix, FMatrix]:
    """Draw ``K = U (M^dagger M)^{1/2}`` from the induced ensemble.

    Returns ``(K, M)`` with ``M`` the ``n x N`` Gaussian source and ``U`` Haar
    on the ``N x N`` isometries.
    """
    if n < N:
        raise ValueError("induced_matrix needs n >= N")
    source = gaussian_matrix(beta, n, N, rng, size)
    u = haar_stiefel(beta, N, N, rng, size)
    k = u @ psd_sqrt(gram(source)).matrix
    return k, source


def product_chain(beta, N: int, t: int, rng: RngStream, size=None) -> np.ndarray | float:
    """Accumulate ``log |det L_t|`` for ``L_t = M_t ... M_1`` with Gaussian factors.

    The product is never formed: each factor multiplies a running orthonormal
    frame, which is re-factored by QR, and the logs of the triangular
    diagonals are summed.

    Raises
    ------
    RankDeficiencyError
        With ``step`` set to the (1-based) failing factor.
    """
    beta = as_beta(beta)
    _check_dims(N=N, t=t)
    frame = FMatrix.identity(beta, N)
    total = np.zeros(_shape(size))
    for step in range(1, t + 1):
        x = gaussian_matrix(beta, N, N, rng, size) @ frame
        try:
            qr = gram_schmidt_qr(x)
        except RankDeficiencyError as err:
            raise RankDeficiencyError(err.column, err.pivot, step=step) from None
        frame = qr.q_factor
        diag = np.diagonal(qr.t_factor.data[..., 0] if beta == 4 else qr.t_factor.data,
                           axis1=-2, axis2=-1)
        total = total + np.sum(np.log(diag.real), axis=-1)
    return float(total) if np.ndim(total) == 0 else total
