"""Description of a determinant-moment experiment, shared by the closed
forms and the Monte Carlo estimators."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .numfield import as_beta
from .samplers import DistKind, as_dist


class Mode(str, enum.Enum):
    LINEAR_SQUARE = "linear-square"
    LINEAR_RECT = "linear-rect"
    AFFINE_SQUARE = "affine-square"
    AFFINE_RECT = "affine-rect"

    @property
    def affine(self) -> bool:
        return self in (Mode.AFFINE_SQUARE, Mode.AFFINE_RECT)

    @property
    def square(self) -> bool:
        return self in (Mode.LINEAR_SQUARE, Mode.AFFINE_SQUARE)


@dataclass(frozen=True)
class MomentQuery:
    """One moment experiment.

    ``exponent`` is ``q`` (power of ``|det|``) for the square modes and ``h``
    (``(det M^dagger M)^{h/2}``) for the rectangular ones.
    """

    dist: DistKind
    beta: int
    ambient_n: int
    inner_N: int
    exponent: float
    mode: Mode = Mode.LINEAR_SQUARE

    def __post_init__(self):
        object.__setattr__(self, "dist", as_dist(self.dist))
        object.__setattr__(self, "beta", int(as_beta(self.beta)))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "exponent", float(self.exponent))
        n, N = self.ambient_n, self.inner_N
        if int(N) != N or int(n) != n or N < 1 or n < N:
            raise ValueError(f"need ambient_n >= inner_N >= 1, got n={n}, N={N}")
        if self.mode.square and n != N:
            raise ValueError(f"{self.mode.value} needs ambient_n == inner_N")
        if not np.isfinite(self.exponent):
            raise ValueError("exponent must be finite")
        if self.mode.affine and self.exponent < 0:
            raise ValueError("affine modes need exponent >= 0")
        if not self.mode.affine and self.exponent <= -self.beta:
            raise ValueError(f"linear modes need exponent > -beta = {-self.beta}")

    @classmethod
    def square(cls, dist, beta, N, q, affine=False):
        mode = Mode.AFFINE_SQUARE if affine else Mode.LINEAR_SQUARE
        return cls(dist, beta, N, N, q, mode)

    @classmethod
    def rect(cls, dist, beta, n, N, h, affine=False):
        mode = Mode.AFFINE_RECT if affine else Mode.LINEAR_RECT
        return cls(dist, beta, n, N, h, mode)
