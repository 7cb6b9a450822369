"""Dense linear algebra over F_beta.

Every function here accepts matrices with optional leading batch axes, so a
stack of ``S`` samples of ``n x N`` matrices is one :class:`FMatrix` with
``data.shape == (S, n, N)`` (or ``(S, n, N, 2)`` for quaternions).  Spectral
computations for beta = 4 go through the ``2n x 2N`` complexification and
collapse the doubly degenerate values pairwise.

Conventions
-----------
* ``trace_gram`` uses half the complexified trace when beta = 4, which is the
  same as summing ``|z|^2 + |w|^2`` over entries.
* The beta-determinant of a Gram matrix is the product of its ``N`` collapsed
  eigenvalues; ``abs_det_beta`` is its square root for square input.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .numfield import (
    Beta,
    as_beta,
    complex_to_qpair,
    qpair_conj,
    qpair_matmul,
    qpair_norm_sq,
    qpair_to_complex,
)

RANK_TOL = 1e-12
PSD_TOL = 1e-10
PAIR_TOL = 1e-8
ROUNDOFF = 64 * np.finfo(float).eps


class RankDeficiencyError(np.linalg.LinAlgError):
    """Raised when a column is numerically dependent on the previous ones."""

    def __init__(self, column: int, pivot: float, step: int | None = None):
        self.column = column
        self.pivot = pivot
        self.step = step
        where = f"column {column}" + (f" at step {step}" if step is not None else "")
        super().__init__(f"rank deficiency at {where} (pivot {pivot:.3e})")


class NotPSDError(np.linalg.LinAlgError):
    pass


class PairingError(np.linalg.LinAlgError):
    """beta = 4 spectrum failed to split into degenerate pairs."""


@dataclass(frozen=True)
class FMatrix:
    """A (possibly batched) matrix over F_beta.

    ``data`` is real for beta = 1, complex for beta = 2, and complex with a
    trailing axis of length 2 holding the quaternion pair ``(z, w)`` for
    beta = 4.
    """

    beta: Beta
    data: np.ndarray

    def __post_init__(self):
        beta = as_beta(self.beta)
        object.__setattr__(self, "beta", beta)
        data = np.asarray(self.data)
        if beta == 1:
            if np.iscomplexobj(data):
                raise TypeError("beta=1 matrices must be real")
            data = data.astype(float, copy=False)
        else:
            data = data.astype(complex, copy=False)
        core = 3 if beta == 4 else 2
        if data.ndim < core or (beta == 4 and data.shape[-1] != 2):
            raise ValueError(f"bad data shape {data.shape} for beta={int(beta)}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrices need at least one row and one column")
        object.__setattr__(self, "data", data)

    @property
    def _shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1] if self.beta == 4 else self.data.shape

    @property
    def rows(self) -> int:
        return self._shape[-2]

    @property
    def cols(self) -> int:
        return self._shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self._shape[:-2]

    def complexify(self) -> np.ndarray:
        """Return the complex form; ``2n x 2N`` blocks for quaternions."""
        if self.beta == 4:
            return qpair_to_complex(self.data)
        return self.data.astype(complex)

    @classmethod
    def from_complex(cls, beta, c: np.ndarray) -> "FMatrix":
        beta = as_beta(beta)
        if beta == 4:
            return cls(beta, complex_to_qpair(c))
        if beta == 1:
            c = np.asarray(c)
            if np.iscomplexobj(c):
                c = c.real
            return cls(beta, c)
        return cls(beta, c)

    @classmethod
    def identity(cls, beta, N: int) -> "FMatrix":
        beta = as_beta(beta)
        if beta == 4:
            data = np.zeros((N, N, 2), dtype=complex)
            data[..., 0] = np.eye(N)
            return cls(beta, data)
        return cls(beta, np.eye(N))

    def components(self) -> np.ndarray:
        """Real components as an array of shape ``(..., n, N, beta)``."""
        if self.beta == 1:
            return self.data[..., None]
        if self.beta == 2:
            return np.stack([self.data.real, self.data.imag], axis=-1)
        z, w = self.data[..., 0], self.data[..., 1]
        return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)

    @classmethod
    def from_components(cls, beta, comps: np.ndarray) -> "FMatrix":
        beta = as_beta(beta)
        comps = np.asarray(comps, dtype=float)
        if comps.shape[-1] != beta:
            raise ValueError(f"last axis must have length {int(beta)}")
        if beta == 1:
            return cls(beta, comps[..., 0])
        if beta == 2:
            return cls(beta, comps[..., 0] + 1j * comps[..., 1])
        z = comps[..., 0] + 1j * comps[..., 1]
        w = comps[..., 2] + 1j * comps[..., 3]
        return cls(beta, np.stack([z, w], axis=-1))

    def column_norms(self) -> np.ndarray:
        c = self.components()
        return np.sqrt(np.sum(c * c, axis=(-3, -1)))

    def column(self, j: int) -> "FMatrix":
        idx = (Ellipsis, slice(None), slice(j, j + 1))
        if self.beta == 4:
            idx = idx + (slice(None),)
        return FMatrix(self.beta, self.data[idx])

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        return matmul(self, other)

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        _same_field(self, other)
        return FMatrix(self.beta, self.data - other.data)

    def __add__(self, other: "FMatrix") -> "FMatrix":
        _same_field(self, other)
        return FMatrix(self.beta, self.data + other.data)

    def scale(self, factor) -> "FMatrix":
        """Multiply by real scalars, broadcasting over batch axes."""
        factor = np.asarray(factor, dtype=float)
        factor = factor.reshape(factor.shape + (1,) * (self.data.ndim - factor.ndim))
        return FMatrix(self.beta, self.data * factor)


@dataclass(frozen=True)
class HermPSD:
    """Self-adjoint positive semidefinite matrix over F_beta."""

    matrix: FMatrix

    @property
    def beta(self) -> Beta:
        return self.matrix.beta

    @property
    def dim(self) -> int:
        return self.matrix.cols

    def check(self, tol: float = PSD_TOL) -> None:
        """Validate self-adjointness and PSD-ness; raises on violation."""
        c = self.matrix.complexify()
        norm = max(float(np.max(np.abs(c), initial=0.0)), np.finfo(float).tiny)
        if np.max(np.abs(c - np.conj(np.swapaxes(c, -1, -2)))) > tol * norm:
            raise NotPSDError("matrix is not self-adjoint")
        ev = np.linalg.eigvalsh(c)
        if np.min(ev) < -tol * norm:
            raise NotPSDError(f"negative eigenvalue {np.min(ev):.3e}")
        if self.beta == 4:
            _collapse_pairs(ev[..., ::-1], norm)


@dataclass(frozen=True)
class QRPair:
    q_factor: FMatrix
    t_factor: FMatrix


@dataclass(frozen=True)
class PolarPair:
    stiefel: FMatrix
    psd_part: HermPSD


def _same_field(a: FMatrix, b: FMatrix) -> None:
    if a.beta != b.beta:
        raise ValueError(f"field mismatch: beta={int(a.beta)} vs beta={int(b.beta)}")


def _raw_adjoint(beta: int, x: np.ndarray) -> np.ndarray:
    if beta == 4:
        return np.swapaxes(qpair_conj(x), -2, -3)
    if beta == 2:
        return np.conj(np.swapaxes(x, -1, -2))
    return np.swapaxes(x, -1, -2)


def _raw_matmul(beta: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if beta == 4:
        return qpair_matmul(a, b)
    return a @ b


def adjoint(m: FMatrix) -> FMatrix:
    return FMatrix(m.beta, _raw_adjoint(m.beta, m.data))


def matmul(a: FMatrix, b: FMatrix) -> FMatrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    return FMatrix(a.beta, _raw_matmul(a.beta, a.data, b.data))


def gram(m: FMatrix) -> HermPSD:
    """``W = m^dagger m``."""
    return HermPSD(matmul(adjoint(m), m))


def trace_gram(m: FMatrix) -> np.ndarray | float:
    """``Tr m^dagger m`` with the half-trace convention for quaternions."""
    if m.beta == 4:
        sq = qpair_norm_sq(m.data)
    else:
        sq = np.abs(m.data) ** 2
    out = np.sum(sq, axis=(-2, -1))
    return float(out) if np.ndim(out) == 0 else out


def _collapse_pairs(values: np.ndarray, scale) -> np.ndarray:
    """Merge a descending, doubly degenerate spectrum into one value per pair."""
    first, second = values[..., 0::2], values[..., 1::2]
    scale = np.maximum(np.asarray(scale, dtype=float), np.finfo(float).tiny)
    if np.ndim(scale):
        scale = scale[..., None]
    gap = np.abs(first - second)
    if np.any(gap > PAIR_TOL * scale):
        raise PairingError(f"quaternion spectrum not paired (gap {np.max(gap):.3e})")
    return (first + second) / 2


def singular_values_beta(m: FMatrix) -> np.ndarray:
    """Descending singular values, one per column (pairs collapsed for beta=4)."""
    if m.rows < m.cols:
        raise ValueError("singular_values_beta needs rows >= cols")
    if m.beta == 4:
        s = np.linalg.svd(m.complexify(), compute_uv=False)
        return _collapse_pairs(s, s[..., 0])
    return np.linalg.svd(m.data, compute_uv=False)


def log_abs_det_beta(m: FMatrix) -> np.ndarray | float:
    """``log |det_beta m|`` for square ``m``; ``-inf`` when singular."""
    if m.rows != m.cols:
        raise ValueError("determinant needs a square matrix")
    if m.beta == 4:
        # the complexification has determinant |det_beta m|^2
        _, logdet = np.linalg.slogdet(m.complexify())
        logdet = logdet / 2
    else:
        _, logdet = np.linalg.slogdet(m.data)
    return float(logdet) if np.ndim(logdet) == 0 else logdet


def abs_det_beta(m: FMatrix) -> np.ndarray | float:
    return np.exp(log_abs_det_beta(m))


def log_det_beta_gram(m: FMatrix) -> np.ndarray | float:
    """``log det_beta(m^dagger m)`` for any ``n >= N`` shape."""
    if m.rows == m.cols:
        return 2 * log_abs_det_beta(m)
    w = gram(m).matrix
    _, logdet = np.linalg.slogdet(w.complexify() if m.beta == 4 else w.data)
    if m.beta == 4:
        logdet = logdet / 2
    return float(logdet) if np.ndim(logdet) == 0 else logdet


def det_beta_psd(w: HermPSD) -> np.ndarray | float:
    """Product of the collapsed eigenvalues of a Gram matrix."""
    ev = np.linalg.eigvalsh(w.matrix.complexify())[..., ::-1]
    if w.beta == 4:
        ev = _collapse_pairs(ev, np.max(np.abs(ev), axis=-1))
    out = np.prod(ev, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def gram_schmidt_qr(m: FMatrix, tol: float = RANK_TOL) -> QRPair:
    """Thin QR by classical Gram-Schmidt with one re-orthogonalisation pass.

    Arithmetic stays in the native field, so for quaternions the factors keep
    their block structure exactly.  The diagonal of ``t`` is real and positive.

    Raises
    ------
    RankDeficiencyError
        If a pivot falls below ``tol`` times the largest column norm.  The
        reported column index is 1-based.
    """
    beta, n, N = m.beta, m.rows, m.cols
    if n < N:
        raise ValueError("gram_schmidt_qr needs rows >= cols")
    x = m.data
    quat = beta == 4
    norms = m.column_norms()
    scale = np.max(norms, axis=-1, keepdims=True)

    q = np.zeros_like(x)
    t = np.zeros(x.shape[:-3] + (N, N, 2) if quat else x.shape[:-2] + (N, N),
                 dtype=x.dtype)
    for j in range(N):
        col = x[..., :, j:j + 1, :] if quat else x[..., :, j:j + 1]
        for _ in range(2):
            if j == 0:
                break
            basis = q[..., :, :j, :] if quat else q[..., :, :j]
            coef = _raw_matmul(beta, _raw_adjoint(beta, basis), col)
            col = col - _raw_matmul(beta, basis, coef)
            if quat:
                t[..., :j, j:j + 1, :] += coef
            else:
                t[..., :j, j:j + 1] += coef
        sq = qpair_norm_sq(col) if quat else np.abs(col) ** 2
        pivot = np.sqrt(np.sum(sq, axis=(-2, -1)))
        bad = pivot <= tol * scale[..., 0]
        if np.any(bad):
            raise RankDeficiencyError(j + 1, float(np.min(pivot)))
        unit = col / pivot[..., None, None, None] if quat else col / pivot[..., None, None]
        if quat:
            q[..., :, j:j + 1, :] = unit
            t[..., j, j, 0] = pivot
        else:
            q[..., :, j:j + 1] = unit
            t[..., j, j] = pivot
    return QRPair(FMatrix(beta, q), FMatrix(beta, t))


def psd_sqrt(w: HermPSD, tol: float = PSD_TOL) -> HermPSD:
    """Principal square root; eigenvalues in ``[-tol*||w||, 0]`` clamp to 0.

    Positive eigenvalues below ``ROUNDOFF * ||w||`` are also treated as 0.
    """
    c = w.matrix.complexify()
    ev, vec = np.linalg.eigh(c)
    norm = np.maximum(np.max(np.abs(ev), axis=-1, keepdims=True), np.finfo(float).tiny)
    if np.any(ev < -tol * norm):
        raise NotPSDError(f"negative eigenvalue {float(np.min(ev)):.3e}")
    # round-off eigenvalues of a singular matrix would otherwise contribute
    # their square roots (~1e-8)
    ev = np.where(ev < ROUNDOFF * norm, 0.0, ev)
    root = np.sqrt(ev)
    r = (vec * root[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))
    r = (r + np.conj(np.swapaxes(r, -1, -2))) / 2
    return HermPSD(FMatrix.from_complex(w.beta, r))


def polar_decompose(m: FMatrix) -> PolarPair:
    """``m = U_1 H`` with ``U_1`` orthonormal columns and ``H = (m^dagger m)^{1/2}``."""
    if m.rows < m.cols:
        raise ValueError("polar_decompose needs rows >= cols")
    gram_schmidt_qr(m)  # rank check with a column index
    u, s, vh = np.linalg.svd(m.complexify(), full_matrices=False)
    stiefel = u @ vh
    h = (np.conj(np.swapaxes(vh, -1, -2)) * s[..., None, :]) @ vh
    h = (h + np.conj(np.swapaxes(h, -1, -2))) / 2
    return PolarPair(
        FMatrix.from_complex(m.beta, stiefel),
        HermPSD(FMatrix.from_complex(m.beta, h)),
    )


def difference_matrix(points, beta=1) -> FMatrix:
    """Columns ``p_j - p_0`` for ``j = 1..k``.

    ``points`` is either an :class:`FMatrix` whose columns are the points, or
    a sequence of equal-length vectors (quaternion vectors as ``(d, 2)``
    complex pair arrays).
    """
    if not isinstance(points, FMatrix):
        beta = as_beta(beta)
        vecs = [np.asarray(p) for p in points]
        if len(vecs) < 2:
            raise ValueError("need at least two points")
        shapes = {v.shape for v in vecs}
        if len(shapes) != 1:
            raise ValueError(f"dimension mismatch among points: {sorted(shapes)}")
        points = FMatrix(beta, np.stack(vecs, axis=1))
    if points.cols < 2:
        raise ValueError("need at least two points")
    if points.beta == 4:
        d = points.data[..., :, 1:, :] - points.data[..., :, :1, :]
    else:
        d = points.data[..., :, 1:] - points.data[..., :, :1]
    return FMatrix(points.beta, d)


def simplex_volume(points) -> float:
    """Volume of the real simplex spanned by ``N + 1`` points in R^N."""
    d = difference_matrix(points, beta=1)
    if d.beta != 1:
        raise ValueError("simplex_volume is defined for real points")
    if d.rows != d.cols:
        raise ValueError(f"need N+1 points in R^N, got {d.cols + 1} in R^{d.rows}")
    return abs_det_beta(d) / factorial(d.cols)


def symplectic_structure(N: int) -> np.ndarray:
    """``I_N kron [[0, -1], [1, 0]]``; conjugating by it maps W to conj(W) for quaternion W."""
    return np.kron(np.eye(N), np.array([[0.0, -1.0], [1.0, 0.0]]))
