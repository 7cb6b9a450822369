"""Scalar arithmetic over the real, complex and quaternion fields.

A quaternion ``z + w j`` is stored as the complex pair ``(z, w)`` and is
identified with the 2x2 complex block ``[[z, w], [-conj(w), conj(z)]]``.
Multiplication, conjugation and norms are all defined so that this
embedding is an algebra homomorphism.

Array-level helpers at the bottom of the module operate on stacked pairs,
i.e. complex arrays whose last axis has length 2 (``[..., 0]`` is ``z`` and
``[..., 1]`` is ``w``).  They are what the matrix code builds on.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

BLOCK_TOL = 1e-12


class Beta(enum.IntEnum):
    """Number of real degrees of freedom per scalar."""

    REAL = 1
    COMPLEX = 2
    QUATERNION = 4


def as_beta(value) -> Beta:
    """Validate ``value`` and return it as a :class:`Beta`.

    Raises
    ------
    ValueError
        If ``value`` is not one of 1, 2, 4.
    """
    if isinstance(value, bool):
        raise ValueError(f"beta must be 1, 2 or 4, got {value!r}")
    try:
        as_int = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"beta must be 1, 2 or 4, got {value!r}") from None
    if as_int != value or as_int not in (1, 2, 4):
        raise ValueError(f"beta must be 1, 2 or 4, got {value!r}")
    return Beta(as_int)


@dataclass(frozen=True)
class QuatScalar:
    z: complex
    w: complex = 0j

    def __mul__(self, other: "QuatScalar") -> "QuatScalar":
        return quat_mul(self, other)

    @property
    def norm_sq(self) -> float:
        return abs(self.z) ** 2 + abs(self.w) ** 2


def quat_mul(a: QuatScalar, b: QuatScalar) -> QuatScalar:
    """Quaternion product, the one induced by multiplying 2x2 blocks."""
    return QuatScalar(
        a.z * b.z - a.w * b.w.conjugate(),
        a.z * b.w + a.w * b.z.conjugate(),
    )


def quat_conj_norm(a: QuatScalar) -> tuple[QuatScalar, float]:
    """Return the conjugate of ``a`` and its squared norm ``|z|^2 + |w|^2``."""
    return QuatScalar(complex(a.z).conjugate(), -complex(a.w)), a.norm_sq


def embed_block(a: QuatScalar) -> np.ndarray:
    z, w = complex(a.z), complex(a.w)
    return np.array([[z, w], [-w.conjugate(), z.conjugate()]], dtype=complex)


def extract_block(block: np.ndarray, tol: float = BLOCK_TOL) -> QuatScalar:
    """Inverse of :func:`embed_block`.

    Raises
    ------
    ValueError
        If the block does not have the quaternion pattern within ``tol``
        (relative to the block's largest entry, with an absolute floor of 1).
    """
    block = np.asarray(block, dtype=complex)
    if block.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {block.shape}")
    scale = max(1.0, float(np.max(np.abs(block))))
    dz = abs(block[0, 0] - np.conj(block[1, 1]))
    dw = abs(block[0, 1] + np.conj(block[1, 0]))
    if max(dz, dw) > tol * scale:
        raise ValueError(
            f"block is not a quaternion (conjugacy defect {max(dz, dw):.3e})"
        )
    # averaging the redundant entries is exact when they already agree
    z = (block[0, 0] + np.conj(block[1, 1])) / 2
    w = (block[0, 1] - np.conj(block[1, 0])) / 2
    return QuatScalar(complex(z), complex(w))


# -- array-level quaternion arithmetic ------------------------------------


def qpair_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise quaternion product of stacked pairs."""
    az, aw = a[..., 0], a[..., 1]
    bz, bw = b[..., 0], b[..., 1]
    return np.stack([az * bz - aw * np.conj(bw), az * bw + aw * np.conj(bz)], axis=-1)


def qpair_conj(a: np.ndarray) -> np.ndarray:
    return np.stack([np.conj(a[..., 0]), -a[..., 1]], axis=-1)


def qpair_norm_sq(a: np.ndarray) -> np.ndarray:
    return np.abs(a[..., 0]) ** 2 + np.abs(a[..., 1]) ** 2


def qpair_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of quaternion matrices stored as ``(..., n, k, 2)``."""
    az, aw = a[..., 0], a[..., 1]
    bz, bw = b[..., 0], b[..., 1]
    return np.stack([az @ bz - aw @ np.conj(bw), az @ bw + aw @ np.conj(bz)], axis=-1)


def qpair_to_complex(a: np.ndarray) -> np.ndarray:
    """Complexify ``(..., n, N, 2)`` pairs into ``(..., 2n, 2N)`` blocks."""
    z, w = a[..., 0], a[..., 1]
    *batch, n, N = z.shape
    out = np.empty((*batch, 2 * n, 2 * N), dtype=complex)
    out[..., 0::2, 0::2] = z
    out[..., 0::2, 1::2] = w
    out[..., 1::2, 0::2] = -np.conj(w)
    out[..., 1::2, 1::2] = np.conj(z)
    return out


def complex_to_qpair(c: np.ndarray, tol: float = BLOCK_TOL) -> np.ndarray:
    """Inverse of :func:`qpair_to_complex`, checking the block pattern."""
    c = np.asarray(c, dtype=complex)
    if c.shape[-1] % 2 or c.shape[-2] % 2:
        raise ValueError(f"complexified matrix must have even shape, got {c.shape}")
    a, b = c[..., 0::2, 0::2], c[..., 0::2, 1::2]
    cc, d = c[..., 1::2, 0::2], c[..., 1::2, 1::2]
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    defect = max(
        float(np.max(np.abs(a - np.conj(d)), initial=0.0)),
        float(np.max(np.abs(b + np.conj(cc)), initial=0.0)),
    )
    if defect > tol * scale:
        raise ValueError(f"matrix lacks quaternion block structure (defect {defect:.3e})")
    return np.stack([(a + np.conj(d)) / 2, (b - np.conj(cc)) / 2], axis=-1)
