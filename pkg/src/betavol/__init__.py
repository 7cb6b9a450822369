"""Determinant moments of random matrices over R, C and H.

Closed forms for Stiefel and Grassmann volumes, moments of random
determinants (linear and affine, i.e. simplex volumes) and their Monte
Carlo counterparts, with a z-score harness comparing the two.
"""
from .betalinalg import FMatrix, HermPSD, PolarPair, QRPair
from .numfield import Beta, QuatScalar
from .query import Mode, MomentQuery
from .samplers import DistKind, RngStream

__version__ = "0.1.0"

__all__ = ["Beta", "DistKind", "FMatrix", "HermPSD", "Mode", "MomentQuery", "PolarPair",
           "QRPair", "QuatScalar", "RngStream"]
