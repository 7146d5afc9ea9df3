"""Euclidean space as the prototype dilatation structure.

Dilatations are the classical maps delta^x_eps y = x + eps (y - x); every
axiom holds exactly and all limit operators reduce to vector arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from dilatation_lab.core.scales import POSITIVE_REALS, Scale
from dilatation_lab.models.base import VectorGroupModel


class EuclideanModel(VectorGroupModel):
    """R^n with a p-norm distance and linear dilatations."""

    def __init__(self, n: int, p: float = 2.0):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        self.n = int(n)
        self.p = float(p)
        self.coordinate_dim = self.n
        self.scale_group = POSITIVE_REALS
        self.name = f"euclidean-{self.n}d" if p == 2.0 else f"euclidean-{self.n}d-p{p:g}"

    def group_product(self, a, b):
        return a + b

    def group_inverse(self, a):
        return -a

    def ambient_dilate(self, eps: Scale, a):
        return a * eps.value

    def homogeneous_norm(self, a) -> float:
        # scalar path keeps exact (object-dtype) coordinates usable; the
        # final float conversion is the only rounding step
        if self.p == 2.0:
            return math.sqrt(float(np.dot(a, a)))
        if math.isinf(self.p):
            return float(max(abs(float(c)) for c in a))
        return float(sum(abs(float(c)) ** self.p for c in a)) ** (1.0 / self.p)
