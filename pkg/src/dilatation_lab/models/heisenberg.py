"""Heisenberg groups H(n) with the Cygan gauge distance.

Points are (x, xbar) with x in R^{2n} and xbar real, multiplied by

    (x, xbar)(y, ybar) = (x + y, xbar + ybar + omega(x, y) / 2)

where omega is the standard symplectic form.  The ambient dilatations
delta_eps(x, xbar) = (eps x, eps^2 xbar) are group automorphisms and the
Cygan norm |(x, xbar)| = (|x|^4 + 16 xbar^2)^{1/4} is homogeneous and
subadditive, so the induced left-invariant distance is a true metric.
"""

from __future__ import annotations

import numpy as np

from dilatation_lab.core.scales import POSITIVE_REALS, Scale
from dilatation_lab.models.base import VectorGroupModel


class HeisenbergModel(VectorGroupModel):
    """H(n) on R^{2n+1}, coordinates [x_1..x_{2n}, xbar]."""

    def __init__(self, n: int = 1):
        if n < 1:
            raise ValueError("Heisenberg index n must be at least 1")
        self.n = int(n)
        self.coordinate_dim = 2 * self.n + 1
        self.scale_group = POSITIVE_REALS
        self.name = f"heisenberg-{self.n}"

    def symplectic(self, x, y):
        n = self.n
        return np.dot(x[:n], y[n:2 * n]) - np.dot(x[n:2 * n], y[:n])

    def group_product(self, a, b):
        n2 = 2 * self.n
        x, y = a[:n2], b[:n2]
        out = np.empty(self.coordinate_dim, dtype=a.dtype)
        out[:n2] = x + y
        out[n2] = a[n2] + b[n2] + self.symplectic(x, y) / 2
        return out

    def group_inverse(self, a):
        return -a

    def ambient_dilate(self, eps: Scale, a):
        e = eps.value
        out = a.copy()
        out[:2 * self.n] *= e
        out[2 * self.n] *= e * e
        return out

    def homogeneous_norm(self, a) -> float:
        n2 = 2 * self.n
        planar = float(np.dot(a[:n2], a[:n2]))
        center = float(a[n2])
        return (planar * planar + 16.0 * center * center) ** 0.25

    def point(self, x, xbar: float):
        """Convenience constructor from the planar part and the center part."""
        p = np.zeros(self.coordinate_dim)
        p[:2 * self.n] = np.asarray(x, dtype=float)
        p[2 * self.n] = float(xbar)
        return p
