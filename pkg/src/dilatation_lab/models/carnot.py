"""Generic stratified (Carnot) groups of step at most three.

The model is specified by layer dimensions and the structure constants of a
graded Lie bracket on the basis.  Identifying the group with its algebra,
the product is the Baker-Campbell-Hausdorff polynomial, which terminates for
nilpotent brackets; through step three it is exactly

    a . b = a + b + [a,b]/2 + [a,[a,b]]/12 - [b,[a,b]]/12.

Dilatations act as eps^i on the i-th layer.  The shipped homogeneous gauge
is the max-type quasi-norm max_i |a_i|^{1/i}; it is exactly homogeneous but
only subadditive up to a constant, which can be estimated empirically.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from dilatation_lab.errors import ModelError
from dilatation_lab.core.scales import POSITIVE_REALS, Scale
from dilatation_lab.models.base import VectorGroupModel

_JACOBI_TOL = 1e-12
_HALF = Fraction(1, 2)
_TWELFTH = Fraction(1, 12)


class CarnotModel(VectorGroupModel):
    """Graded nilpotent group from layer dimensions and bracket constants.

    brackets is a list of entries [i, j, k, c] declaring [e_i, e_j] = ... + c e_k
    with 0-based indices into the full graded basis; the reversed pairs are
    filled in antisymmetrically.
    """

    def __init__(self, step: int, layers, brackets):
        if step not in (1, 2, 3):
            raise ModelError(f"step must be 1, 2 or 3, got {step}")
        if len(layers) != step or any(int(d) < 1 for d in layers):
            raise ModelError(f"need {step} positive layer dimensions, got {layers}")
        self.step = int(step)
        self.layers = [int(d) for d in layers]
        self.dim = sum(self.layers)
        self.coordinate_dim = self.dim
        self.scale_group = POSITIVE_REALS
        self.name = f"carnot-step{self.step}-" + "x".join(str(d) for d in self.layers)

        self.layer_of = np.zeros(self.dim, dtype=int)
        start = 0
        self._slices = []
        for i, d in enumerate(self.layers, start=1):
            self.layer_of[start:start + d] = i
            self._slices.append(slice(start, start + d))
            start += d

        dense = np.zeros((self.dim, self.dim, self.dim))
        for entry in brackets:
            if len(entry) != 4:
                raise ModelError(f"bracket entry must be [i, j, k, c], got {entry}")
            i, j, k, c = int(entry[0]), int(entry[1]), int(entry[2]), float(entry[3])
            for idx in (i, j, k):
                if not 0 <= idx < self.dim:
                    raise ModelError(f"bracket index {idx} out of range for dim {self.dim}")
            if self.layer_of[k] != self.layer_of[i] + self.layer_of[j]:
                raise ModelError(
                    f"bracket [{i},{j}]->{k} violates the grading "
                    f"({self.layer_of[i]}+{self.layer_of[j]} != {self.layer_of[k]})")
            dense[i, j, k] += c
            dense[j, i, k] -= c
        # sparse views of the structure constants, one with float and one
        # with exact rational coefficients, picked by coordinate dtype
        self._entries = [(i, j, k, dense[i, j, k])
                         for i, j, k in zip(*np.nonzero(dense))]
        self._exact_entries = [(i, j, k, Fraction(c)) for i, j, k, c in self._entries]
        self._check_jacobi()

    @property
    def homogeneous_dimension(self) -> int:
        return sum(i * d for i, d in enumerate(self.layers, start=1))

    def _check_jacobi(self):
        basis = np.eye(self.dim)
        for i, j, k in itertools.combinations(range(self.dim), 3):
            res = (self.bracket(basis[i], self.bracket(basis[j], basis[k]))
                   + self.bracket(basis[j], self.bracket(basis[k], basis[i]))
                   + self.bracket(basis[k], self.bracket(basis[i], basis[j])))
            if float(np.max(np.abs(res))) > _JACOBI_TOL:
                raise ModelError(f"Jacobi identity fails on basis triple ({i},{j},{k})")

    def bracket(self, a, b):
        exact = a.dtype == object
        out = np.zeros(self.dim, dtype=object) if exact else np.zeros(self.dim)
        for i, j, k, c in (self._exact_entries if exact else self._entries):
            out[k] += c * a[i] * b[j]
        return out

    def group_product(self, a, b):
        exact = a.dtype == object
        half = _HALF if exact else 0.5
        twelfth = _TWELFTH if exact else 1.0 / 12.0
        ab = self.bracket(a, b)
        out = a + b + ab * half
        if self.step >= 3:
            out = out + (self.bracket(a, ab) - self.bracket(b, ab)) * twelfth
        return out

    def group_inverse(self, a):
        return -a

    def ambient_dilate(self, eps: Scale, a):
        e = eps.value
        out = a.copy()
        for i, sl in enumerate(self._slices, start=1):
            out[sl] *= e ** i
        return out

    def homogeneous_norm(self, a) -> float:
        best = 0.0
        for i, sl in enumerate(self._slices, start=1):
            block = a[sl]
            best = max(best, float(np.dot(block, block)) ** (0.5 / i))
        return best

    def subadditivity_constant(self, samples: int = 200, seed: int = 0) -> float:
        """Empirical sup of |a.b| / (|a| + |b|) over a seeded sample.

        The max-type gauge is a quasi-norm; this reports how far it is from
        subadditive on the sampled range instead of asserting the constant 1.
        """
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            a = rng.uniform(-1.0, 1.0, self.dim)
            b = rng.uniform(-1.0, 1.0, self.dim)
            denom = self.homogeneous_norm(a) + self.homogeneous_norm(b)
            if denom > 0:
                worst = max(worst, self.homogeneous_norm(self.group_product(a, b)) / denom)
        return worst


def heisenberg_structure_constants(n: int = 1):
    """Step-2 layer/bracket data reproducing H(n) on the graded basis."""
    layers = [2 * n, 1]
    brackets = [[i, n + i, 2 * n, 1.0] for i in range(n)]
    return layers, brackets


def engel_structure_constants():
    """The step-3 filiform example: [e0,e1] = e2, [e0,e2] = e3."""
    return [2, 1, 1], [[0, 1, 2, 1.0], [0, 2, 3, 1.0]]
