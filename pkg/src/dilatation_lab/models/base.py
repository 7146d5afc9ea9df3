"""Shared machinery for models that are normed conical groups.

A conical group carries a group operation, ambient dilatations delta_eps that
are group automorphisms, and a homogeneous norm scaling exactly by nu(eps).
The induced structure uses the left-invariant distance d(a,b) = |a^-1 b| and
dilatations based at any point,

    delta^x_eps u = x . delta_eps(x^-1 u).

All composite operators then have closed forms, exposed through the exact
capability hooks, e.g. Delta^x_eps(u,v) = delta^x_eps(u) . u^-1 . v and its
limit Delta^x(u,v) = x . u^-1 . v.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from dilatation_lab.core.scales import Scale
from dilatation_lab.core.structure import DilatationStructure, vector_sample_ball


class GroupModel(DilatationStructure):
    """Dilatation structure of a normed conical group.

    Group operations are polynomial with rational coefficients, so feeding
    Fraction coordinates and rational scales through the same code paths
    evaluates every algebraic identity exactly; ``to_exact`` and
    ``to_exact_scale`` perform that conversion.
    """

    @property
    def supports_exact_arithmetic(self) -> bool:
        return True

    def to_exact(self, p):
        raise NotImplementedError

    def to_exact_scale(self, eps: Scale) -> Scale:
        value = eps.value
        if isinstance(value, complex):
            if value.imag != 0.0:
                raise ValueError("only real scales have an exact rational form")
            value = value.real
        return Scale(eps.group, Fraction(value))

    # --- group surface, supplied by subclasses -----------------------------

    def group_product(self, a, b):
        raise NotImplementedError

    def group_inverse(self, a):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def ambient_dilate(self, eps: Scale, a):
        """The automorphism delta_eps based at the neutral element."""
        raise NotImplementedError

    def homogeneous_norm(self, a) -> float:
        raise NotImplementedError

    # --- induced structure --------------------------------------------------

    def distance(self, p, q) -> float:
        return self.homogeneous_norm(self.group_product(self.group_inverse(p), q))

    def dilate(self, x, eps: Scale, y):
        return self.group_product(
            x, self.ambient_dilate(eps, self.group_product(self.group_inverse(x), y)))

    def origin(self):
        return self.identity()

    def left_translation(self, w, base=None):
        """The map v -> w . base^-1 . v, translation in the group re-zeroed at base.

        With the default base (the neutral element) this is plain left
        translation by w; it is an isometry of the model's distance.
        """
        if base is None:
            head = w
        else:
            head = self.group_product(w, self.group_inverse(base))
        return lambda v: self.group_product(head, v)

    def base_inverse(self, u, x):
        """inv^u(x) = u . x^-1 . u, the inverse of x in the group re-zeroed at u."""
        return self.group_product(self.group_product(u, self.group_inverse(x)), u)

    # --- exact capability hooks ----------------------------------------------

    @property
    def has_exact_operators(self) -> bool:
        return True

    def exact_operator(self, kind: str, x, eps: Scale, u, v=None):
        inv = self.group_inverse
        prod = self.group_product
        if kind == "difference":
            a = self.dilate(x, eps, u)
            return prod(prod(a, inv(u)), v)
        if kind == "sum":
            a = self.dilate(u, eps, x)
            return prod(prod(a, inv(x)), v)
        if kind == "inverse":
            a = self.dilate(x, eps, u)
            return prod(prod(a, inv(u)), x)
        raise ValueError(f"unknown operator kind {kind!r}")

    @property
    def has_exact_tangent(self) -> bool:
        return True

    def tangent_sum(self, x, u, v):
        return self.group_product(self.group_product(u, self.group_inverse(x)), v)

    def tangent_difference(self, x, u, v):
        return self.group_product(self.group_product(x, self.group_inverse(u)), v)

    def tangent_inverse(self, x, u):
        return self.base_inverse(x, u)

    def tangent_distance(self, x, u, v) -> float:
        return self.distance(u, v)


class VectorGroupModel(GroupModel):
    """Group model whose carrier is a flat numpy coordinate vector."""

    coordinate_dim: int

    def identity(self):
        return np.zeros(self.coordinate_dim)

    def sample_ball(self, center, radius, count, rng):
        return vector_sample_ball(self, center, radius, count, rng)

    def point_from_json(self, obj):
        p = np.asarray(obj, dtype=float)
        if p.shape != (self.coordinate_dim,):
            raise ValueError(
                f"{self.name} expects {self.coordinate_dim} coordinates, got {obj!r}")
        return p

    def point_to_list(self, p) -> list:
        return [float(c) for c in np.asarray(p).ravel()]

    def to_exact(self, p):
        return np.array([Fraction(float(c)) for c in p], dtype=object)

    def coordinate_gap(self, p, q) -> float:
        return float(max(abs(float(a) - float(b)) for a, b in zip(p, q)))
