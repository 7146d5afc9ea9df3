"""Scale groups.

A scale group is a commutative group Gamma together with a valuation,
a group morphism nu: Gamma -> (0, +infinity).  Scales parametrize every
dilatation; "eps -> 0" always means nu(eps) -> 0.  Three concrete groups
ship with the lab:

* positive reals with nu = identity,
* integer powers of two acting on dyadic integers, nu(2^p) = 2^-p,
* nonzero complex numbers with nu = modulus (here nu is not injective).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class ScaleGroup:
    """Abstract commutative scale group with valuation nu."""

    name: str = "abstract"
    identity_value: Any = None

    def validate(self, value) -> Any:
        return value

    def nu_of(self, value) -> float:
        raise NotImplementedError

    def combine(self, a, b):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def contraction(self, k: int) -> "Scale":
        """The canonical grid element with nu = 2^-k."""
        raise NotImplementedError

    def scale(self, value) -> "Scale":
        return Scale(self, self.validate(value))

    @property
    def one(self) -> "Scale":
        return Scale(self, self.identity_value)

    def grid(self, ks) -> list["Scale"]:
        return [self.contraction(k) for k in ks]

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"<ScaleGroup {self.name}>"


@dataclass(frozen=True)
class Scale:
    """An element of a scale group, carrying its group for arithmetic."""

    group: ScaleGroup
    value: Any

    @property
    def nu(self) -> float:
        return self.group.nu_of(self.value)

    def __mul__(self, other: "Scale") -> "Scale":
        if other.group is not self.group:
            raise ValueError("cannot combine scales from different groups")
        return Scale(self.group, self.group.combine(self.value, other.value))

    def inverse(self) -> "Scale":
        return Scale(self.group, self.group.invert(self.value))

    def __pow__(self, k: int) -> "Scale":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.group.one
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"Scale({self.group.name}, {self.value!r})"


class PositiveReals(ScaleGroup):
    """Gamma = (0, +infinity) with nu the identity.

    Values keep their numeric type: floats normally, exact rationals when a
    caller routes Fraction coordinates through the models.
    """

    name = "positive-reals"
    identity_value = 1.0

    def validate(self, value):
        if not float(value) > 0.0:
            raise ValueError(f"scale must be a positive real, got {value}")
        return value

    def nu_of(self, value) -> float:
        return float(value)

    def combine(self, a, b):
        return a * b

    def invert(self, a):
        return 1 / a

    def contraction(self, k: int) -> Scale:
        return Scale(self, 2.0 ** (-k))


class DyadicPowers(ScaleGroup):
    """Gamma = {2^p : p integer} inside the dyadic numbers.

    Elements are stored by their exponent p; the group element 2^p acts by
    exact multiplication and has valuation nu(2^p) = 2^-p, so p >= 1 is a
    contraction of the dyadic metric.
    """

    name = "dyadic-powers"
    identity_value = 0

    def validate(self, value):
        if not isinstance(value, int):
            raise ValueError(f"dyadic scale exponent must be an int, got {value!r}")
        return value

    def nu_of(self, value) -> float:
        return 2.0 ** (-value)

    def combine(self, a, b):
        return a + b

    def invert(self, a):
        return -a

    def contraction(self, k: int) -> Scale:
        return Scale(self, int(k))


class ComplexUnits(ScaleGroup):
    """Gamma = C^* with nu(eps) = |eps|.  The valuation is not injective.

    Real values (including exact rationals) are kept as given so that the
    real slice of the group supports exact arithmetic; everything else is
    coerced to complex.
    """

    name = "complex-units"
    identity_value = complex(1.0)

    def validate(self, value):
        if not isinstance(value, complex):
            try:
                if float(value) != 0:
                    return value
            except TypeError:
                pass
        value = complex(value)
        if value == 0:
            raise ValueError("scale must be a nonzero complex number")
        return value

    def nu_of(self, value) -> float:
        return float(abs(value))

    def combine(self, a, b):
        return a * b

    def invert(self, a):
        return 1 / a

    def contraction(self, k: int) -> Scale:
        return Scale(self, complex(2.0 ** (-k)))


POSITIVE_REALS = PositiveReals()
DYADIC_POWERS = DyadicPowers()
COMPLEX_UNITS = ComplexUnits()
