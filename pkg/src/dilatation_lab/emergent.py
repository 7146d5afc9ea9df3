"""What emerges at small scales: tangent operations, induced structures,
linearity defects and derivatives.

The finite-scale composites of the core module converge to the operations of
a local conical group at each point.  This module extracts those limits
numerically (with exact short-circuits where a model knows its tangent in
closed form), rescales a structure into its induced structures, measures the
failure of dilatations based at different points to commute, and estimates
derivatives of maps between structures as conical-group morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dilatation_lab.config import DEFAULTS, Config
from dilatation_lab.errors import NonConvergent
from dilatation_lab.core.reports import ConvergenceReport, make_report, nonincreasing
from dilatation_lab.core.structure import (
    DilatationStructure, approx_difference, approx_inverse, approx_sum,
    estimate_dx, rescaled_distance)
from dilatation_lab.core.scales import Scale

_LIMIT_OPS = {"sum": approx_sum, "difference": approx_difference,
              "inverse": approx_inverse}


def tangent_limit(S: DilatationStructure, x, u, v, which: str, eps_grid,
                  cfg: Config = DEFAULTS) -> tuple[object, ConvergenceReport]:
    """Limit of the sum/difference/inverse composite along a scale grid.

    The limit is taken as the finest-grid composite after a Cauchy check:
    successive increments must shrink by the configured factor.  Models with
    exact tangent operations supply the reference instead, in which case the
    defect column records the genuine distance-to-limit and the numeric path
    double-checks the closed form.
    """
    if which not in _LIMIT_OPS:
        raise ValueError(f"which must be one of {sorted(_LIMIT_OPS)}, got {which!r}")
    op = _LIMIT_OPS[which]
    if which == "inverse":
        points = [op(S, x, e, u) for e in eps_grid]
    else:
        points = [op(S, x, e, u, v) for e in eps_grid]
    increments = [S.distance(a, b) for a, b in zip(points, points[1:])]
    floor = cfg.defect_floor
    for a, b in zip(increments, increments[1:]):
        if b > floor and b > a / cfg.cauchy_shrink + floor:
            raise NonConvergent(
                f"tangent {which} composites do not settle on {S.name}: {increments}")
    if S.has_exact_tangent:
        exact = {"sum": S.tangent_sum, "difference": S.tangent_difference}
        limit = exact[which](x, u, v) if which != "inverse" else S.tangent_inverse(x, u)
    else:
        limit = points[-1]
    defects = [S.distance(p, limit) for p in points]
    report = make_report(eps_grid, defects, True,
                         {"model": S.name, "quantity": f"tangent-{which}",
                          "exact_reference": S.has_exact_tangent,
                          "cauchy_increments": increments})
    return limit, report


@dataclass
class TangentSpace:
    """The tangent conical group at a base point.

    Operations route through the model's closed forms when present and fall
    back to grid limits otherwise; ``eps_grid`` parametrizes the fallback.
    """

    structure: DilatationStructure
    x: object
    eps_grid: list

    def _limit(self, u, v, which):
        value, _ = tangent_limit(self.structure, self.x, u, v, which, self.eps_grid)
        return value

    def sum(self, u, v):
        if self.structure.has_exact_tangent:
            return self.structure.tangent_sum(self.x, u, v)
        return self._limit(u, v, "sum")

    def difference(self, u, v):
        if self.structure.has_exact_tangent:
            return self.structure.tangent_difference(self.x, u, v)
        return self._limit(u, v, "difference")

    def inverse(self, u):
        if self.structure.has_exact_tangent:
            return self.structure.tangent_inverse(self.x, u)
        return self._limit(u, None, "inverse")

    def distance(self, u, v) -> float:
        if self.structure.has_exact_tangent:
            return self.structure.tangent_distance(self.x, u, v)
        value, _ = estimate_dx(self.structure, self.x, u, v, self.eps_grid)
        return value

    def dilate(self, u, eps: Scale, y):
        """Tangent dilatations fix u: Sigma^x(u, delta^x_eps Delta^x(u, y))."""
        moved = self.structure.dilate(self.x, eps, self.difference(u, y))
        return self.sum(u, moved)


def tangent_space(S, x, eps_grid=None, cfg: Config = DEFAULTS) -> TangentSpace:
    if eps_grid is None:
        from dilatation_lab.config import default_ks
        eps_grid = S.scale_group.grid(default_ks(cfg))
    return TangentSpace(S, x, list(eps_grid))


def tangent_dilate(T: TangentSpace, u, eps: Scale, y):
    return T.dilate(u, eps, y)


# ---------------------------------------------------------------------------
# induced structures at a fixed scale
# ---------------------------------------------------------------------------

class InducedStructure(DilatationStructure):
    """The structure seen at scale mu from x: distance (delta^x, mu) and
    dilatations delta^x_{mu^-1} delta^{delta^x_mu u}_eps delta^x_mu."""

    def __init__(self, base: DilatationStructure, x, mu: Scale):
        if not 0.0 < mu.nu < 1.0:
            raise ValueError(f"induced structures need nu(mu) in (0,1), got {mu.nu}")
        self.base = base
        self.x = x
        self.mu = mu
        self.scale_group = base.scale_group
        self.domain_radius_A = base.domain_radius_A
        self.codomain_radius_B = base.codomain_radius_B
        self.name = f"induced({base.name}, nu={mu.nu:g})"

    def _anchor(self, like):
        """The anchor (x, mu) in the arithmetic of the query points."""
        if getattr(like, "dtype", None) == object and self.base.supports_exact_arithmetic:
            return self.base.to_exact(self.x), self.base.to_exact_scale(self.mu)
        return self.x, self.mu

    def distance(self, p, q) -> float:
        x, mu = self._anchor(p)
        return rescaled_distance(self.base, x, mu, p, q)

    def dilate(self, u, eps: Scale, v):
        b = self.base
        x, mu = self._anchor(u)
        inner = b.dilate(b.dilate(x, mu, u), eps, b.dilate(x, mu, v))
        return b.dilate(x, mu.inverse(), inner)

    def origin(self):
        return self.x

    def sample_ball(self, center, radius, count, rng):
        return self.base.sample_ball(center, radius, count, rng)

    def point_from_json(self, obj):
        return self.base.point_from_json(obj)

    def point_to_list(self, p):
        return self.base.point_to_list(p)

    def coordinate_gap(self, p, q) -> float:
        return self.base.coordinate_gap(p, q)

    @property
    def supports_exact_arithmetic(self) -> bool:
        return self.base.supports_exact_arithmetic

    def to_exact(self, p):
        return self.base.to_exact(p)

    def to_exact_scale(self, eps: Scale) -> Scale:
        return self.base.to_exact_scale(eps)


def induced_structure(S: DilatationStructure, x, mu: Scale) -> InducedStructure:
    return InducedStructure(S, x, mu)


def shift_isometry_defect(S: DilatationStructure, x, mu: Scale, u, pairs) -> float:
    """How far Sigma^x_mu(u, .) is from an isometry between induced distances.

    Compares (delta^{delta^x_mu u}, mu)(v, w) with (delta^x, mu) of the
    shifted points, the sup taken over the supplied (v, w) pairs.
    """
    a = S.dilate(x, mu, u)
    worst = 0.0
    for v, w in pairs:
        lhs = rescaled_distance(S, a, mu, v, w)
        rhs = rescaled_distance(S, x, mu, approx_sum(S, x, mu, u, v),
                                approx_sum(S, x, mu, u, w))
        worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# linearity
# ---------------------------------------------------------------------------

def lin_defect(S: DilatationStructure, x, y, z, eps: Scale, mu: Scale) -> float:
    """d(delta^x_eps delta^y_mu z, delta^{delta^x_eps y}_mu delta^x_eps z).

    Zero exactly when dilatations based at different points commute the way
    conical-group ones do; the raw measure of nonlinearity otherwise.
    """
    if eps.nu > 1.0 or mu.nu > 1.0:
        raise ValueError("linearity defect expects contracting scales")
    lhs = S.dilate(x, eps, S.dilate(y, mu, z))
    rhs = S.dilate(S.dilate(x, eps, y), mu, S.dilate(x, eps, z))
    return S.distance(lhs, rhs)


def inflin_scan(S: DilatationStructure, x, y, z, eps_grid,
                cfg: Config = DEFAULTS) -> ConvergenceReport:
    """Second-order vanishing of nonlinearity: Lin(x, delta^x_eps y, z; eps, eps) / eps^2.

    Passes when the rescaled defects decrease (within jitter) to below one
    tenth of their initial value; identically-flat zero sequences pass.
    """
    values = []
    for eps in eps_grid:
        nu = eps.nu
        values.append(lin_defect(S, x, S.dilate(x, eps, y), z, eps, eps) / (nu * nu))
    ok = nonincreasing(values, cfg.jitter_factor, cfg.defect_floor)
    if values[0] > cfg.defect_floor:
        ok = ok and values[-1] < 0.1 * values[0]
    return make_report(eps_grid, values, ok,
                       {"model": S.name, "quantity": "lin-over-eps-squared"})


def plin1_scan(S: DilatationStructure, x, y, v, eps_grid,
               cfg: Config = DEFAULTS) -> ConvergenceReport:
    """First-order agreement of true and induced dilatations near delta^x_eps y.

    Sweeps (1/eps) (delta^x, eps)(delta^{delta^x_eps y}_eps v, delta-hat v)
    where delta-hat is the induced dilatation at scale eps anchored at the
    same point; the quantity must decrease to zero.
    """
    values = []
    for eps in eps_grid:
        u = S.dilate(x, eps, y)
        true_point = S.dilate(u, eps, v)
        hat = InducedStructure(S, x, eps).dilate(u, eps, v)
        values.append(rescaled_distance(S, x, eps, true_point, hat) / eps.nu)
    ok = nonincreasing(values, cfg.jitter_factor, cfg.defect_floor)
    if values[0] > cfg.defect_floor:
        ok = ok and values[-1] < 0.1 * values[0]
    return make_report(eps_grid, values, ok,
                       {"model": S.name, "quantity": "induced-dilatation-gap"})


def metric_tangent_scan(S: DilatationStructure, x, eps_grid, sample_count: int = 16,
                        seed: int = 0, cfg: Config = DEFAULTS) -> ConvergenceReport:
    """Quality of the tangent distance on shrinking balls.

    Sweeps sup |d(u, v) - d^x(u, v)| / nu(eps) over points at distance
    O(nu(eps)) from x, produced by contracting a fixed sample; a metric
    tangent space exists exactly when this dies out.
    """
    rng = np.random.default_rng(seed)
    budget = S.closeness_budget()
    base_pts = S.sample_ball(x, budget, sample_count, rng)
    values = []
    for eps in eps_grid:
        worst = 0.0
        moved = [S.dilate(x, eps, p) for p in base_pts]
        for i, u in enumerate(moved):
            v = moved[(i + 1) % len(moved)]
            worst = max(worst, abs(S.distance(u, v) - S.tangent_distance(x, u, v)))
        values.append(worst / eps.nu)
    ok = nonincreasing(values, cfg.jitter_factor, cfg.defect_floor)
    return make_report(eps_grid, values, ok,
                       {"model": S.name, "quantity": "metric-tangent-gap",
                        "seed": seed, "sample_count": sample_count})


# ---------------------------------------------------------------------------
# affine maps and derivatives
# ---------------------------------------------------------------------------

def check_affine_map(S: DilatationStructure, T, samples, eps_set,
                     tolerance: float = DEFAULTS.exact_identity_tol) -> ConvergenceReport:
    """Largest commutation defect d(T delta^x_eps y, delta^{Tx}_eps T y).

    samples is a list of (x, y) pairs; the report also carries an empirical
    Lipschitz constant of T over the sampled pairs.
    """
    lip = 0.0
    for x, y in samples:
        d = S.distance(x, y)
        if d > 0:
            lip = max(lip, S.distance(T(x), T(y)) / d)
    defects = []
    for eps in eps_set:
        worst = 0.0
        for x, y in samples:
            got = T(S.dilate(x, eps, y))
            want = S.dilate(T(x), eps, T(y))
            worst = max(worst, S.distance(got, want))
        defects.append(worst)
    verdict = max(defects) <= tolerance
    return make_report(eps_set, defects, verdict,
                       {"model": S.name, "quantity": "affine-commutation",
                        "lipschitz_estimate": lip, "tolerance": tolerance})


def pansu_derivative(Ssrc: DilatationStructure, Sdst: DilatationStructure, f, x, u,
                     eps_grid, cfg: Config = DEFAULTS,
                     tolerance: float = 1e-4) -> tuple[object, ConvergenceReport]:
    """Derivative of f at x along u as a tangent-group morphism value.

    Estimates Q^x(u) = lim delta^{f(x)}_{eps^-1} f(delta^x_eps u) over the
    grid, then recomputes the defining residual
    (1/eps) d(f(delta^x_eps u), delta^{f(x)}_eps Q^x(u)) with the estimate.
    A residual that refuses to decrease raises NonConvergent: the map is not
    differentiable at x along u, which is a finding, not a crash.
    """
    fx = f(x)
    candidates = [Sdst.dilate(fx, eps.inverse(), f(Ssrc.dilate(x, eps, u)))
                  for eps in eps_grid]
    increments = [Sdst.distance(a, b) for a, b in zip(candidates, candidates[1:])]
    floor = cfg.defect_floor
    for a, b in zip(increments, increments[1:]):
        if b > floor and b > a / cfg.cauchy_shrink + floor:
            raise NonConvergent(
                f"derivative candidates do not settle along u: {increments}")
    # estimate at one refinement past the grid so every residual row,
    # including the last, measures the estimate against fresh data
    ref = eps_grid[-1] * (eps_grid[-1] * eps_grid[-2].inverse())
    q = Sdst.dilate(fx, ref.inverse(), f(Ssrc.dilate(x, ref, u)))
    residuals = [Sdst.distance(f(Ssrc.dilate(x, eps, u)), Sdst.dilate(fx, eps, q)) / eps.nu
                 for eps in eps_grid]
    verdict = (residuals[-1] <= tolerance
               and nonincreasing(residuals, cfg.jitter_factor, cfg.defect_floor))
    report = make_report(eps_grid, residuals, verdict,
                         {"model": f"{Ssrc.name}->{Sdst.name}",
                          "quantity": "derivative-residual", "tolerance": tolerance})
    return q, report
