"""The noncommutative affine layer.

In a linear structure the composite of two contracting dilatations is again
a dilatation, based at the fixed point of the composite (the Menelaos
property) and with coefficient the product of the two.  This module hosts
that fixed point computed four independent ways (the two-sequence iteration,
plain Banach iteration of the composite, the h/g inversion in a group model,
and the Heisenberg closed form), the resulting collinear-triple geometry
with its ratio invariant, the barycentric and collinearity diagnostics that
separate the commutative case, the distance envelopes of the fixed point,
and the valuation counterexample on C x R.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from dilatation_lab.config import DEFAULTS
from dilatation_lab.errors import DomainViolation, MaxIterExceeded
from dilatation_lab.core.reports import ConvergenceReport, make_report
from dilatation_lab.core.scales import Scale
from dilatation_lab.core.structure import DilatationStructure
from dilatation_lab.emergent import check_affine_map, lin_defect
from dilatation_lab.models.base import GroupModel
from dilatation_lab.models.complexheis import ComplexHeisenbergModel
from dilatation_lab.models.heisenberg import HeisenbergModel

_RATE_FLOOR = 1e-8


def probe_points(S: DilatationStructure, center, radius: float, seed: int = 0,
                 lattice: int = 7, random: int = 9) -> list:
    """The standard identity-test probe set: a fixed lattice plus seeded fill."""
    rng = np.random.default_rng(seed)
    return S.sample_ball(center, radius, lattice + random, rng)


# ---------------------------------------------------------------------------
# Menelaos fixed points
# ---------------------------------------------------------------------------

@dataclass
class MenelaosResult:
    """Outcome of the two-sequence iteration toward the composite's base point."""

    w: object
    iterations: int
    residual: float
    contraction_rate: float
    step_rates: list[float] = field(default_factory=list)
    probe_defect: float = 0.0


def _check_contracting(eps: Scale, mu: Scale):
    if not (0.0 < eps.nu < 1.0 and 0.0 < mu.nu < 1.0):
        raise DomainViolation(
            f"Menelaos composites need nu in (0,1); got {eps.nu} and {mu.nu}")


def menelaos_iterate(S: DilatationStructure, x, eps: Scale, y, mu: Scale,
                     tol: float = DEFAULTS.fixed_point_tol,
                     max_iter: int = DEFAULTS.max_iter,
                     check_linearity: bool = True) -> MenelaosResult:
    """Find w with delta^x_eps delta^y_mu = delta^w_{eps mu} by the paired iteration

        x_{n+1} = delta_mu^{delta_eps^{x_n} y_n} x_n,   y_{n+1} = delta_eps^{x_n} y_n,

    whose two strands contract toward the common fixed point at the exact
    per-step rate nu(eps mu).  The result records the step rates, and the
    dilatation identity is spot-checked on three probe points.
    """
    _check_contracting(eps, mu)
    if check_linearity:
        defect = lin_defect(S, x, y, x, eps, mu)
        if defect > 1e-6:
            warnings.warn(
                f"{S.name} looks nonlinear near the inputs (defect {defect:.3g}); "
                "the composite may not be a dilatation", stacklevel=2)

    xn, yn = x, y
    gap = S.coordinate_gap(x, y)
    d_metric = S.distance(x, y)
    # contraction rates are read from metric distances, but only while they
    # sit safely above the resolution floor of the gauge
    rate_floor = max(_RATE_FLOOR, 1e-5 * max(1.0, d_metric))
    rates: list[float] = []
    stall = 0
    iterations = 0
    while gap > tol:
        if iterations >= max_iter:
            raise MaxIterExceeded(f"no convergence after {max_iter} iterations")
        y_next = S.dilate(xn, eps, yn)
        x_next = S.dilate(y_next, mu, xn)
        d_next = S.distance(x_next, y_next)
        if d_metric > rate_floor and d_next > 0:
            rates.append(d_next / d_metric)
        gap_next = S.coordinate_gap(x_next, y_next)
        if gap_next >= gap:
            stall += 1
            if stall >= 5:
                raise MaxIterExceeded(
                    f"contraction stalled for 5 consecutive steps at gap {gap_next:.3g}")
        else:
            stall = 0
        xn, yn, gap, d_metric = x_next, y_next, gap_next, d_next
        iterations += 1

    w = xn
    observed = float(np.median(rates)) if rates else float("nan")
    probes = probe_points(S, w, S.closeness_budget(), seed=0, lattice=3, random=0)
    probe_defect = 0.0
    for p in probes[:3]:
        lhs = S.dilate(x, eps, S.dilate(y, mu, p))
        rhs = S.dilate(w, eps * mu, p)
        probe_defect = max(probe_defect, S.coordinate_gap(lhs, rhs))
    return MenelaosResult(w, iterations, gap, observed, rates, probe_defect)


def banach_oracle(S: DilatationStructure, x, eps: Scale, y, mu: Scale, u0,
                  tol: float = DEFAULTS.fixed_point_tol,
                  max_iter: int = DEFAULTS.max_iter):
    """Independent fixed-point oracle: iterate u -> delta^x_eps delta^y_mu u.

    The composite contracts distances by the factor nu(eps mu) < 1, so plain
    iteration converges to the same w as the paired iteration.
    """
    if not eps.nu * mu.nu < 1.0:
        raise DomainViolation("the composite must contract: nu(eps mu) < 1")
    u = u0
    for _ in range(max_iter):
        nxt = S.dilate(x, eps, S.dilate(y, mu, u))
        if S.distance(nxt, u) <= tol:
            return nxt
        u = nxt
    raise MaxIterExceeded(f"no fixed point after {max_iter} iterations")


# ---------------------------------------------------------------------------
# the h/g inversion and the ratio function
# ---------------------------------------------------------------------------

def h_map(M: GroupModel, eps: Scale, x):
    """h_eps(x) = x . delta_eps(x^-1) = delta^x_eps e."""
    if not 0.0 < eps.nu < 1.0:
        raise DomainViolation(f"h needs nu(eps) in (0,1), got {eps.nu}")
    return M.group_product(x, M.ambient_dilate(eps, M.group_inverse(x)))


class GMapResult(NamedTuple):
    point: object
    truncation_bound: float


def g_map(M: GroupModel, eps: Scale, y, N: int) -> GMapResult:
    """Truncated inverse of h: the product delta_1(y) delta_eps(y) ... delta_{eps^N}(y).

    Extending the truncation from N to any longer product moves the result by
    at most nu(eps)^{N+1} / (1 - nu(eps)) times |y|, which is attached to the
    result as its error bound.
    """
    if not 0.0 < eps.nu < 1.0:
        raise DomainViolation(f"g needs nu(eps) in (0,1), got {eps.nu}")
    if N < 1:
        raise ValueError("truncation order N must be at least 1")
    out = y
    power = eps
    for _ in range(N):
        out = M.group_product(out, M.ambient_dilate(power, y))
        power = power * eps
    nu = eps.nu
    bound = nu ** (N + 1) / (1.0 - nu) * M.homogeneous_norm(y)
    return GMapResult(out, bound)


def ratio_point(M: GroupModel, x, y, eps: Scale, mu: Scale, N: int = 64):
    """The ratio function w(x, y, eps, mu) = g_{eps mu}(h_eps(x) . h_mu(delta_eps y)).

    Solves h_eps(x) . delta_eps(h_mu(y)) = h_{eps mu}(w) for w, which is the
    base point of the composite dilatation; agrees with both iterations.
    """
    _check_contracting(eps, mu)
    rhs = M.group_product(h_map(M, eps, x), h_map(M, mu, M.ambient_dilate(eps, y)))
    return g_map(M, eps * mu, rhs, N).point


def heisenberg_ratio_closed_form(M: HeisenbergModel, X, Y, eps: float, mu: float):
    """Exact base point of delta^X_eps delta^Y_mu in H(n).

    Componentwise in (planar, center) coordinates:

        z    = (1-eps)/(1-eps mu) x + eps(1-mu)/(1-eps mu) y
        zbar = (1-eps^2)/(1-eps^2 mu^2) xbar + eps^2 (1-mu^2)/(1-eps^2 mu^2) ybar
               + eps(1-eps)(1-mu) / (2 (1-eps^2 mu^2)) omega(x, y)
    """
    eps = float(eps)
    mu = float(mu)
    if eps * mu == 1.0:
        raise DomainViolation("the closed form needs eps mu != 1")
    n2 = 2 * M.n
    x, y = X[:n2], Y[:n2]
    xbar, ybar = X[n2], Y[n2]
    em = eps * mu
    z = (1.0 - eps) / (1.0 - em) * x + eps * (1.0 - mu) / (1.0 - em) * y
    em2 = em * em
    zbar = ((1.0 - eps * eps) * xbar + eps * eps * (1.0 - mu * mu) * ybar
            + eps * (1.0 - eps) * (1.0 - mu) / 2.0 * M.symplectic(x, y)) / (1.0 - em2)
    out = np.empty(M.coordinate_dim)
    out[:n2] = z
    out[n2] = zbar
    return out


# ---------------------------------------------------------------------------
# collinear triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollinearTriple:
    """Three points with exponents whose dilatation composite is the identity.

    The third exponent is always derived as 1/(alpha beta); construction
    rejects exponent data with any of the three equal to one.  Exponents may
    be floats or exact rationals.
    """

    x: object
    y: object
    z: object
    alpha: object
    beta: object

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if a <= 0 or b <= 0:
            raise ValueError("exponents must be positive")
        if 1.0 in (a, b) or a * b == 1.0:
            raise ValueError("all three exponents must differ from 1")

    @property
    def gamma(self):
        return 1 / (self.alpha * self.beta)

    @property
    def ratio_norm(self) -> float:
        """r = alpha / (1 - alpha beta), the basic invariant of the triple."""
        return float(self.alpha / (1 - self.alpha * self.beta))


def collinear_triple_from_ratio(M: GroupModel, x, y, alpha: float, beta: float,
                                N: int = 64) -> CollinearTriple:
    """Construct the unique triple over (x^alpha, y^beta) via the ratio function."""
    sg = M.scale_group
    z = ratio_point(M, x, y, sg.scale(alpha), sg.scale(beta), N)
    return CollinearTriple(x, y, z, alpha, beta)


def check_collinear(S: DilatationStructure, triple: CollinearTriple,
                    probes=None, seed: int = 0,
                    tolerance: float = DEFAULTS.exact_identity_tol) -> ConvergenceReport:
    """Identity defect of delta^x_alpha delta^y_beta delta^z_gamma on probe points."""
    sg = S.scale_group
    a, b, g = sg.scale(triple.alpha), sg.scale(triple.beta), sg.scale(triple.gamma)
    if probes is None:
        probes = probe_points(S, triple.x, S.closeness_budget(), seed)
    defects = []
    for p in probes:
        moved = S.dilate(triple.x, a, S.dilate(triple.y, b, S.dilate(triple.z, g, p)))
        defects.append(S.distance(moved, p))
    worst = max(defects)
    # reports are scale-indexed; an identity check is scale-free, so wrap the
    # probe defects in a single-scale report carrying the sup
    report = make_report([sg.contraction(1)], [worst], worst <= tolerance,
                         {"model": S.name, "quantity": "collinear-identity",
                          "ratio_norm": triple.ratio_norm, "probe_count": len(probes),
                          "probe_defects": defects, "tolerance": tolerance})
    return report


def reversed_collinear_search(M: HeisenbergModel, X, Y, Z, grid_lo: float = 1.01,
                              grid_hi: float = 4.0, resolution: int = 50,
                              probes=None, seed: int = 0) -> float:
    """Best identity defect of (Y^b', X^a', Z^g') over an exponent grid.

    Scans a resolution x resolution grid of (a', b') and returns the smallest
    probe-sup defect; a large minimum certifies that reversing the first two
    legs of a collinear triple is impossible for the given configuration.
    """
    sg = M.scale_group
    if probes is None:
        probes = probe_points(M, X, M.closeness_budget(), seed)
    alphas = np.linspace(grid_lo, grid_hi, resolution)
    best = float("inf")
    for a in alphas:
        sa = sg.scale(float(a))
        for b in alphas:
            sb = sg.scale(float(b))
            sc = sg.scale(1.0 / (float(a) * float(b)))
            worst = 0.0
            for p in probes:
                moved = M.dilate(Y, sb, M.dilate(X, sa, M.dilate(Z, sc, p)))
                worst = max(worst, M.distance(moved, p))
                if worst >= best:
                    break
            best = min(best, worst)
    return best


# ---------------------------------------------------------------------------
# barycentric and collinearity diagnostics
# ---------------------------------------------------------------------------

def barycentric_defect(S: DilatationStructure, x, y, eps: Scale) -> float:
    """d(delta^x_eps y, delta^y_{1-eps} x): zero exactly in the commutative case."""
    if hasattr(S, "barycentric_pair"):
        left, right = S.barycentric_pair(x, y, eps)
        return S.distance(left, right)
    nu = eps.nu
    if not 0.0 < nu < 1.0:
        raise DomainViolation(f"barycentric comparison needs nu(eps) in (0,1), got {nu}")
    one_minus = S.scale_group.scale(1.0 - eps.value)
    return S.distance(S.dilate(x, eps, y), S.dilate(y, one_minus, x))


def collinearity_defect(S: GroupModel, u, v, eps: Scale) -> float:
    """Triangle-equality gap of inv^u(v), u and delta^u_eps v.

    d(inv^u(v), u) + d(u, delta^u_eps v) - d(inv^u(v), delta^u_eps v); it is
    nonnegative and vanishes when the three points sit on a geodesic, which
    the barycentric condition forces.
    """
    if not 0.0 < eps.nu < 1.0:
        raise DomainViolation("collinearity diagnostic needs a contraction")
    inv_u = S.base_inverse(u, v)
    mid = S.dilate(u, eps, v)
    return S.distance(inv_u, u) + S.distance(u, mid) - S.distance(inv_u, mid)


def distance_estimates_check(S: DilatationStructure, x, y, eps: Scale, mu: Scale,
                             slack: float = 1e-9) -> tuple[float, float, bool]:
    """Envelopes of the composite's base point:

        d(x, w) <= nu(eps) / (1 - nu(eps mu)) d(x, delta^y_mu x)
        d(y, w) <= 1 / (1 - nu(eps mu)) d(y, delta^x_eps y)

    Returns the two left-hand sides and whether both inequalities hold with
    multiplicative slack 1 + slack.
    """
    _check_contracting(eps, mu)
    w = menelaos_iterate(S, x, eps, y, mu, check_linearity=False).w
    q = eps.nu * mu.nu
    lhs1 = S.distance(x, w)
    bound1 = eps.nu / (1.0 - q) * S.distance(x, S.dilate(y, mu, x))
    lhs2 = S.distance(y, w)
    bound2 = 1.0 / (1.0 - q) * S.distance(y, S.dilate(x, eps, y))
    ok = lhs1 <= bound1 * (1.0 + slack) + 1e-15 and lhs2 <= bound2 * (1.0 + slack) + 1e-15
    return lhs1, lhs2, ok


# ---------------------------------------------------------------------------
# the valuation counterexample
# ---------------------------------------------------------------------------

def _exact_cxr_product(a, b):
    # (x, x')(y, y') = (x + y, x' + y' + Im(x conj(y)) / 2) over Fractions
    return (a[0] + b[0], a[1] + b[1],
            a[2] + b[2] + (a[1] * b[0] - a[0] * b[1]) / 2)


def _exact_cxr_dilate(mu, a):
    # real scales only: delta_mu X = (mu x, mu^2 x')
    return (mu * a[0], mu * a[1], mu * mu * a[2])


def counterexample_check(M: ComplexHeisenbergModel, eps: float, Y, probes=None,
                         seed: int = 0, flip: bool = True) -> ConvergenceReport:
    """Composite dilatations on C x R with nu(eps mu) = 1.

    With mu = -1/eps (so eps mu = -1) the composite delta^X_eps delta^Y_mu,
    X the neutral element, is an isometry but *not* the left translation by
    its value at the neutral element: the report's defect is the probe-sup
    distance between the two maps, and it passes when the defect exceeds
    1e-6.  With flip=False the control case mu = +1/eps runs instead, where
    the composite *is* that translation and the defect must vanish.

    Both scales are real here, so every coordinate stays rational; the two
    maps are evaluated in exact Fraction arithmetic and only the final gauge
    distance goes through floating point.  A fourth-root gauge would
    otherwise inflate coordinate roundoff past any honest tolerance.
    """
    from fractions import Fraction

    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainViolation("the construction needs a real eps in (0,1)")
    sg = M.scale_group
    if probes is None:
        probes = probe_points(M, M.identity(), 1.0, seed)

    e = Fraction(eps)
    mu = -1 / e if flip else 1 / e
    y = tuple(Fraction(float(c)) for c in Y)

    def composite(u):
        inner = _exact_cxr_product(y, _exact_cxr_dilate(mu, _exact_cxr_product(
            (-y[0], -y[1], -y[2]), u)))
        return _exact_cxr_dilate(e, inner)

    head = composite((Fraction(0), Fraction(0), Fraction(0)))
    defect = 0.0
    for p in probes:
        u = tuple(Fraction(float(c)) for c in p)
        gap = _exact_cxr_product(tuple(-c for c in composite(u)),
                                 _exact_cxr_product(head, u))
        defect = max(defect, M.homogeneous_norm(
            np.array([float(gap[0]), float(gap[1]), float(gap[2])])))
    verdict = defect > 1e-6 if flip else defect <= DEFAULTS.exact_identity_tol
    return make_report([sg.scale(complex(eps))], [defect], verdict,
                       {"model": M.name, "quantity": "translation-defect",
                        "eps": eps, "eps_mu": -1.0 if flip else 1.0,
                        "probe_count": len(probes)})


# ---------------------------------------------------------------------------
# geometric affinity
# ---------------------------------------------------------------------------

def geometric_affinity_check(S: DilatationStructure, T, triple_samples,
                             probes=None, seed: int = 0,
                             tolerance: float = DEFAULTS.exact_identity_tol) -> ConvergenceReport:
    """Does T preserve collinear triples with their exponents?

    For each sampled triple the image triple ((Tx)^a, (Ty)^b, (Tz)^g) is run
    through the identity check; the report passes when every image defect
    stays below tolerance.  The metadata carries the commutation defect of T
    with dilatations on the same points, the equivalent characterization.
    """
    defects = []
    pts = []
    for triple in triple_samples:
        image = CollinearTriple(T(triple.x), T(triple.y), T(triple.z),
                                triple.alpha, triple.beta)
        rep = check_collinear(S, image, probes=probes, seed=seed, tolerance=tolerance)
        defects.append(rep.defect[0])
        pts.append((triple.x, triple.y))
    sg = S.scale_group
    commutation = check_affine_map(S, T, pts, [sg.contraction(k) for k in (1, 2, 3)],
                                   tolerance)
    worst = max(defects)
    return make_report([sg.contraction(1)], [worst], worst <= tolerance,
                       {"model": S.name, "quantity": "geometric-affinity",
                        "triple_defects": defects,
                        "commutation_defect": max(commutation.defect),
                        "commutation_pass": commutation.verdict,
                        "tolerance": tolerance})
