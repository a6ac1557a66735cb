"""Regime classification and optimal-barrier computation.

The optimal strategy family depends only on the sign of the drift and on
how the retained proportion beta compares with pvfactor = gamma/(gamma+delta)
(the EPV of one unit paid at the next decision time):

    mu >= 0, beta <= pv   -> periodic barrier b0*
    mu >= 0, beta >  pv   -> hybrid (a_p, a_c, b)
    mu <  0, beta >  pv   -> liquidation (b, inf)
    mu <  0, beta <= pv   -> periodic-zero, unless the fixed cost is small
                             enough that a finite liquidation window
                             (b1, b2) beats waiting

Hybrid barriers solve the smooth-fit system V'(a_p) = 1, V'(a_c) = beta,
V'(b-) = beta (with boundary variants a_p = 0 / a_p = a_c = 0). The solver
peels the system one dimension at a time:

    1. for fixed (a, l), the upper condition V'(b-) = beta pins y = b - a_c;
    2. for fixed (l, y), the same condition pins a in [0, a_bar];
    3. scanning y between the two extreme fits (a = a_bar and a = 0)
       locates V'(a_p) = 1, or the boundary a_p = 0;
    4. an outer expansion in l enforces V'(a_c) = beta, or accepts l = 0.

For mu < 0 everything reduces to closed forms plus one-dimensional
smallest-root scans.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

from .core import EXP_ARG_LIMIT, ModelParams, Roots, f, f_d1, solve_roots
from .errors import DivoptError, NoBracketError, OutOfRangeError, OverflowGuardError
from .rootfind import bisect_secant, bracket_geometric, smallest_root_scan
from .strategies import Hybrid, Liquidation, PeriodicBarrier, PeriodicZero, Strategy
from .values import ValueFunction

_GUARD = 0.9 * EXP_ARG_LIMIT


def _exps(x: float) -> float:
    if x > EXP_ARG_LIMIT:
        raise OverflowGuardError(x, EXP_ARG_LIMIT)
    return math.exp(x)


class Regime(enum.Enum):
    PROFITABLE_PERIODIC = "profitable_periodic"
    PROFITABLE_HYBRID = "profitable_hybrid"
    UNPROFITABLE_PERIODIC_ZERO = "unprofitable_periodic_zero"
    UNPROFITABLE_LIQUIDATION_FINITE = "unprofitable_liquidation_finite"
    UNPROFITABLE_LIQUIDATION_HALF = "unprofitable_liquidation_half"


@dataclass
class SolveReport:
    regime: Regime
    strategy: Strategy
    residuals: dict[str, float]
    boundary: dict[str, bool]
    tol: float
    asymptotic: bool = False
    diagnostics: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# periodic-zero closed forms (liquidate everything at the first decision time)


def _pz_value(params: ModelParams, roots: Roots, x: float) -> float:
    gd = params.gamma + params.delta
    k = -params.gamma * params.mu / gd**2
    return k * _exps(roots.s1 * x) + roots.pvfactor * (x + params.mu / gd)


def _pz_d1(params: ModelParams, roots: Roots, x: float) -> float:
    gd = params.gamma + params.delta
    k = -params.gamma * params.mu / gd**2
    return k * roots.s1 * _exps(roots.s1 * x) + roots.pvfactor


# ---------------------------------------------------------------------------
# auxiliary quantities for classification and limits


def Q(params: ModelParams, roots: Roots, a: float) -> float:
    """Q(a) = 1 - (f(a)/f'(a)) / (mu/delta), decreasing from 1 to 0 on [0, a_bar].

    Maps the periodic lower barrier to the unit interval; only defined for
    mu > 0 (for mu <= 0 the support of a collapses to {0}).
    """
    if params.mu <= 0.0:
        raise OutOfRangeError("Q requires mu > 0")
    return 1.0 - (float(f(roots, a)) / float(f_d1(roots, a))) * (
        params.delta / params.mu
    )


def Q_inv(params: ModelParams, roots: Roots, q: float) -> float:
    """Inverse of Q on [0, a_bar] by bisection."""
    if not 0.0 <= q <= 1.0:
        raise OutOfRangeError(f"q must be in [0, 1], got {q}")
    if roots.a_bar == 0.0:
        return 0.0
    return bisect_secant(lambda a: Q(params, roots, a) - q, 0.0, roots.a_bar)


def I_func(params: ModelParams, roots: Roots, x: float, q: float) -> float:
    """Separation between V'(a_p) and its barrier-free level, given V'(b-) = beta.

    I(x, q) = [alpha + (pv - (-s1 pv)/(-s1 + q (r1+s1))) e^{s1 x}]
              / [g'(x) + g(x) (-r1 s1) (mu/(gamma+delta)) (1 - q)]

    It decays to 0 as x grows, which is what makes the barrier conditions
    asymptotically decouple when b - a_c diverges.
    """
    gd = params.gamma + params.delta
    pv = roots.pvfactor
    r1, s1 = roots.r1, roots.s1
    t = (-s1 * pv) / (-s1 + q * (r1 + s1))
    er, es = _exps(r1 * x), _exps(s1 * x)
    gx = er - es
    gpx = r1 * er - s1 * es
    num = roots.alpha + (pv - t) * es
    den = gpx + gx * (-r1 * s1) * (params.mu / gd) * (1.0 - q)
    return num / den


def a_beta(params: ModelParams, roots: Roots, beta_prime: float | None = None) -> float:
    """Level where the periodic-zero value slope equals beta_prime (mu < 0).

    Closed form from V'(x; pi0) = beta': the exponential term is isolated
    and logged. Requires V'(0; pi0) < beta' < gamma/(gamma+delta).
    """
    if params.mu >= 0.0:
        raise OutOfRangeError("a_beta requires mu < 0")
    bp = params.beta if beta_prime is None else beta_prime
    pv = roots.pvfactor
    gd = params.gamma + params.delta
    k = -params.gamma * params.mu / gd**2  # > 0 for mu < 0
    lo = _pz_d1(params, roots, 0.0)
    if not lo < bp < pv:
        raise OutOfRangeError(
            f"beta' must lie in (V'(0; pi0), pv) = ({lo:.6g}, {pv:.6g}), got {bp}"
        )
    return math.log((pv - bp) / (k * (-roots.s1))) / roots.s1


def c_beta_chi(params: ModelParams, roots: Roots) -> float:
    """Unique point in (0, a_beta) where V(x; pi0) = beta x - chi.

    Below it, liquidating everything now nets less than waiting; above it,
    more. Exists exactly when waiting loses at the slope-match level.
    """
    ab = a_beta(params, roots)
    fn = lambda x: _pz_value(params, roots, x) - (params.beta * x - params.chi)
    if not fn(ab) < 0.0:
        raise OutOfRangeError(
            "V(a_beta; pi0) >= beta a_beta - chi: no crossing point exists"
        )
    return bisect_secant(fn, 0.0, ab)


def cost_ratio_limit(
    params: ModelParams, roots: Roots, beta_prime: float
) -> float:
    """Largest affordable chi/beta for a finite liquidation window.

    Equals a_{beta'} - V(a_{beta'}; pi0)/beta'; increases from 0 at
    beta' = V'(0; pi0) to -mu/(gamma+delta) as beta' approaches pv.
    """
    if params.mu >= 0.0:
        raise OutOfRangeError("cost_ratio_limit requires mu < 0")
    lo = _pz_d1(params, roots, 0.0)
    pv = roots.pvfactor
    if not lo <= beta_prime < pv:
        raise OutOfRangeError(
            f"beta' must lie in [V'(0; pi0), pv) = [{lo:.6g}, {pv:.6g}), got {beta_prime}"
        )
    if beta_prime == lo:
        return 0.0
    ab = a_beta(params, roots, beta_prime)
    return ab - _pz_value(params, roots, ab) / beta_prime


def beta0(params: ModelParams, roots: Roots) -> float:
    """Threshold retained proportion separating periodic-zero from (b1, b2).

    Solves cost_ratio_limit(beta0) = chi/beta by bisection; only defined
    when chi/beta < -mu/(gamma+delta), otherwise the limit is never reached.
    """
    if params.mu >= 0.0:
        raise OutOfRangeError("beta0 requires mu < 0")
    target = params.chi / params.beta
    gd = params.gamma + params.delta
    if target >= -params.mu / gd:
        raise OutOfRangeError(
            f"chi/beta = {target:.6g} >= -mu/(gamma+delta) = {-params.mu / gd:.6g}"
        )
    pv = roots.pvfactor
    lo = _pz_d1(params, roots, 0.0)
    fn = lambda bp: cost_ratio_limit(params, roots, bp) - target
    hi = pv - (pv - lo) * 1e-15
    # the limit approaches -mu/(gamma+delta) only as beta' -> pv; tighten
    # the upper end until it brackets
    while fn(hi) < 0.0:
        hi = pv - (pv - hi) * 0.1
        if pv - hi < 1e-300:
            raise NoBracketError("cost_ratio_limit never reaches chi/beta")
    return bisect_secant(fn, lo * (1.0 + 1e-14) + 1e-300, hi)


def nu_riskiness(params: ModelParams) -> float:
    """(sigma/mu)^2 (gamma+delta): squared coefficient of variation per decision."""
    if params.mu == 0.0:
        raise OutOfRangeError("nu is undefined at mu = 0")
    return (params.sigma / params.mu) ** 2 * (params.gamma + params.delta)


@dataclass(frozen=True)
class SufficientConditionHints:
    """Advisory predictions of boundary cases from closed-form thresholds.

    predict_ap_zero: (-s1/r1) pv <= 1 suggests the periodic lower barrier
    collapses to 0; predict_ac_zero: <= beta suggests both lower barriers
    collapse. Advisory only; the solver decides, these are cross-checked.
    """

    predict_ap_zero: bool
    predict_ac_zero: bool
    nu: float
    ratio: float


def sufficient_condition_hints(
    params: ModelParams, roots: Roots
) -> SufficientConditionHints:
    if params.mu <= 0.0:
        raise OutOfRangeError("hints are defined for mu > 0")
    ratio = (-roots.s1 / roots.r1) * roots.pvfactor
    return SufficientConditionHints(
        predict_ap_zero=ratio <= 1.0,
        predict_ac_zero=ratio <= params.beta,
        nu=nu_riskiness(params),
        ratio=ratio,
    )


# ---------------------------------------------------------------------------
# regime classification


def classify_regime(params: ModelParams, roots: Roots) -> Regime:
    """Exactly one regime per valid parameter set.

    For mu < 0 with beta below pv, the finite liquidation window wins iff
    waiting at the slope-match level nets less than liquidating there now
    (V(a_beta; pi0) < beta a_beta - chi); this is the direct form of the
    beta > beta0 comparison and avoids inverting the threshold curve.
    """
    pv = roots.pvfactor
    if params.mu >= 0.0:
        if params.beta <= pv:
            return Regime.PROFITABLE_PERIODIC
        return Regime.PROFITABLE_HYBRID
    if params.beta > pv:
        return Regime.UNPROFITABLE_LIQUIDATION_HALF
    gd = params.gamma + params.delta
    if params.chi >= params.beta * (-params.mu) / gd:
        return Regime.UNPROFITABLE_PERIODIC_ZERO
    if params.beta == pv:
        return Regime.UNPROFITABLE_LIQUIDATION_HALF
    if params.beta <= _pz_d1(params, roots, 0.0):
        return Regime.UNPROFITABLE_PERIODIC_ZERO
    ab = a_beta(params, roots)
    if _pz_value(params, roots, ab) < params.beta * ab - params.chi:
        return Regime.UNPROFITABLE_LIQUIDATION_FINITE
    return Regime.UNPROFITABLE_PERIODIC_ZERO


def periodic_b0(params: ModelParams, roots: Roots) -> float:
    """Optimal pure-periodic barrier.

    Zero when (-s1/r1) pv <= 1; otherwise the unique level where Q hits the
    target q* = s1 (delta/(gamma+delta)) / (r1 + s1).
    """
    pv = roots.pvfactor
    if (-roots.s1 / roots.r1) * pv <= 1.0:
        return 0.0
    gd = params.gamma + params.delta
    q_star = roots.s1 * (params.delta / gd) / (roots.r1 + roots.s1)
    return Q_inv(params, roots, q_star)


# ---------------------------------------------------------------------------
# hybrid solve


def _hybrid_point(params: ModelParams, roots: Roots, a: float, l: float, y: float):
    """V' at the three barriers for the raw triple (a, l, y); scalar-fast.

    Returns (vp_a, vp_ac, vp_b, C). No admissibility checks: the solver
    probes freely inside its search box.
    """
    r0, s0, r1, s1 = roots.r0, roots.s0, roots.r1, roots.s1
    gd = params.gamma + params.delta
    pv = roots.pvfactor
    d = l + y
    er0a, es0a = _exps(r0 * a), _exps(s0 * a)
    er1d, es1d = _exps(r1 * d), _exps(s1 * d)
    er1l, es1l = _exps(r1 * l), _exps(s1 * l)
    fa = er0a - es0a
    fpa = r0 * er0a - s0 * es0a
    gdl = er1d - es1d - (er1l - es1l)
    Jdl = -s1 * gdl + (r1 - s1) * (es1d - es1l)
    num = (
        (r1 - s1) * (roots.alpha * y - params.chi)
        + pv * gdl
        + (params.gamma * params.mu / gd**2) * Jdl
    )
    den = (params.delta / gd) * fa * Jdl + fpa * gdl
    C = num / den
    B = (params.delta / gd) * C * fa - pv * params.mu / gd
    # cancellation-free form of A = (C f'(a) - B s1 - pv)/(r1 - s1): the
    # direct difference loses all precision once it is multiplied by the
    # growing exponential, this one never differences large terms
    P = fpa - s1 * (params.delta / gd) * fa
    curv = params.mu * fpa - params.delta * fa
    A = ((roots.alpha * y - params.chi) * P + (pv / gd) * curv * (es1d - es1l)) / den
    at, bt = A, B - A
    vp_b = at * r1 * er1d + bt * s1 * es1d + pv
    vp_ac = at * r1 * er1l + bt * s1 * es1l + pv
    vp_a = C * fpa
    return vp_a, vp_ac, vp_b, C


def solve_hybrid(
    params: ModelParams,
    roots: Roots,
    tol: float = 1e-10,
    *,
    l_step0: float | None = None,
    y_seed: float | None = None,
) -> SolveReport:
    """Optimal hybrid (a_p, a_c, b) for mu >= 0, beta > gamma/(gamma+delta).

    l_step0 and y_seed only perturb where the bracket searches start; the
    solved barriers do not depend on them (the system has a unique
    solution), which the tests exercise directly.
    """
    if params.beta <= roots.pvfactor:
        raise OutOfRangeError("hybrid solve requires beta > gamma/(gamma+delta)")
    beta = params.beta
    r1, s1 = roots.r1, roots.s1
    abar = roots.a_bar
    len_r, len_s = 1.0 / r1, 1.0 / abs(s1)
    # the optimal payment gap satisfies y* > chi/alpha; once that floor
    # exceeds what the exponential guard admits, b* is out of reach and
    # only the decoupled asymptotic description remains
    if params.chi > 0.0 and params.chi / roots.alpha > 0.9 * _GUARD / r1:
        raise OverflowGuardError(r1 * params.chi / roots.alpha, _GUARD)

    def vp_b(a, l, y):
        return _hybrid_point(params, roots, a, l, y)[2]

    def y_root(a: float, l: float) -> float:
        # unique y with V'(b-) = beta at this (a, l)
        fn = lambda y: vp_b(a, l, y) - beta
        y_cap = _GUARD / r1 - l
        if y_cap <= 0.0:
            raise OverflowGuardError(r1 * l, _GUARD)
        y0 = y_seed if y_seed is not None else 1e-6 * len_r
        y0 = min(y0, 0.5 * y_cap)
        lo, hi, flo, fhi = bracket_geometric(fn, y0, factor=1.7, x_max=y_cap)
        return bisect_secant(fn, lo, hi, flo, fhi)

    def a_of_y(l: float, y: float) -> float:
        if abar == 0.0:
            return 0.0
        fn = lambda a: vp_b(a, l, y) - beta
        flo, fhi = fn(0.0), fn(abar)
        if flo * fhi > 0.0:
            # y numerically at an end of its admissible band for this l
            return 0.0 if abs(flo) <= abs(fhi) else abar
        return bisect_secant(fn, 0.0, abar, flo, fhi)

    def inner(l: float) -> tuple[float, float]:
        # (a, y) with V'(b-) = beta and V'(a) = 1, or a = 0 with V'(0) <= 1.
        # Walk y upward from the a = a_bar fit: the matched a(y) falls and
        # V'(a(y)) rises, so the first of {V'(a) = 1, a = 0} wins. The a = 0
        # fit can sit beyond the overflow guard even when the solution does
        # not, so it is never used as an anchor.
        if abar == 0.0:
            return 0.0, y_root(0.0, l)
        y_lo = y_root(abar, l)
        gap_lo = _hybrid_point(params, roots, abar, l, y_lo)[0] - 1.0
        if gap_lo >= 0.0:
            return abar, y_lo

        def slope_gap(y: float) -> float:
            a = a_of_y(l, y)
            return _hybrid_point(params, roots, a, l, y)[0] - 1.0

        y_cap = _GUARD / r1 - l
        y_prev, gap_prev = y_lo, gap_lo
        y_cur = y_lo
        for _ in range(200):
            y_cur = min(y_cur * 1.6, y_cap)
            if vp_b(0.0, l, y_cur) >= beta:
                # passed the a = 0 fit; unless the slope condition crossed
                # just below it, the boundary case binds (a = 0, V'(0) <= 1)
                y0 = bisect_secant(
                    lambda y: vp_b(0.0, l, y) - beta, y_prev, y_cur
                )
                gap_at_y0 = slope_gap(y0 * (1.0 - 1e-12))
                if gap_at_y0 >= 0.0:
                    ystar = bisect_secant(
                        slope_gap, y_prev, y0 * (1.0 - 1e-12), gap_prev, gap_at_y0
                    )
                    return a_of_y(l, ystar), ystar
                return 0.0, y0
            gap_cur = slope_gap(y_cur)
            if gap_cur >= 0.0:
                ystar = bisect_secant(slope_gap, y_prev, y_cur, gap_prev, gap_cur)
                return a_of_y(l, ystar), ystar
            y_prev, gap_prev = y_cur, gap_cur
            if y_cur >= y_cap:
                raise OverflowGuardError(r1 * (l + y_cap), _GUARD)
        raise NoBracketError("slope condition V'(a) = 1 not bracketed in y")

    def middle_gap(l: float) -> tuple[float, float, float]:
        a, y = inner(l)
        return _hybrid_point(params, roots, a, l, y)[1] - beta, a, y

    gap0, a0, y0 = middle_gap(0.0)
    if gap0 <= 0.0:
        a, l, y = a0, 0.0, y0
    else:
        step = l_step0 if l_step0 is not None else 0.25 * len_s
        l_prev, gap_prev = 0.0, gap0
        l_cur = step
        for _ in range(200):
            gap_cur, _, _ = middle_gap(l_cur)
            if gap_prev * gap_cur <= 0.0:
                break
            l_prev, gap_prev = l_cur, gap_cur
            l_cur *= 1.7
        else:
            raise NoBracketError("V'(a_c) = beta: no sign change while expanding l")
        l = bisect_secant(lambda ll: middle_gap(ll)[0], l_prev, l_cur, gap_prev, gap_cur)
        a, y = inner(l)

    strategy = Hybrid(a, a + l, a + l + y)
    vf = ValueFunction(params, roots, strategy)
    residuals = {"vprime_b": abs(float(vf.d1(strategy.b, side="left")) - beta)}
    boundary = {"ap_zero": a == 0.0, "ac_equals_ap": l == 0.0}
    if l > 0.0:
        residuals["vprime_ac"] = abs(float(vf.d1(strategy.a_c)) - beta)
    else:
        residuals["vprime_ac"] = max(0.0, float(vf.d1(0.0)) - beta)
    if a > 0.0:
        residuals["vprime_ap"] = abs(float(vf.d1(strategy.a_p)) - 1.0)
    else:
        residuals["vprime_ap"] = max(0.0, float(vf.d1(0.0)) - 1.0)
    report = SolveReport(
        regime=Regime.PROFITABLE_HYBRID,
        strategy=strategy,
        residuals=residuals,
        boundary=boundary,
        tol=tol,
    )
    _enforce_tol(report)
    return report


def _asymptotic_hybrid(params: ModelParams, roots: Roots, tol: float) -> SolveReport:
    # beta so close to pv that b* overflows the guard: report the
    # decoupled limits (periodic level for a_p, the x -> inf root of the
    # separation function for l) and flag the result.
    pv = roots.pvfactor
    r1, s1 = roots.r1, roots.s1
    ap = periodic_b0(params, roots)
    q = 1.0 if ap == 0.0 else Q(params, roots, ap)
    t = (-s1 * pv) / (-s1 + q * (r1 + s1))
    if t > params.beta:
        l = math.log(roots.alpha / (t - pv)) / s1
    else:
        l = 0.0
    strategy = Hybrid(ap, ap + l, math.inf)
    return SolveReport(
        regime=Regime.PROFITABLE_HYBRID,
        strategy=strategy,
        residuals={},
        boundary={"ap_zero": ap == 0.0, "ac_equals_ap": l == 0.0},
        tol=tol,
        asymptotic=True,
        diagnostics={"note": "upper barrier beyond overflow guard; limits reported"},
    )


# ---------------------------------------------------------------------------
# unprofitable solve


def _liq_d1_left(params: ModelParams, roots: Roots, b: float) -> float:
    # V'(b-; pi_{b, .}) = A(b) g'(b) + V'(b; pi0); independent of the upper
    # barrier. A g' is evaluated through the bounded ratio g'/g (the two
    # factors overflow separately once r1 b is large, their product not).
    gd = params.gamma + params.delta
    gm2 = params.gamma * params.mu / gd**2
    r1, s1 = roots.r1, roots.s1
    w = math.exp((s1 - r1) * b)
    num = roots.alpha * b - params.chi - gm2 * (1.0 - math.exp(s1 * b))
    ratio = (r1 - s1 * w) / (1.0 - w)  # = g'(b)/g(b)
    return num * ratio + _pz_d1(params, roots, b)


def solve_unprofitable(
    params: ModelParams, roots: Roots, tol: float = 1e-10
) -> SolveReport:
    """Optimal strategy for mu < 0, per the classified regime."""
    if params.mu >= 0.0:
        raise OutOfRangeError("solve_unprofitable requires mu < 0")
    regime = classify_regime(params, roots)
    beta = params.beta
    fn = lambda b: _liq_d1_left(params, roots, b) - beta

    if regime is Regime.UNPROFITABLE_PERIODIC_ZERO:
        return SolveReport(
            regime=regime,
            strategy=PeriodicZero(),
            residuals={},
            boundary={},
            tol=tol,
        )

    if regime is Regime.UNPROFITABLE_LIQUIDATION_HALF:
        lo = params.chi / beta if params.chi > 0.0 else 0.0
        step = lo / 10.0 if lo > 0.0 else 0.05 / abs(roots.s1)
        lo = lo + 1e-12 * (1.0 + lo)
        window = max(20.0 * step, 1.0 / roots.r1)
        b = None
        for _ in range(60):
            try:
                b = smallest_root_scan(fn, lo, lo + window, step)
                break
            except NoBracketError:
                lo, window = lo + window, window * 2.0
        if b is None:
            raise NoBracketError("no liquidation barrier found: V'(b-) never meets beta")
        strategy = Liquidation(b, math.inf)
        vf = ValueFunction(params, roots, strategy)
        report = SolveReport(
            regime=regime,
            strategy=strategy,
            residuals={"vprime_b1": abs(float(vf.d1(b, side="left")) - beta)},
            boundary={},
            tol=tol,
        )
        _enforce_tol(report)
        return report

    # finite (b1, b2) window
    gd = params.gamma + params.delta
    gm2 = params.gamma * params.mu / gd**2
    ab = a_beta(params, roots)
    c = c_beta_chi(params, roots)
    # V'(b2+) = beta reduces to a linear equation in b2
    b2 = (params.chi * roots.s1 + roots.s1 * gm2 - (roots.pvfactor - beta)) / (
        roots.s1 * roots.alpha
    )
    step = min(params.chi / beta / 10.0, (ab - c) / 16.0)
    b1 = smallest_root_scan(fn, c, ab, step)
    strategy = Liquidation(b1, b2)
    vf = ValueFunction(params, roots, strategy)
    report = SolveReport(
        regime=regime,
        strategy=strategy,
        residuals={
            "vprime_b1": abs(float(vf.d1(b1, side="left")) - beta),
            "vprime_b2": abs(float(vf.d1(b2, side="right")) - beta),
        },
        boundary={},
        tol=tol,
        diagnostics={"a_beta": ab, "c_beta_chi": c},
    )
    _enforce_tol(report)
    return report


# ---------------------------------------------------------------------------
# top-level dispatch


def _enforce_tol(report: SolveReport) -> None:
    bad = {k: v for k, v in report.residuals.items() if not v < report.tol}
    if bad:
        raise DivoptError(f"solver residuals exceed tol={report.tol}: {bad}")


def solve(params: ModelParams, tol: float = 1e-10, **knobs) -> SolveReport:
    """Classify the regime and compute the optimal strategy.

    On an overflow-guard trip the solve retries once in rescaled monetary
    units (which cures window-sizing pathologies); if the trip persists in
    the hybrid regime it reports the asymptotic decomposition instead.
    """
    roots = solve_roots(params)
    regime = classify_regime(params, roots)
    if regime is Regime.PROFITABLE_PERIODIC:
        b0 = periodic_b0(params, roots)
        residuals = {}
        if b0 > 0.0:
            gd = params.gamma + params.delta
            q_star = roots.s1 * (params.delta / gd) / (roots.r1 + roots.s1)
            residuals["periodic_target"] = abs(Q(params, roots, b0) - q_star)
        report = SolveReport(
            regime=regime,
            strategy=PeriodicBarrier(b0),
            residuals=residuals,
            boundary={"b0_zero": b0 == 0.0},
            tol=tol,
        )
        _enforce_tol(report)
        return report
    if regime is Regime.PROFITABLE_HYBRID:
        try:
            return solve_hybrid(params, roots, tol, **knobs)
        except OverflowGuardError:
            pass
        k = 1.0 / 1024.0
        try:
            scaled = solve_hybrid(params.rescaled(k), solve_roots(params.rescaled(k)), tol, **knobs)
            st = scaled.strategy
            report = SolveReport(
                regime=scaled.regime,
                strategy=Hybrid(st.a_p / k, st.a_c / k, st.b / k),
                residuals=scaled.residuals,
                boundary=scaled.boundary,
                tol=tol,
                diagnostics={"rescaled_by": k},
            )
            return report
        except OverflowGuardError:
            return _asymptotic_hybrid(params, roots, tol)
    return solve_unprofitable(params, roots, tol)
