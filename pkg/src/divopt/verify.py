"""Independent numerical checks on solver output.

Three oracles, deliberately decoupled from the solver internals:

* check_hjb evaluates the variational inequalities that certify
  optimality, on a dense surplus grid with a discrete supremum over
  payment sizes. It consumes only the value-function evaluator.
* brute_force_hybrid exhaustively maximises the hybrid objective
  V(a_c) - beta a_c over a barrier lattice, using only the closed-form
  coefficients.
* audit_derivative_pattern verifies the characteristic slope bands of an
  optimal hybrid value function (V' > 1 below a_p, between beta and 1 on
  (a_p, a_c), between 0 and beta on (a_c, b), constant beta beyond b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ModelParams, Roots, exp_guarded, f, f_d1
from .strategies import Hybrid, Liquidation, PeriodicBarrier, Strategy
from .values import ValueFunction


@dataclass
class HJBReport:
    n_points: int
    tol: float
    max_generator_violation: float
    worst_x_generator: float
    max_payment_residual: float
    worst_x_payment: float
    passed: bool
    generator_argmax_xi: np.ndarray = field(repr=False)
    x_generator: np.ndarray = field(repr=False)


def _strategy_levels(strategy: Strategy) -> list[float]:
    if isinstance(strategy, Hybrid):
        lv = [strategy.a_p, strategy.a_c, strategy.b]
    elif isinstance(strategy, Liquidation):
        lv = [strategy.b1, strategy.b2]
    elif isinstance(strategy, PeriodicBarrier):
        lv = [strategy.b]
    else:
        lv = []
    return [v for v in lv if math.isfinite(v)]


def check_hjb(
    params: ModelParams,
    roots: Roots,
    strategy: Strategy,
    x_grid: np.ndarray | None = None,
    xi_grid_density: int = 200,
    tol: float = 1e-6,
    kink_window: float = 1e-6,
) -> HJBReport:
    """Grid check of the two optimality inequalities for V = V(.; strategy).

    Condition A (away from kinks): the discounted generator plus the best
    periodic payment improvement must be non-positive,

        sigma^2/2 V'' + mu V' - delta V
            + gamma sup_{0 <= xi <= x} (xi + V(x - xi) - V(x)) <= 0.

    Condition B (everywhere): no immediate payment can improve V,

        sup_{0 <= xi <= x} ((beta xi - chi) 1{xi>0} + V(x - xi) - V(x)) = 0,

    where the xi = 0 entry contributes 0, so the supremum is >= 0 and any
    strictly positive value is a violation.

    Both residuals are scaled by 1 + |V(x)|. The xi grid is a uniform fill
    of [0, x] augmented with the exact analytic maximiser candidates
    x - (strategy level), so no discretisation slack is paid at the
    maximiser. Points within kink_window of a kink are skipped for
    condition A (V'' is undefined there).
    """
    vf = ValueFunction(params, roots, strategy)
    levels = _strategy_levels(strategy)
    if x_grid is None:
        top = max(levels) if levels else 1.0 / abs(roots.s1) + 1.0 / roots.r1
        x_grid = np.linspace(0.0, 3.0 * top, 2000)
    x = np.asarray(x_grid, dtype=float)

    v = vf(x)
    scale = 1.0 + np.abs(v)

    u = np.linspace(0.0, 1.0, xi_grid_density)
    xi = x[:, None] * u[None, :]
    cand = [np.clip(x - lev, 0.0, x) for lev in levels]
    if cand:
        xi = np.concatenate([xi] + [c[:, None] for c in cand], axis=1)
    v_after = vf(x[:, None] - xi)

    # condition A
    improve = xi + v_after - v[:, None]
    sup_a = improve.max(axis=1)
    argmax_xi = xi[np.arange(len(x)), improve.argmax(axis=1)]
    d1 = vf.d1(x)
    d2 = vf.d2(x)
    gen = 0.5 * params.sigma**2 * d2 + params.mu * d1 - params.delta * v
    resid_a = (gen + params.gamma * sup_a) / scale
    ok_a = np.ones_like(x, dtype=bool)
    for k in vf.kinks:
        ok_a &= np.abs(x - k) > kink_window
    if ok_a.any():
        ia = int(np.argmax(np.where(ok_a, resid_a, -np.inf)))
        max_a, worst_a = float(resid_a[ia]), float(x[ia])
    else:
        max_a, worst_a = -math.inf, math.nan

    # condition B
    pay = np.where(xi > 0.0, params.beta * xi - params.chi, 0.0) + v_after - v[:, None]
    resid_b = np.maximum(pay.max(axis=1), 0.0) / scale
    ib = int(np.argmax(resid_b))
    max_b, worst_b = float(resid_b[ib]), float(x[ib])

    return HJBReport(
        n_points=len(x),
        tol=tol,
        max_generator_violation=max_a,
        worst_x_generator=worst_a,
        max_payment_residual=max_b,
        worst_x_payment=worst_b,
        passed=(max_a <= tol) and (max_b <= tol),
        generator_argmax_xi=argmax_xi,
        x_generator=x,
    )


@dataclass
class GridSearchResult:
    a: float
    l: float
    y: float
    objective: float
    n_per_axis: int
    bounds: tuple[float, float]

    @property
    def barriers(self) -> tuple[float, float, float]:
        return self.a, self.a + self.l, self.a + self.l + self.y


def hybrid_objective(params: ModelParams, roots: Roots, a, l, y):
    """V(a_c) - beta a_c from the closed-form coefficients; broadcasts."""
    a = np.asarray(a, dtype=float)
    l = np.asarray(l, dtype=float)
    y = np.asarray(y, dtype=float)
    gd = params.gamma + params.delta
    pv = roots.pvfactor
    r1, s1 = roots.r1, roots.s1
    d = l + y
    fa, fpa = f(roots, a), f_d1(roots, a)
    er1d, es1d = exp_guarded(r1 * d), exp_guarded(s1 * d)
    er1l, es1l = exp_guarded(r1 * l), exp_guarded(s1 * l)
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
    A = (C * fpa - B * s1 - pv) / (r1 - s1)
    gl = er1l - es1l
    v_ac = A * gl + B * es1l + pv * (l + params.mu / gd + C * fa)
    return v_ac - params.beta * (a + l)


def brute_force_hybrid(
    params: ModelParams,
    roots: Roots,
    bounds: tuple[float, float] | None = None,
    n_per_axis: int = 40,
) -> GridSearchResult:
    """Exhaustive lattice maximisation of V(a_c) - beta a_c.

    The lattice covers [0, a_bar] x [0, l_max] x (chi/beta, y_max]; payment
    gaps at or below chi/beta are excluded since they net nothing. bounds
    = (l_max, y_max); defaults are generous multiples of the exponential
    length scales.
    """
    len_r, len_s = 1.0 / roots.r1, 1.0 / abs(roots.s1)
    if bounds is None:
        l_max = 6.0 * len_s + 2.0 * len_r
        y_max = 3.0 * params.chi / roots.alpha + 8.0 * len_r
        bounds = (l_max, y_max)
    l_max, y_max = bounds
    y_lo = params.chi / params.beta + max(y_max * 1e-6, 1e-12)
    a_grid = (
        np.linspace(0.0, roots.a_bar, n_per_axis) if roots.a_bar > 0 else np.zeros(1)
    )
    l_grid = np.linspace(0.0, l_max, n_per_axis)
    y_grid = np.linspace(y_lo, y_max, n_per_axis)
    obj = hybrid_objective(
        params,
        roots,
        a_grid[:, None, None],
        l_grid[None, :, None],
        y_grid[None, None, :],
    )
    idx = np.unravel_index(np.argmax(obj), obj.shape)
    return GridSearchResult(
        a=float(a_grid[idx[0]]),
        l=float(l_grid[idx[1]]),
        y=float(y_grid[idx[2]]),
        objective=float(obj[idx]),
        n_per_axis=n_per_axis,
        bounds=bounds,
    )


@dataclass
class PatternAudit:
    passed: bool
    branch: str
    violations: list[tuple[float, float, str]]


def audit_derivative_pattern(
    params: ModelParams,
    roots: Roots,
    strategy: Hybrid,
    n_points: int = 2000,
    atol: float = 1e-9,
) -> PatternAudit:
    """Check the slope-band pattern of a candidate-optimal hybrid strategy.

    a_p > 0:           V' > 1 on [0, a_p), in (beta, 1) on (a_p, a_c),
                       in (0, beta) on (a_c, b), identically beta beyond b.
    a_p = 0 < a_c:     V'(0) in (beta, 1]; otherwise as above.
    a_p = a_c = 0:     V'(0) in (0, beta]; V' in (0, beta) on (0, b).

    Grid points within one spacing of a barrier are skipped (the bands are
    open there); atol absorbs rounding at the band edges.
    """
    if not isinstance(strategy, Hybrid):
        raise TypeError("pattern audit applies to hybrid strategies")
    a_p, a_c, b = strategy.a_p, strategy.a_c, strategy.b
    vf = ValueFunction(params, roots, strategy)
    if a_p > 0.0:
        branch = "interior"
    elif a_c > 0.0:
        branch = "ap_zero"
    else:
        branch = "both_zero"

    hi = 1.5 * b + 1.0 / roots.r1 if math.isfinite(b) else 3.0 * (a_c + 1.0 / roots.r1)
    x = np.linspace(0.0, hi, n_points)
    h = x[1] - x[0]
    d1 = vf.d1(x)
    violations: list[tuple[float, float, str]] = []

    def band(mask, lo, hi_, label):
        for xv, dv in zip(x[mask], d1[mask]):
            if not (lo - atol < dv < hi_ + atol):
                violations.append((float(xv), float(dv), label))

    away = lambda lev: np.abs(x - lev) > h
    if branch == "interior":
        band((x >= 0) & (x < a_p) & away(a_p), 1.0, math.inf, "V' > 1 on [0, a_p)")
        band(
            (x > a_p) & (x < a_c) & away(a_p) & away(a_c),
            params.beta,
            1.0,
            "V' in (beta, 1) on (a_p, a_c)",
        )
    elif branch == "ap_zero":
        v0 = float(vf.d1(0.0))
        if not (params.beta - atol < v0 <= 1.0 + atol):
            violations.append((0.0, v0, "V'(0) in (beta, 1]"))
        band(
            (x > 0) & (x < a_c) & away(a_c),
            params.beta,
            1.0,
            "V' in (beta, 1) on (0, a_c)",
        )
    else:
        v0 = float(vf.d1(0.0))
        if not (0.0 < v0 <= params.beta + atol):
            violations.append((0.0, v0, "V'(0) in (0, beta]"))
    band(
        (x > a_c) & (x < b) & away(a_c) & away(b),
        0.0,
        params.beta,
        "V' in (0, beta) on (a_c, b)",
    )
    if math.isfinite(b):
        flat = (x > b) & away(b)
        for xv, dv in zip(x[flat], d1[flat]):
            if abs(dv - params.beta) > 1e-12:
                violations.append((float(xv), float(dv), "V' = beta on [b, inf)"))
    return PatternAudit(passed=not violations, branch=branch, violations=violations)
